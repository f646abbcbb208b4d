#include "quatsylv/qtensor.hpp"

#include <cmath>
#include <ostream>

#include "quatsylv/quatmat.hpp"

namespace quatsylv {

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << "(" << q.w << "," << q.x << "," << q.y << "," << q.z << ")";
}

QTensor::QTensor(Shape shape, std::vector<Quaternion> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != shape_.total_rows() * shape_.total_cols())
        throw ShapeMismatch("QTensor: data length does not match shape " + shape_.str());
}

QTensor QTensor::identity(const Dims& dims) {
    QTensor t(Shape(dims, dims));
    const std::int64_t n = t.total_rows();
    for (std::int64_t i = 0; i < n; ++i) t.at(i, i) = Quaternion::real(1.0);
    return t;
}

std::int64_t linear_index(const Dims& extents, const Dims& idx) {
    std::int64_t lin = 0;
    for (std::size_t s = 0; s < extents.size(); ++s) lin = lin * extents[s] + idx[s];
    return lin;
}

void unravel(const Dims& extents, std::int64_t lin, Dims& idx) {
    idx.resize(extents.size());
    for (std::size_t s = extents.size(); s-- > 0;) {
        idx[s] = lin % extents[s];
        lin /= extents[s];
    }
}

const Quaternion& QTensor::at(const Dims& ri, const Dims& ci) const {
    return at(linear_index(shape_.rows, ri), linear_index(shape_.cols, ci));
}

Quaternion& QTensor::at(const Dims& ri, const Dims& ci) {
    return at(linear_index(shape_.rows, ri), linear_index(shape_.cols, ci));
}

double QTensor::fro_norm() const {
    double s = 0.0;
    for (const auto& q : data_) s += q.norm_sq();
    return std::sqrt(s);
}

bool QTensor::all_finite() const {
    for (const auto& q : data_)
        if (!(std::isfinite(q.w) && std::isfinite(q.x) && std::isfinite(q.y) &&
              std::isfinite(q.z)))
            return false;
    return true;
}

QTensor QTensor::operator+(const QTensor& o) const {
    if (shape_ != o.shape_)
        throw ShapeMismatch("add: shapes differ: " + shape_.str() + " vs " + o.shape_.str());
    QTensor r(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
}

QTensor QTensor::operator-(const QTensor& o) const {
    if (shape_ != o.shape_)
        throw ShapeMismatch("sub: shapes differ: " + shape_.str() + " vs " + o.shape_.str());
    QTensor r(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
}

QTensor QTensor::operator-() const {
    QTensor r(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = -data_[i];
    return r;
}

QTensor QTensor::scaled(double s) const {
    QTensor r(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * s;
    return r;
}

QTensor einstein_product(const QTensor& a, const QTensor& b) {
    if (a.shape().cols != b.shape().rows)
        throw ShapeMismatch("einstein_product: contraction modes disagree: " +
                            dims_str(a.shape().cols) + " vs " + dims_str(b.shape().rows));
    QTensor r(Shape(a.shape().rows, b.shape().cols));
    const std::int64_t m = a.total_rows();
    const std::int64_t k = a.total_cols();
    const std::int64_t n = b.total_cols();
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < k; ++j) {
            const Quaternion& aij = a.at(i, j);
            if (aij.is_zero()) continue;
            for (std::int64_t c = 0; c < n; ++c) r.at(i, c) += aij * b.at(j, c);
        }
    }
    return r;
}

QTensor conj_transpose(const QTensor& a) {
    QTensor r(a.shape().transposed());
    const std::int64_t m = a.total_rows();
    const std::int64_t n = a.total_cols();
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < n; ++j) r.at(j, i) = qconj(a.at(i, j));
    return r;
}

QTensor eta_conj_transpose(const QTensor& a, EtaAxis eta) {
    // entry (j,i) = -eta * conj(a(i,j)) * eta, which eta_conj provides whole
    QTensor r(a.shape().transposed());
    const std::int64_t m = a.total_rows();
    const std::int64_t n = a.total_cols();
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < n; ++j) r.at(j, i) = eta_conj(a.at(i, j), eta);
    return r;
}

namespace {

Dims mode_sum(const Dims& a, const Dims& b) {
    Dims out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] + b[s];
    return out;
}

// Classify a multi-index of the concatenated extents: 0 if every component
// lies in the first block, 1 if every component lies in the second, -1 mixed.
int block_of(const Dims& idx, const Dims& first, Dims& local) {
    bool all_first = true, all_second = true;
    local.resize(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
        if (idx[s] < first[s])
            all_second = false;
        else
            all_first = false;
    }
    if (all_first) {
        local = idx;
        return 0;
    }
    if (all_second) {
        for (std::size_t s = 0; s < idx.size(); ++s) local[s] = idx[s] - first[s];
        return 1;
    }
    return -1;
}

}  // namespace

QTensor row_block(const QTensor& c, const QTensor& d) {
    if (c.shape().rows != d.shape().rows)
        throw ShapeMismatch("row_block: row modes differ: " + dims_str(c.shape().rows) +
                            " vs " + dims_str(d.shape().rows));
    if (c.shape().cols.size() != d.shape().cols.size())
        throw ShapeMismatch("row_block: column orders differ");
    QTensor r(Shape(c.shape().rows, mode_sum(c.shape().cols, d.shape().cols)));
    const std::int64_t m = r.total_rows();
    const std::int64_t n = r.total_cols();
    Dims ci, local;
    for (std::int64_t col = 0; col < n; ++col) {
        unravel(r.shape().cols, col, ci);
        const int blk = block_of(ci, c.shape().cols, local);
        if (blk < 0) continue;
        const QTensor& src = blk == 0 ? c : d;
        const std::int64_t scol = linear_index(src.shape().cols, local);
        for (std::int64_t row = 0; row < m; ++row) r.at(row, col) = src.at(row, scol);
    }
    return r;
}

QTensor column_block(const QTensor& a, const QTensor& b) {
    if (a.shape().cols != b.shape().cols)
        throw ShapeMismatch("column_block: column modes differ: " + dims_str(a.shape().cols) +
                            " vs " + dims_str(b.shape().cols));
    if (a.shape().rows.size() != b.shape().rows.size())
        throw ShapeMismatch("column_block: row orders differ");
    QTensor r(Shape(mode_sum(a.shape().rows, b.shape().rows), a.shape().cols));
    const std::int64_t m = r.total_rows();
    const std::int64_t n = r.total_cols();
    Dims ri, local;
    for (std::int64_t row = 0; row < m; ++row) {
        unravel(r.shape().rows, row, ri);
        const int blk = block_of(ri, a.shape().rows, local);
        if (blk < 0) continue;
        const QTensor& src = blk == 0 ? a : b;
        const std::int64_t srow = linear_index(src.shape().rows, local);
        for (std::int64_t col = 0; col < n; ++col) r.at(row, col) = src.at(srow, col);
    }
    return r;
}

std::pair<QTensor, QTensor> split_row_block(const QTensor& t, const Dims& left_cols) {
    const Dims& full = t.shape().cols;
    if (left_cols.size() != full.size())
        throw ShapeMismatch("split_row_block: order mismatch");
    Dims right_cols(full.size());
    for (std::size_t s = 0; s < full.size(); ++s) {
        right_cols[s] = full[s] - left_cols[s];
        if (left_cols[s] < 1 || right_cols[s] < 1)
            throw ShapeMismatch("split_row_block: block extents out of range");
    }
    QTensor lhs(Shape(t.shape().rows, left_cols));
    QTensor rhs(Shape(t.shape().rows, right_cols));
    const std::int64_t m = t.total_rows();
    Dims ci, local;
    for (std::int64_t col = 0; col < t.total_cols(); ++col) {
        unravel(full, col, ci);
        const int blk = block_of(ci, left_cols, local);
        if (blk < 0) continue;
        QTensor& dst = blk == 0 ? lhs : rhs;
        const std::int64_t dcol = linear_index(dst.shape().cols, local);
        for (std::int64_t row = 0; row < m; ++row) dst.at(row, dcol) = t.at(row, col);
    }
    return {std::move(lhs), std::move(rhs)};
}

std::pair<QTensor, QTensor> split_column_block(const QTensor& t, const Dims& top_rows) {
    const Dims& full = t.shape().rows;
    if (top_rows.size() != full.size())
        throw ShapeMismatch("split_column_block: order mismatch");
    Dims bottom_rows(full.size());
    for (std::size_t s = 0; s < full.size(); ++s) {
        bottom_rows[s] = full[s] - top_rows[s];
        if (top_rows[s] < 1 || bottom_rows[s] < 1)
            throw ShapeMismatch("split_column_block: block extents out of range");
    }
    QTensor top(Shape(top_rows, t.shape().cols));
    QTensor bottom(Shape(bottom_rows, t.shape().cols));
    const std::int64_t n = t.total_cols();
    Dims ri, local;
    for (std::int64_t row = 0; row < t.total_rows(); ++row) {
        unravel(full, row, ri);
        const int blk = block_of(ri, top_rows, local);
        if (blk < 0) continue;
        QTensor& dst = blk == 0 ? top : bottom;
        const std::int64_t drow = linear_index(dst.shape().rows, local);
        for (std::int64_t col = 0; col < n; ++col) dst.at(drow, col) = t.at(row, col);
    }
    return {std::move(top), std::move(bottom)};
}

QuatMatrix flatten(const QTensor& a) {
    QuatMatrix m(a.total_rows(), a.total_cols());
    for (std::int64_t r = 0; r < a.total_rows(); ++r)
        for (std::int64_t c = 0; c < a.total_cols(); ++c) m.set(r, c, a.at(r, c));
    return m;
}

QTensor unflatten(const QuatMatrix& m, const Shape& shape) {
    if (m.rows() != shape.total_rows() || m.cols() != shape.total_cols())
        throw ShapeMismatch("unflatten: matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", shape wants " + shape.str());
    QTensor t(shape);
    for (std::int64_t r = 0; r < m.rows(); ++r)
        for (std::int64_t c = 0; c < m.cols(); ++c) t.at(r, c) = m.at(r, c);
    return t;
}

}  // namespace quatsylv
