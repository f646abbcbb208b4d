#pragma once

#include <utility>
#include <vector>

#include "quatsylv/quaternion.hpp"
#include "quatsylv/shape.hpp"

namespace quatsylv {

class QuatMatrix;

// Dense even-order quaternion tensor.  Entries are stored flat in
// lexicographic multi-index order, first index most significant, with the
// row multi-index major and the column multi-index minor.  Values are
// immutable by convention: operations return new tensors.
class QTensor {
public:
    QTensor() = default;
    explicit QTensor(Shape shape)
        : shape_(std::move(shape)),
          data_(static_cast<std::size_t>(shape_.total_rows() * shape_.total_cols())) {}
    QTensor(Shape shape, std::vector<Quaternion> data);

    static QTensor zeros(Shape shape) { return QTensor(std::move(shape)); }
    // Unit tensor: square on the given mode extents, ones on the diagonal.
    static QTensor identity(const Dims& dims);

    const Shape& shape() const { return shape_; }
    std::int64_t total_rows() const { return shape_.total_rows(); }
    std::int64_t total_cols() const { return shape_.total_cols(); }
    const std::vector<Quaternion>& data() const { return data_; }

    const Quaternion& at(std::int64_t r, std::int64_t c) const {
        return data_[static_cast<std::size_t>(r * shape_.total_cols() + c)];
    }
    Quaternion& at(std::int64_t r, std::int64_t c) {
        return data_[static_cast<std::size_t>(r * shape_.total_cols() + c)];
    }
    // Multi-index access (indices are 0-based, length N / M).
    const Quaternion& at(const Dims& ri, const Dims& ci) const;
    Quaternion& at(const Dims& ri, const Dims& ci);

    double fro_norm() const;
    bool all_finite() const;

    QTensor operator+(const QTensor& o) const;
    QTensor operator-(const QTensor& o) const;
    QTensor operator-() const;
    QTensor scaled(double s) const;

    friend std::int64_t linear_index(const Dims& extents, const Dims& idx);
    friend void unravel(const Dims& extents, std::int64_t lin, Dims& idx);

private:
    Shape shape_;
    std::vector<Quaternion> data_;
};

// Lexicographic linearization, first index most significant.
std::int64_t linear_index(const Dims& extents, const Dims& idx);
void unravel(const Dims& extents, std::int64_t lin, Dims& idx);

// Einstein product: contracts a's column modes against b's row modes.
QTensor einstein_product(const QTensor& a, const QTensor& b);

QTensor conj_transpose(const QTensor& a);
QTensor eta_conj_transpose(const QTensor& a, EtaAxis eta);

// Block composition per the per-mode convention: the result's extents are
// the mode-wise sums and entries outside the two diagonal index blocks are
// zero.  row_block lays c|d side by side (column modes concatenated);
// column_block stacks a over b (row modes concatenated).
QTensor row_block(const QTensor& c, const QTensor& d);
QTensor column_block(const QTensor& a, const QTensor& b);
// Inverse extractions: the two diagonal blocks of a block tensor.
std::pair<QTensor, QTensor> split_row_block(const QTensor& t, const Dims& left_cols);
std::pair<QTensor, QTensor> split_column_block(const QTensor& t, const Dims& top_rows);

// Flattening isomorphism onto quaternion matrices: linear, bijective and a
// ring homomorphism (flatten(A *_N B) = flatten(A) * flatten(B)).
QuatMatrix flatten(const QTensor& a);
QTensor unflatten(const QuatMatrix& m, const Shape& shape);

}  // namespace quatsylv
