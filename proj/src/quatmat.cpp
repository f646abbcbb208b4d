#include "quatsylv/quatmat.hpp"

#include <stdexcept>

namespace quatsylv {

QuatMatrix::QuatMatrix(ComplexMatrix a, ComplexMatrix b)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.rows() || a_.cols() != b_.cols())
        throw std::invalid_argument("QuatMatrix: parts disagree in size");
}

QuatMatrix QuatMatrix::identity(std::int64_t n) {
    return QuatMatrix(ComplexMatrix::Identity(n, n), ComplexMatrix::Zero(n, n));
}

QuatMatrix QuatMatrix::operator*(const QuatMatrix& o) const {
    if (cols() != o.rows())
        throw std::invalid_argument("QuatMatrix: size mismatch in product");
    // (a + b j)(c + d j) = (ac - b conj(d)) + (ad + b conj(c)) j
    return QuatMatrix(a_ * o.a_ - b_ * o.b_.conjugate(),
                      a_ * o.b_ + b_ * o.a_.conjugate());
}

QuatMatrix QuatMatrix::operator+(const QuatMatrix& o) const {
    return QuatMatrix(a_ + o.a_, b_ + o.b_);
}

QuatMatrix QuatMatrix::operator-(const QuatMatrix& o) const {
    return QuatMatrix(a_ - o.a_, b_ - o.b_);
}

QuatMatrix QuatMatrix::hermitian() const {
    // conj(a + b j) = conj(a) - b j, then transpose
    return QuatMatrix(a_.adjoint(), -b_.transpose());
}

double QuatMatrix::fro_norm() const {
    return std::sqrt(a_.squaredNorm() + b_.squaredNorm());
}

ComplexMatrix complex_adjoint(const QuatMatrix& m) {
    const auto r = m.rows(), c = m.cols();
    ComplexMatrix out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = m.part_a();
    out.topRightCorner(r, c) = m.part_b();
    out.bottomLeftCorner(r, c) = -m.part_b().conjugate();
    out.bottomRightCorner(r, c) = m.part_a().conjugate();
    return out;
}

QuatMatrix from_complex_adjoint(const ComplexMatrix& cm, double* asymmetry) {
    if (cm.rows() % 2 != 0 || cm.cols() % 2 != 0)
        throw std::invalid_argument("from_complex_adjoint: odd dimensions");
    const auto r = cm.rows() / 2, c = cm.cols() / 2;
    ComplexMatrix a = (cm.topLeftCorner(r, c) + cm.bottomRightCorner(r, c).conjugate()) / 2.0;
    ComplexMatrix b = (cm.topRightCorner(r, c) - cm.bottomLeftCorner(r, c).conjugate()) / 2.0;
    if (asymmetry) {
        const double na = (cm.topLeftCorner(r, c) - cm.bottomRightCorner(r, c).conjugate()).norm();
        const double nb = (cm.topRightCorner(r, c) + cm.bottomLeftCorner(r, c).conjugate()).norm();
        const double scale = cm.norm();
        *asymmetry = scale > 0.0 ? std::sqrt(na * na + nb * nb) / scale : 0.0;
    }
    return QuatMatrix(std::move(a), std::move(b));
}

}  // namespace quatsylv
