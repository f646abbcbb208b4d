#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "quatsylv/quaternion.hpp"
#include "quatsylv/shape.hpp"

namespace quatsylv {

using ComplexMatrix = Eigen::MatrixXcd;

// Dense quaternion matrix stored as the complex pair (a, b) with M = a + b*j,
// a = w + x*i, b = y + z*i entrywise.
class QuatMatrix {
public:
    QuatMatrix() = default;
    QuatMatrix(std::int64_t rows, std::int64_t cols)
        : a_(ComplexMatrix::Zero(rows, cols)), b_(ComplexMatrix::Zero(rows, cols)) {}
    QuatMatrix(ComplexMatrix a, ComplexMatrix b);

    static QuatMatrix identity(std::int64_t n);

    std::int64_t rows() const { return a_.rows(); }
    std::int64_t cols() const { return a_.cols(); }
    const ComplexMatrix& part_a() const { return a_; }
    const ComplexMatrix& part_b() const { return b_; }

    Quaternion at(std::int64_t r, std::int64_t c) const {
        return {a_(r, c).real(), a_(r, c).imag(), b_(r, c).real(), b_(r, c).imag()};
    }
    void set(std::int64_t r, std::int64_t c, const Quaternion& q) {
        a_(r, c) = {q.w, q.x};
        b_(r, c) = {q.y, q.z};
    }

    QuatMatrix operator*(const QuatMatrix& o) const;
    QuatMatrix operator+(const QuatMatrix& o) const;
    QuatMatrix operator-(const QuatMatrix& o) const;
    QuatMatrix operator-() const { return QuatMatrix(-a_, -b_); }
    QuatMatrix scaled(double s) const { return QuatMatrix(a_ * s, b_ * s); }
    QuatMatrix hermitian() const;  // conjugate transpose

    double fro_norm() const;

private:
    ComplexMatrix a_, b_;
};

// chi(M): the 2m x 2n complex block matrix [[a, b], [-conj(b), conj(a)]].
// Multiplicative and star-preserving, so matrix algebra over H transports to C.
ComplexMatrix complex_adjoint(const QuatMatrix& m);

// Inverse of complex_adjoint.  The blocks are symmetrized; the relative
// asymmetry (which is rounding-level for any true chi image) is reported
// through *asymmetry when non-null.
QuatMatrix from_complex_adjoint(const ComplexMatrix& c, double* asymmetry = nullptr);

}  // namespace quatsylv
