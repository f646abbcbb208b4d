#include "quatsylv/pinv.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace quatsylv {

namespace {

struct ChiSvd {
    Eigen::JacobiSVD<ComplexMatrix> svd;
    int rank = 0;
};

ChiSvd decompose(const QuatMatrix& m, const RankTolerance& tol, double noise_floor) {
    if (!(tol.rtol > 0.0 && tol.rtol < 1.0))
        throw std::invalid_argument("RankTolerance: rtol must lie in (0, 1)");
    ChiSvd out;
    const ComplexMatrix chi = complex_adjoint(m);
    out.svd.compute(chi, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = out.svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) {
        out.rank = 0;
        return out;
    }
    double cutoff = tol.rtol * sv(0) * static_cast<double>(std::max(chi.rows(), chi.cols()));
    if (noise_floor > 0.0 && noise_floor > cutoff) cutoff = noise_floor;
    int r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    // chi images carry paired singular values; never split a pair
    if (r % 2 != 0) {
        if (r < sv.size() && sv(0) > 0 && sv(r) > 0.5 * sv(r - 1))
            ++r;
        else
            --r;
    }
    out.rank = r;
    return out;
}

}  // namespace

QuatMatrix pinv_matrix(const QuatMatrix& m, RankTolerance tol, double noise_floor) {
    const ChiSvd d = decompose(m, tol, noise_floor);
    if (d.rank == 0) return QuatMatrix(m.cols(), m.rows());
    const auto& sv = d.svd.singularValues();
    ComplexMatrix p = d.svd.matrixV().leftCols(d.rank) *
                      sv.head(d.rank).cwiseInverse().asDiagonal() *
                      d.svd.matrixU().leftCols(d.rank).adjoint();
    double asym = 0.0;
    QuatMatrix out = from_complex_adjoint(p, &asym);
    if (asym > 1e-8)
        throw std::runtime_error("pinv_matrix: pseudo-inverse lost the quaternion block structure");
    return out;
}

QuatMatrix null_projector(const QuatMatrix& m, RankTolerance tol, double noise_floor) {
    const ChiSvd d = decompose(m, tol, noise_floor);
    const auto n = m.cols();
    if (d.rank == 0) return QuatMatrix::identity(n);
    if (d.rank == 2 * n) return QuatMatrix(n, n);
    const ComplexMatrix v2 = d.svd.matrixV().rightCols(2 * n - d.rank);
    return from_complex_adjoint(v2 * v2.adjoint());
}

QuatMatrix conull_projector(const QuatMatrix& m, RankTolerance tol, double noise_floor) {
    const ChiSvd d = decompose(m, tol, noise_floor);
    const auto r = m.rows();
    if (d.rank == 0) return QuatMatrix::identity(r);
    if (d.rank == 2 * r) return QuatMatrix(r, r);
    const ComplexMatrix u2 = d.svd.matrixU().rightCols(2 * r - d.rank);
    return from_complex_adjoint(u2 * u2.adjoint());
}

SvdOps svd_ops(const QuatMatrix& m, RankTolerance tol, double noise_floor) {
    const ChiSvd d = decompose(m, tol, noise_floor);
    SvdOps out;
    out.rank = d.rank / 2;
    const auto& sv = d.svd.singularValues();
    if (sv.size() > 0) out.sigma_max = sv(0);
    if (d.rank > 0) out.sigma_kept_min = sv(d.rank - 1);

    if (d.rank == 0) {
        out.pinv = QuatMatrix(m.cols(), m.rows());
    } else {
        ComplexMatrix p = d.svd.matrixV().leftCols(d.rank) *
                          sv.head(d.rank).cwiseInverse().asDiagonal() *
                          d.svd.matrixU().leftCols(d.rank).adjoint();
        out.pinv = from_complex_adjoint(p);
    }
    const auto n = m.cols(), r = m.rows();
    if (d.rank == 0)
        out.left = QuatMatrix::identity(n);
    else if (d.rank == 2 * n)
        out.left = QuatMatrix(n, n);
    else {
        const ComplexMatrix v2 = d.svd.matrixV().rightCols(2 * n - d.rank);
        out.left = from_complex_adjoint(v2 * v2.adjoint());
    }
    if (d.rank == 0)
        out.right = QuatMatrix::identity(r);
    else if (d.rank == 2 * r)
        out.right = QuatMatrix(r, r);
    else {
        const ComplexMatrix u2 = d.svd.matrixU().rightCols(2 * r - d.rank);
        out.right = from_complex_adjoint(u2 * u2.adjoint());
    }
    return out;
}

QTensor pinv_tensor(const QTensor& a, RankTolerance tol) {
    return unflatten(pinv_matrix(flatten(a), tol), a.shape().transposed());
}

QTensor left_projector(const QTensor& a, RankTolerance tol) {
    return unflatten(null_projector(flatten(a), tol),
                     Shape(a.shape().cols, a.shape().cols));
}

QTensor right_projector(const QTensor& a, RankTolerance tol) {
    return unflatten(conull_projector(flatten(a), tol),
                     Shape(a.shape().rows, a.shape().rows));
}

}  // namespace quatsylv
