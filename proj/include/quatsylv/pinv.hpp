#pragma once

#include "quatsylv/qtensor.hpp"
#include "quatsylv/quatmat.hpp"

namespace quatsylv {

// Numerical rank cutoff: singular values below rtol * sigma_max * max(2m, 2n)
// are treated as zero.  noise_floor (when > 0) is an absolute lower bound used
// by the solver cascade for intermediates whose entries are pure rounding
// noise; user-facing entry points leave it at 0.
struct RankTolerance {
    double rtol = 1e-12;
};

QuatMatrix pinv_matrix(const QuatMatrix& m, RankTolerance tol = {},
                       double noise_floor = 0.0);

// Projector onto ker(m) (that is, I - pinv(m) * m) built from the SVD
// null-space basis, and the cokernel analogue I - m * pinv(m).
QuatMatrix null_projector(const QuatMatrix& m, RankTolerance tol = {},
                          double noise_floor = 0.0);
QuatMatrix conull_projector(const QuatMatrix& m, RankTolerance tol = {},
                            double noise_floor = 0.0);

QTensor pinv_tensor(const QTensor& a, RankTolerance tol = {});
QTensor left_projector(const QTensor& a, RankTolerance tol = {});   // L_A
QTensor right_projector(const QTensor& a, RankTolerance tol = {});  // R_A

// One decomposition, all three derived operators, plus the rank decision
// data the solver needs for noise propagation.
struct SvdOps {
    QuatMatrix pinv, left, right;
    int rank = 0;  // quaternionic rank (pairs of chi singular values)
    double sigma_max = 0.0;
    double sigma_kept_min = 0.0;
};
SvdOps svd_ops(const QuatMatrix& m, RankTolerance tol = {}, double noise_floor = 0.0);

}  // namespace quatsylv
