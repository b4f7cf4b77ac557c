#pragma once

#include <Eigen/Dense>

namespace mpsk {

/// Solves A x = b for symmetric positive (semi)definite A via Cholesky.
/// On factorization failure, adds diagonal jitter 1e-12 and escalates by
/// factors of 10 up to 1e-6 before giving up.
Eigen::VectorXd solve_spd_jittered(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Hermitian positive-definite variant used by the Fourier coefficient fit.
Eigen::VectorXcd solve_hpd_jittered(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b);

}  // namespace mpsk
