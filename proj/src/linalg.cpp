#include "mpskernel/linalg.hpp"

#include <stdexcept>

namespace mpsk {

namespace {

constexpr double kJitterStart = 1e-12;
constexpr double kJitterMax = 1e-6;

template <typename Matrix, typename Vector>
Vector cholesky_with_jitter(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("solve: dimension mismatch");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  for (double jitter = kJitterStart; jitter <= kJitterMax * (1.0 + 1e-9); jitter *= 10.0) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt.solve(b);
  }
  throw std::runtime_error("solve: factorization failed after maximum jitter");
}

}  // namespace

Eigen::VectorXd solve_spd_jittered(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return cholesky_with_jitter<Eigen::MatrixXd, Eigen::VectorXd>(a, b);
}

Eigen::VectorXcd solve_hpd_jittered(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
  return cholesky_with_jitter<Eigen::MatrixXcd, Eigen::VectorXcd>(a, b);
}

}  // namespace mpsk
