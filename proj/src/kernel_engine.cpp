#include "mpskernel/kernel_engine.hpp"

#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

namespace mpsk {

namespace {

constexpr double kImagTol = 1e-9;
constexpr double kZeroEngineTol = 1e-14;

void require_query_dims(const FrequencyLattice& lattice, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& x_prime, const char* who) {
  if (x.size() != lattice.dim() || x_prime.size() != lattice.dim())
    throw std::invalid_argument(std::string(who) + ": query dimension does not match lattice");
}

double finish_real(double re, double im, const char* who) {
  if (std::abs(im) > kImagTol)
    throw std::runtime_error(std::string(who) +
                             ": imaginary residue exceeds tolerance (weighting not symmetric?)");
  return re;
}

}  // namespace

KernelEngine new_engine(const FrequencyLattice& lattice, const WeightMPS& weights) {
  check_compatible(weights, lattice);
  const WeightMPS& ws = weights.symmetric ? weights : symmetrize(weights);
  KernelEngine engine;
  engine.lattice = lattice;
  engine.b_mps = hadamard(c_tensor_mps(lattice), ws);
  engine.norm2 = squared_sum(engine.b_mps);
  if (!(engine.norm2 > kZeroEngineTol))
    throw std::runtime_error("new_engine: zero weighting (normalizer vanishes)");
  return engine;
}

Eigen::VectorXcd local_features(const FrequencyAxis& axis, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("local_features: non-finite input");
  Eigen::VectorXcd psi(axis.size());
  const int m = axis.max_offset();
  for (int k = -m; k <= m; ++k) psi(m + k) = std::polar(1.0, axis.value_at(k) * x);
  return psi;
}

double eval_kernel(const KernelEngine& engine, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x_prime) {
  require_query_dims(engine.lattice, x, x_prime, "eval_kernel");
  const WeightMPS& b = engine.b_mps;

  // Complex transfer environment kept as a real/imaginary pair; the phase
  // of site j depends only on the displacement x'_j - x_j.
  Eigen::MatrixXd env_re = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd env_im = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd tmp, t_re, t_im;
  for (int j = 0; j < b.sites(); ++j) {
    const double delta = x_prime(j) - x(j);
    const int r = b.right_bond(j);
    const int m = b.max_offset(j);
    Eigen::MatrixXd next_re = Eigen::MatrixXd::Zero(r, r);
    Eigen::MatrixXd next_im = Eigen::MatrixXd::Zero(r, r);
    for (int s = 0; s < b.physical_dim(j); ++s) {
      const auto& slice = b.tensors[j][static_cast<std::size_t>(s)];
      const double w = engine.lattice.axes[j].value_at(s - m);
      const double c = std::cos(w * delta);
      const double si = std::sin(w * delta);
      tmp.noalias() = env_re * slice;
      t_re.noalias() = slice.transpose() * tmp;
      tmp.noalias() = env_im * slice;
      t_im.noalias() = slice.transpose() * tmp;
      next_re.noalias() += c * t_re - si * t_im;
      next_im.noalias() += si * t_re + c * t_im;
    }
    env_re = std::move(next_re);
    env_im = std::move(next_im);
  }
  return finish_real(env_re(0, 0) / engine.norm2, env_im(0, 0) / engine.norm2, "eval_kernel");
}

double eval_kernel_etk(const KernelEngine& engine, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& x_prime) {
  require_query_dims(engine.lattice, x, x_prime, "eval_kernel_etk");
  const WeightMPS& b = engine.b_mps;

  Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(1);
  for (int j = 0; j < b.sites(); ++j) {
    const int l = b.left_bond(j);
    const int r = b.right_bond(j);
    const Eigen::VectorXcd psi_x = local_features(engine.lattice.axes[j], x(j));
    const Eigen::VectorXcd psi_xp = local_features(engine.lattice.axes[j], x_prime(j));
    // Operator core of the doubled chain with fused bond pairs, with both
    // local feature vectors already attached (diagonal in the physical leg).
    Eigen::MatrixXcd core = Eigen::MatrixXcd::Zero(l * l, r * r);
    for (int s = 0; s < b.physical_dim(j); ++s) {
      const auto& slice = b.tensors[j][static_cast<std::size_t>(s)];
      const std::complex<double> phase = std::conj(psi_x(s)) * psi_xp(s);
      core += phase * Eigen::kroneckerProduct(slice, slice).eval().cast<std::complex<double>>();
    }
    v = (v * core).eval();
  }
  const std::complex<double> k = v(0) / engine.norm2;
  return finish_real(k.real(), k.imag(), "eval_kernel_etk");
}

Eigen::MatrixXd gram(const KernelEngine& engine, const Eigen::MatrixXd& rows_a,
                     const Eigen::MatrixXd& rows_b, int threads) {
  if (rows_a.cols() != engine.lattice.dim() || rows_b.cols() != engine.lattice.dim())
    throw std::invalid_argument("gram: point dimension does not match lattice");
  const Eigen::Index n = rows_a.rows();
  const Eigen::Index m = rows_b.rows();
  Eigen::MatrixXd g(n, m);

  auto fill_rows = [&](Eigen::Index begin, Eigen::Index end) {
    Eigen::VectorXd xi, xj;
    for (Eigen::Index i = begin; i < end; ++i) {
      xi = rows_a.row(i).transpose();
      for (Eigen::Index j = 0; j < m; ++j) {
        xj = rows_b.row(j).transpose();
        g(i, j) = eval_kernel(engine, xi, xj);
      }
    }
  };

  if (threads <= 1 || n < 2) {
    fill_rows(0, n);
    return g;
  }
  const int workers = static_cast<int>(std::min<Eigen::Index>(threads, n));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < workers; ++t) {
    const Eigen::Index begin = n * t / workers;
    const Eigen::Index end = n * (t + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        fill_rows(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return g;
}

Eigen::VectorXcd dense_feature_phi2(const FrequencyLattice& lattice, const WeightMPS& weights,
                                    const Eigen::VectorXd& x, std::uint64_t cap) {
  check_compatible(weights, lattice);
  if (x.size() != lattice.dim())
    throw std::invalid_argument("dense_feature_phi2: query dimension mismatch");
  const std::uint64_t card = lattice.size();
  if (card > cap) throw std::runtime_error("dense_feature_phi2: enumeration cap exceeded");

  Eigen::VectorXcd phi(static_cast<Eigen::Index>(card));
  double half_norm2 = 0.0;
  Eigen::Index pos = 0;
  for_each_index(lattice, [&](const MultiIndex& idx) {
    const double ws = 0.5 * (eval_weight(weights, idx) + eval_weight(weights, negated(idx)));
    if (is_positive_rep(idx)) half_norm2 += ws * ws;
    double phase = 0.0;
    bool zero = true;
    for (int j = 0; j < lattice.dim(); ++j) {
      phase += lattice.axes[j].value_at(idx[j]) * x(j);
      if (idx[j] != 0) zero = false;
    }
    phi(pos++) = (zero ? std::sqrt(2.0) * ws : ws) * std::polar(1.0, phase);
  });
  if (!(half_norm2 > 0.0))
    throw std::runtime_error("dense_feature_phi2: zero weighting");
  phi /= std::sqrt(2.0 * half_norm2);
  return phi;
}

double dense_kernel(const FrequencyLattice& lattice, const WeightMPS& weights,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                    const std::function<bool(const MultiIndex&)>& splitting,
                    std::uint64_t cap) {
  check_compatible(weights, lattice);
  if (x.size() != lattice.dim() || x_prime.size() != lattice.dim())
    throw std::invalid_argument("dense_kernel: query dimension mismatch");
  if (lattice.size() > cap) throw std::runtime_error("dense_kernel: enumeration cap exceeded");

  double norm = 0.0;
  double acc = 0.0;
  for_each_index(lattice, [&](const MultiIndex& idx) {
    if (!splitting(idx)) return;
    const double w = 0.5 * (eval_weight(weights, idx) + eval_weight(weights, negated(idx)));
    const double w2 = w * w;
    double phase = 0.0;
    for (int j = 0; j < lattice.dim(); ++j)
      phase += lattice.axes[j].value_at(idx[j]) * (x(j) - x_prime(j));
    norm += w2;
    acc += w2 * std::cos(phase);
  });
  if (!(norm > 0.0)) throw std::runtime_error("dense_kernel: zero weighting");
  return acc / norm;
}

double dense_kernel(const FrequencyLattice& lattice, const WeightMPS& weights,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                    std::uint64_t cap) {
  return dense_kernel(lattice, weights, x, x_prime,
                      [](const MultiIndex& idx) { return is_positive_rep(idx); }, cap);
}

}  // namespace mpsk
