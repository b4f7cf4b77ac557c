#pragma once

// Shared brute-force references and fixture builders for the test suites.
// Everything here goes through public API only and stays independent of
// the contraction paths it is used to check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mpskernel/kernel_engine.hpp"
#include "mpskernel/lattice.hpp"
#include "mpskernel/pqc.hpp"
#include "mpskernel/regression.hpp"
#include "mpskernel/weight_mps.hpp"

namespace support {

inline mpsk::FrequencyLattice integer_lattice(const std::vector<int>& max_offsets) {
  mpsk::FrequencyLattice lattice;
  for (int m : max_offsets) lattice.axes.push_back(mpsk::axis_integer(m));
  return lattice;
}

// Dense table of every chain value in odometer order (last axis fastest),
// built by explicit left-to-right expansion instead of per-index products.
inline std::vector<double> dense_weights(const mpsk::WeightMPS& mps) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < mps.sites(); ++j) {
    const int p = mps.physical_dim(j);
    const Eigen::Index r = mps.tensors[j][0].cols();
    Eigen::MatrixXd next(table.rows() * p, r);
    for (Eigen::Index row = 0; row < table.rows(); ++row) {
      for (int s = 0; s < p; ++s)
        next.row(row * p + s) = table.row(row) * mps.tensors[j][static_cast<std::size_t>(s)];
    }
    table = std::move(next);
  }
  return std::vector<double>(table.data(), table.data() + table.rows());
}

inline Eigen::VectorXd random_point(std::mt19937_64& rng, int d, double radius = M_PI) {
  std::uniform_real_distribution<double> box(-radius, radius);
  Eigen::VectorXd x(d);
  for (int j = 0; j < d; ++j) x(j) = box(rng);
  return x;
}

// Target with random coefficients over one representative per mirror pair;
// lies in the span reproduced by the canonical kernel on the same lattice.
struct HalfLatticeTarget {
  std::vector<Eigen::VectorXd> frequencies;
  std::vector<double> cos_coeff;
  std::vector<double> sin_coeff;

  double operator()(const Eigen::VectorXd& x) const {
    double value = 0.0;
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
      const double phase = frequencies[i].dot(x);
      value += cos_coeff[i] * std::cos(phase) + sin_coeff[i] * std::sin(phase);
    }
    return value;
  }
};

inline HalfLatticeTarget random_half_lattice_target(const mpsk::FrequencyLattice& lattice,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  HalfLatticeTarget target;
  for (const auto& idx : mpsk::half_lattice(lattice)) {
    const auto freq = mpsk::frequency_of(lattice, idx);
    target.frequencies.push_back(
        Eigen::Map<const Eigen::VectorXd>(freq.data(), static_cast<Eigen::Index>(freq.size())));
    target.cos_coeff.push_back(normal(rng));
    bool zero = true;
    for (int k : idx) zero = zero && k == 0;
    target.sin_coeff.push_back(zero ? 0.0 : normal(rng));
  }
  return target;
}

inline mpsk::Dataset sample_dataset(const HalfLatticeTarget& target, int n, int d,
                                    std::mt19937_64& rng) {
  mpsk::Dataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = random_point(rng, d);
    data.X.row(i) = x.transpose();
    data.y(i) = target(x);
  }
  return data;
}

inline Eigen::MatrixXcd random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j)
      a(i, j) = std::complex<double>(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::complex<double> pivot = r(j, j);
    if (std::abs(pivot) > 0) q.col(j) *= std::conj(pivot) / std::abs(pivot);
  }
  return q;
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j)
      a(i, j) = std::complex<double>(normal(rng), normal(rng));
  }
  return 0.5 * (a + a.adjoint());
}

// Two-qubit circuit over two data axes, each encoded once with a Z/2
// generator (axis frequencies -1, 0, 1), with random entangling unitaries,
// one parameterized rotation, and a random Hermitian observable.
inline mpsk::CircuitSpec random_z_circuit(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  mpsk::CircuitSpec circuit;
  circuit.qubits = 2;
  circuit.data_dim = 2;
  circuit.theta = Eigen::VectorXd::Constant(1, angle(rng));
  circuit.gates.emplace_back(mpsk::UnitaryGate{{0, 1}, random_unitary(4, rng)});
  circuit.gates.emplace_back(mpsk::z_data_gate(0, 0, 0.5));
  circuit.gates.emplace_back(mpsk::UnitaryGate{{0, 1}, random_unitary(4, rng)});
  circuit.gates.emplace_back(mpsk::z_data_gate(1, 1, 0.5));
  circuit.gates.emplace_back(mpsk::RotationGate{{0}, 0.5 * mpsk::pauli_matrix('Y'), 0});
  circuit.gates.emplace_back(mpsk::UnitaryGate{{0, 1}, random_unitary(4, rng)});
  circuit.observable = mpsk::Observable{{0, 1}, random_hermitian(4, rng)};
  return circuit;
}

// Single-qubit circuit computing f(x) = cos(x_1): Hadamard, Z/2 encoding,
// X observable.
inline mpsk::CircuitSpec cosine_circuit() {
  mpsk::CircuitSpec circuit;
  circuit.qubits = 1;
  circuit.data_dim = 1;
  circuit.gates.emplace_back(mpsk::UnitaryGate{{0}, mpsk::hadamard_matrix()});
  circuit.gates.emplace_back(mpsk::z_data_gate(0, 0, 0.5));
  circuit.observable = mpsk::Observable{{0}, mpsk::pauli_matrix('X')};
  return circuit;
}

}  // namespace support
