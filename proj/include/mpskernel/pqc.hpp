#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "mpskernel/lattice.hpp"

namespace mpsk {

inline constexpr int kMaxQubits = 10;  // dense statevector, desk scale

/// Data-dependent gate exp(-i H x_axis) with H diagonal in the
/// computational basis of the targets; eigenvalues[b] belongs to the basis
/// state whose k-th target bit is bit k of b (first target least
/// significant). Axis is a 0-based data component.
struct DataGate {
  int axis = 0;
  std::vector<int> targets;
  std::vector<double> eigenvalues;
};

struct UnitaryGate {
  std::vector<int> targets;
  Eigen::MatrixXcd matrix;
};

/// Parameterized gate exp(-i theta[theta_index] H) for a Hermitian
/// generator on the targets.
struct RotationGate {
  std::vector<int> targets;
  Eigen::MatrixXcd generator;
  int theta_index = 0;
};

using Gate = std::variant<DataGate, UnitaryGate, RotationGate>;

struct Observable {
  std::vector<int> targets;
  Eigen::MatrixXcd matrix;  // Hermitian
};

struct CircuitSpec {
  int qubits = 1;
  int data_dim = 1;
  std::vector<Gate> gates;
  Observable observable;
  Eigen::VectorXd theta;
};

/// Structural checks: qubit cap, target bounds, matrix shapes, unitarity
/// and Hermiticity to 1e-10, axis and theta slot bounds.
void validate_circuit(const CircuitSpec& circuit);

/// Expectation value <0| U(x,theta)^dag O U(x,theta) |0>. The state norm is
/// checked after every gate and the imaginary part of the expectation must
/// stay within 1e-10.
double simulate_f(const CircuitSpec& circuit, const Eigen::VectorXd& x);

/// Per-axis frequency sets from the eigenvalue lists of the gates encoding
/// each axis; axes that are never encoded get the single-frequency axis (0).
FrequencyLattice induced_lattice(const CircuitSpec& circuit);

struct FourierFit {
  std::vector<MultiIndex> indices;  // odometer order over the fitted lattice
  Eigen::VectorXcd coefficients;
  double residual = 0.0;  // RMS over the sample set
};

/// Least-squares fit of the circuit's function against the complex
/// exponential features of the lattice, sampled uniformly on [0, 2pi)^d.
/// sample_count == 0 picks max(4 |lattice|, 64); the resolved count must be
/// at least 2 |lattice|. A numerically rank-deficient design (frequencies
/// too close to resolve, i.e. aliasing) is rejected. Non-integer lattices
/// are fittable but the sampling window only separates frequencies whose
/// gaps are resolvable on [0, 2pi).
FourierFit fourier_fit(const CircuitSpec& circuit, const FrequencyLattice& lattice,
                       std::size_t sample_count, std::uint64_t seed);

// Gate/observable helpers.
Eigen::MatrixXcd pauli_matrix(char pauli);  // 'I','X','Y','Z'
Eigen::MatrixXcd hadamard_matrix();
Eigen::MatrixXcd cnot_matrix();  // targets = {control, target}

/// Single-qubit data gate with generator scale * Z (eigenvalues +-scale).
DataGate z_data_gate(int axis, int qubit, double scale);

nlohmann::json circuit_to_json(const CircuitSpec& circuit);
CircuitSpec circuit_from_json(const nlohmann::json& j);

}  // namespace mpsk
