#include "mpskernel/pqc.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "mpskernel/linalg.hpp"

namespace mpsk {

namespace {

using Cx = std::complex<double>;

constexpr double kMatrixTol = 1e-10;
constexpr double kNormTol = 1e-12;
constexpr double kImagTol = 1e-10;
constexpr std::size_t kMaxFitLattice = 4096;
constexpr double kMaxFitEntries = 2e7;

void require_targets(int qubits, const std::vector<int>& targets, const char* who) {
  if (targets.empty()) throw std::invalid_argument(std::string(who) + ": no target qubits");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= qubits)
      throw std::invalid_argument(std::string(who) + ": target qubit out of range");
    for (std::size_t k = 0; k < i; ++k) {
      if (targets[k] == targets[i])
        throw std::invalid_argument(std::string(who) + ": duplicate target qubit");
    }
  }
}

bool is_unitary(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
             .cwiseAbs()
             .maxCoeff() <= kMatrixTol;
}

bool is_hermitian(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) return false;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= kMatrixTol;
}

Eigen::Index subspace_dim(const std::vector<int>& targets) {
  return Eigen::Index(1) << targets.size();
}

/// Applies a dense operator on the target qubits (first target is the
/// least significant bit of the sub-basis). Works for any matrix, not just
/// unitaries, so it also serves the observable.
void apply_operator(Eigen::VectorXcd& state, int qubits, const std::vector<int>& targets,
                    const Eigen::MatrixXcd& op) {
  const Eigen::Index dim = subspace_dim(targets);
  std::size_t target_mask = 0;
  std::vector<std::size_t> strides(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    strides[k] = std::size_t{1} << targets[k];
    target_mask |= strides[k];
  }
  const std::size_t total = std::size_t{1} << qubits;
  Eigen::VectorXcd sub(dim), mixed(dim);
  for (std::size_t base = 0; base < total; ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index b = 0; b < dim; ++b) {
      std::size_t index = base;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (b & (Eigen::Index(1) << k)) index |= strides[k];
      }
      sub(b) = state(static_cast<Eigen::Index>(index));
    }
    mixed.noalias() = op * sub;
    for (Eigen::Index b = 0; b < dim; ++b) {
      std::size_t index = base;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (b & (Eigen::Index(1) << k)) index |= strides[k];
      }
      state(static_cast<Eigen::Index>(index)) = mixed(b);
    }
  }
}

void apply_diagonal_phases(Eigen::VectorXcd& state, int qubits,
                           const std::vector<int>& targets,
                           const std::vector<double>& eigenvalues, double x) {
  std::vector<std::size_t> strides(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k)
    strides[k] = std::size_t{1} << targets[k];
  const std::size_t total = std::size_t{1} << qubits;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t b = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (i & strides[k]) b |= std::size_t{1} << k;
    }
    state(static_cast<Eigen::Index>(i)) *= std::polar(1.0, -eigenvalues[b] * x);
  }
}

Eigen::MatrixXcd hermitian_exponential(const Eigen::MatrixXcd& generator, double angle) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(generator);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("rotation: eigensolver failed on generator");
  Eigen::VectorXcd phases(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::polar(1.0, -solver.eigenvalues()(i) * angle);
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

void check_norm(const Eigen::VectorXcd& state) {
  if (std::abs(state.norm() - 1.0) > kNormTol)
    throw std::runtime_error("simulate_f: state norm drifted past tolerance");
}

}  // namespace

void validate_circuit(const CircuitSpec& circuit) {
  if (circuit.qubits < 1 || circuit.qubits > kMaxQubits)
    throw std::invalid_argument("CircuitSpec: qubit count must be in [1, 10]");
  if (circuit.data_dim < 1)
    throw std::invalid_argument("CircuitSpec: data dimension must be >= 1");
  for (const auto& gate : circuit.gates) {
    if (const auto* data = std::get_if<DataGate>(&gate)) {
      require_targets(circuit.qubits, data->targets, "DataGate");
      if (data->axis < 0 || data->axis >= circuit.data_dim)
        throw std::invalid_argument("DataGate: axis out of range");
      if (static_cast<Eigen::Index>(data->eigenvalues.size()) != subspace_dim(data->targets))
        throw std::invalid_argument("DataGate: eigenvalue list must cover the target basis");
      for (double v : data->eigenvalues) {
        if (!std::isfinite(v)) throw std::invalid_argument("DataGate: non-finite eigenvalue");
      }
    } else if (const auto* fixed = std::get_if<UnitaryGate>(&gate)) {
      require_targets(circuit.qubits, fixed->targets, "UnitaryGate");
      if (fixed->matrix.rows() != subspace_dim(fixed->targets))
        throw std::invalid_argument("UnitaryGate: matrix size does not match targets");
      if (!is_unitary(fixed->matrix))
        throw std::invalid_argument("UnitaryGate: matrix is not unitary");
    } else if (const auto* rot = std::get_if<RotationGate>(&gate)) {
      require_targets(circuit.qubits, rot->targets, "RotationGate");
      if (rot->generator.rows() != subspace_dim(rot->targets))
        throw std::invalid_argument("RotationGate: generator size does not match targets");
      if (!is_hermitian(rot->generator))
        throw std::invalid_argument("RotationGate: generator is not Hermitian");
      if (rot->theta_index < 0 || rot->theta_index >= circuit.theta.size())
        throw std::invalid_argument("RotationGate: theta slot out of range");
    }
  }
  require_targets(circuit.qubits, circuit.observable.targets, "Observable");
  if (circuit.observable.matrix.rows() != subspace_dim(circuit.observable.targets))
    throw std::invalid_argument("Observable: matrix size does not match targets");
  if (!is_hermitian(circuit.observable.matrix))
    throw std::invalid_argument("Observable: matrix is not Hermitian");
}

double simulate_f(const CircuitSpec& circuit, const Eigen::VectorXd& x) {
  validate_circuit(circuit);
  if (x.size() != circuit.data_dim)
    throw std::invalid_argument("simulate_f: data point dimension mismatch");

  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(Eigen::Index(1) << circuit.qubits);
  state(0) = 1.0;
  for (const auto& gate : circuit.gates) {
    if (const auto* data = std::get_if<DataGate>(&gate)) {
      apply_diagonal_phases(state, circuit.qubits, data->targets, data->eigenvalues,
                            x(data->axis));
    } else if (const auto* fixed = std::get_if<UnitaryGate>(&gate)) {
      apply_operator(state, circuit.qubits, fixed->targets, fixed->matrix);
    } else if (const auto* rot = std::get_if<RotationGate>(&gate)) {
      apply_operator(state, circuit.qubits, rot->targets,
                     hermitian_exponential(rot->generator, circuit.theta(rot->theta_index)));
    }
    check_norm(state);
  }

  Eigen::VectorXcd observed = state;
  apply_operator(observed, circuit.qubits, circuit.observable.targets,
                 circuit.observable.matrix);
  const Cx expectation = state.dot(observed);
  if (std::abs(expectation.imag()) > kImagTol)
    throw std::runtime_error("simulate_f: expectation has a non-real residue");
  return expectation.real();
}

FrequencyLattice induced_lattice(const CircuitSpec& circuit) {
  validate_circuit(circuit);
  std::vector<std::vector<std::vector<double>>> per_axis(
      static_cast<std::size_t>(circuit.data_dim));
  for (const auto& gate : circuit.gates) {
    if (const auto* data = std::get_if<DataGate>(&gate))
      per_axis[static_cast<std::size_t>(data->axis)].push_back(data->eigenvalues);
  }
  FrequencyLattice lattice;
  lattice.axes.reserve(per_axis.size());
  for (const auto& spectra : per_axis) {
    lattice.axes.push_back(spectra.empty() ? axis_integer(0) : axis_from_spectra(spectra));
  }
  return lattice;
}

FourierFit fourier_fit(const CircuitSpec& circuit, const FrequencyLattice& lattice,
                       std::size_t sample_count, std::uint64_t seed) {
  validate_circuit(circuit);
  if (lattice.dim() != circuit.data_dim)
    throw std::invalid_argument("fourier_fit: lattice dimension does not match circuit");
  const std::uint64_t card = lattice.size();
  if (card > kMaxFitLattice)
    throw std::runtime_error("fourier_fit: lattice too large for the fitting cap");
  if (sample_count == 0) sample_count = std::max<std::size_t>(4 * card, 64);
  if (sample_count < 2 * card)
    throw std::invalid_argument("fourier_fit: need at least 2 |lattice| samples");
  if (static_cast<double>(sample_count) * static_cast<double>(card) > kMaxFitEntries)
    throw std::runtime_error("fourier_fit: design matrix exceeds the memory cap");

  const int d = lattice.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 2.0 * M_PI);

  FourierFit fit;
  fit.indices.reserve(card);
  for_each_index(lattice, [&](const MultiIndex& idx) { fit.indices.push_back(idx); });

  const auto rows = static_cast<Eigen::Index>(sample_count);
  const auto cols = static_cast<Eigen::Index>(card);
  Eigen::MatrixXcd design(rows, cols);
  Eigen::VectorXcd values(rows);
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < d; ++j) x(j) = unit(rng);
    values(i) = simulate_f(circuit, x);
    for (Eigen::Index c = 0; c < cols; ++c) {
      double phase = 0.0;
      const MultiIndex& idx = fit.indices[static_cast<std::size_t>(c)];
      for (int j = 0; j < d; ++j) phase += lattice.axes[j].value_at(idx[j]) * x(j);
      design(i, c) = std::polar(1.0, phase);
    }
  }

  const Eigen::MatrixXcd normal = design.adjoint() * design;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> spectrum(normal);
  if (spectrum.info() != Eigen::Success)
    throw std::runtime_error("fourier_fit: eigensolver failed on the normal matrix");
  const double max_eig = spectrum.eigenvalues().maxCoeff();
  if (!(spectrum.eigenvalues().minCoeff() > 1e-10 * max_eig))
    throw std::runtime_error(
        "fourier_fit: rank-deficient design (frequencies too close for the sample budget)");

  fit.coefficients = solve_hpd_jittered(normal, design.adjoint() * values);
  fit.residual = std::sqrt((design * fit.coefficients - values).squaredNorm() /
                           static_cast<double>(rows));
  return fit;
}

Eigen::MatrixXcd pauli_matrix(char pauli) {
  Eigen::MatrixXcd m(2, 2);
  switch (pauli) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Cx(0, -1), Cx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_matrix: unknown Pauli label");
  }
  return m;
}

Eigen::MatrixXcd hadamard_matrix() {
  Eigen::MatrixXcd h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Eigen::MatrixXcd cnot_matrix() {
  // Basis order: bit 0 = control, bit 1 = target.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 1;  // |c=0,t=0>
  m(2, 2) = 1;  // |c=0,t=1>
  m(3, 1) = 1;  // |c=1,t=0> -> |c=1,t=1>
  m(1, 3) = 1;  // |c=1,t=1> -> |c=1,t=0>
  return m;
}

DataGate z_data_gate(int axis, int qubit, double scale) {
  return DataGate{axis, {qubit}, {scale, -scale}};
}

namespace {

nlohmann::json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd complex_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("circuit: matrix must be a non-empty array of rows");
  const auto n = j.size();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (j[i].size() != j[0].size())
      throw std::invalid_argument("circuit: ragged matrix rows");
    for (std::size_t c = 0; c < j[i].size(); ++c) {
      const auto& entry = j[i][c];
      if (!entry.is_array() || entry.size() != 2)
        throw std::invalid_argument("circuit: matrix entries must be [re, im] pairs");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          Cx(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

Eigen::MatrixXcd named_unitary(const std::string& name) {
  if (name == "h") return hadamard_matrix();
  if (name == "cx") return cnot_matrix();
  if (name == "x" || name == "y" || name == "z")
    return pauli_matrix(static_cast<char>(std::toupper(name[0])));
  throw std::invalid_argument("circuit: unknown named unitary '" + name + "'");
}

std::vector<int> targets_from_json(const nlohmann::json& gate) {
  if (gate.contains("targets")) return gate.at("targets").get<std::vector<int>>();
  if (gate.contains("target")) return {gate.at("target").get<int>()};
  throw std::invalid_argument("circuit: gate needs targets");
}

}  // namespace

nlohmann::json circuit_to_json(const CircuitSpec& circuit) {
  nlohmann::json j;
  j["qubits"] = circuit.qubits;
  j["data_dim"] = circuit.data_dim;
  j["theta"] = std::vector<double>(circuit.theta.begin(), circuit.theta.end());
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& gate : circuit.gates) {
    if (const auto* data = std::get_if<DataGate>(&gate)) {
      gates.push_back({{"type", "data"},
                       {"axis", data->axis + 1},  // 1-based in JSON, matching x_1..x_d
                       {"targets", data->targets},
                       {"eigenvalues", data->eigenvalues}});
    } else if (const auto* fixed = std::get_if<UnitaryGate>(&gate)) {
      gates.push_back({{"type", "unitary"},
                       {"targets", fixed->targets},
                       {"matrix", complex_matrix_to_json(fixed->matrix)}});
    } else if (const auto* rot = std::get_if<RotationGate>(&gate)) {
      gates.push_back({{"type", "rotation"},
                       {"targets", rot->targets},
                       {"generator_matrix", complex_matrix_to_json(rot->generator)},
                       {"theta_index", rot->theta_index}});
    }
  }
  j["gates"] = std::move(gates);
  j["observable"] = {{"type", "matrix"},
                     {"targets", circuit.observable.targets},
                     {"matrix", complex_matrix_to_json(circuit.observable.matrix)}};
  return j;
}

CircuitSpec circuit_from_json(const nlohmann::json& j) {
  CircuitSpec circuit;
  circuit.qubits = j.at("qubits").get<int>();
  circuit.data_dim = j.at("data_dim").get<int>();
  if (j.contains("theta")) {
    const auto theta = j.at("theta").get<std::vector<double>>();
    circuit.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                      static_cast<Eigen::Index>(theta.size()));
  }
  for (const auto& gate : j.at("gates")) {
    const auto type = gate.at("type").get<std::string>();
    if (type == "data") {
      DataGate data;
      data.axis = gate.at("axis").get<int>() - 1;  // JSON axes are 1-based
      data.targets = targets_from_json(gate);
      if (gate.contains("eigenvalues")) {
        data.eigenvalues = gate.at("eigenvalues").get<std::vector<double>>();
      } else if (gate.contains("generator")) {
        const auto name = gate.at("generator").get<std::string>();
        if (name != "z") throw std::invalid_argument("circuit: named data generator must be z");
        const double scale = gate.value("scale", 0.5);
        if (data.targets.size() != 1)
          throw std::invalid_argument("circuit: named data generator takes one target");
        data.eigenvalues = {scale, -scale};
      } else {
        throw std::invalid_argument("circuit: data gate needs eigenvalues or generator");
      }
      circuit.gates.emplace_back(std::move(data));
    } else if (type == "unitary") {
      UnitaryGate fixed;
      fixed.targets = targets_from_json(gate);
      fixed.matrix = gate.contains("name")
                         ? named_unitary(gate.at("name").get<std::string>())
                         : complex_matrix_from_json(gate.at("matrix"));
      circuit.gates.emplace_back(std::move(fixed));
    } else if (type == "rotation") {
      RotationGate rot;
      rot.targets = targets_from_json(gate);
      rot.theta_index = gate.at("theta_index").get<int>();
      if (gate.contains("generator")) {
        const auto name = gate.at("generator").get<std::string>();
        if (name.size() != 1)
          throw std::invalid_argument("circuit: rotation generator must be x, y or z");
        const double scale = gate.value("scale", 0.5);
        rot.generator = scale * pauli_matrix(static_cast<char>(std::toupper(name[0])));
      } else {
        rot.generator = complex_matrix_from_json(gate.at("generator_matrix"));
      }
      circuit.gates.emplace_back(std::move(rot));
    } else {
      throw std::invalid_argument("circuit: unknown gate type '" + type + "'");
    }
  }
  const auto& obs = j.at("observable");
  const auto obs_type = obs.value("type", std::string("matrix"));
  if (obs_type == "matrix") {
    circuit.observable.targets = obs.at("targets").get<std::vector<int>>();
    circuit.observable.matrix = complex_matrix_from_json(obs.at("matrix"));
  } else if (obs_type == "pauli") {
    // Pauli product on a qubit subset; first listed qubit is the least
    // significant bit of the observable's sub-basis.
    std::vector<int> targets;
    Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& term : obs.at("paulis")) {
      targets.push_back(term.at("qubit").get<int>());
      const auto label = term.at("pauli").get<std::string>();
      if (label.size() != 1)
        throw std::invalid_argument("circuit: pauli label must be a single letter");
      Eigen::MatrixXcd p = pauli_matrix(static_cast<char>(std::toupper(label[0])));
      Eigen::MatrixXcd grown(matrix.rows() * 2, matrix.cols() * 2);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b)
          grown.block(a * matrix.rows(), b * matrix.cols(), matrix.rows(), matrix.cols()) =
              p(a, b) * matrix;
      }
      matrix = std::move(grown);
    }
    circuit.observable.targets = std::move(targets);
    circuit.observable.matrix = std::move(matrix);
  } else {
    throw std::invalid_argument("circuit: unknown observable type '" + obs_type + "'");
  }
  validate_circuit(circuit);
  return circuit;
}

}  // namespace mpsk
