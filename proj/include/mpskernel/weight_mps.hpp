#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "mpskernel/lattice.hpp"

namespace mpsk {

/// A weighting of a full frequency lattice as a matrix product state.
/// tensors[j][s] is the (leftBond x rightBond) matrix slice of site j at
/// physical position s; physical positions map to signed offsets via
/// k = s - M_j. Boundary bonds are 1. Immutable by convention: every
/// operation returns a new chain.
struct WeightMPS {
  std::vector<std::vector<Eigen::MatrixXd>> tensors;
  bool symmetric = false;
  std::optional<std::uint64_t> seed;

  int sites() const { return static_cast<int>(tensors.size()); }
  int physical_dim(int site) const { return static_cast<int>(tensors[site].size()); }
  int max_offset(int site) const { return (physical_dim(site) - 1) / 2; }
  int left_bond(int site) const { return static_cast<int>(tensors[site][0].rows()); }
  int right_bond(int site) const { return static_cast<int>(tensors[site][0].cols()); }
  int max_bond() const;
};

/// Throws unless the chain is structurally valid (consistent bonds,
/// boundary bonds 1, odd physical dimensions).
void validate_mps(const WeightMPS& mps);

/// Throws unless the chain's physical dimensions match the lattice axes.
void check_compatible(const WeightMPS& mps, const FrequencyLattice& lattice);

// Constructors.
WeightMPS uniform_mps(const FrequencyLattice& lattice);
WeightMPS product_weights(const FrequencyLattice& lattice,
                          const std::vector<std::vector<double>>& axis_weights);
WeightMPS random_mps(const FrequencyLattice& lattice, int bond, std::uint64_t seed);

/// The correction chain that is 1 at every nonzero index and sqrt(2) at the
/// all-zero index; bond dimension 2 (1 when d = 1).
WeightMPS c_tensor_mps(const FrequencyLattice& lattice);

/// Chain product selecting the physical slice idx[j] + M_j at each site.
double eval_weight(const WeightMPS& mps, const MultiIndex& idx);

/// Mirror average: out[idx] = (in[idx] + in[-idx]) / 2. At most doubles the
/// bond dimension; symmetric inputs keep their values.
WeightMPS symmetrize(const WeightMPS& mps);

/// Elementwise product of two weightings over the same lattice shape; bond
/// dimensions multiply.
WeightMPS hadamard(const WeightMPS& a, const WeightMPS& b);

/// Sum of squared weights over the full lattice, computed by contracting
/// the doubled chain in O(d D^3 P) -- never by enumeration.
double squared_sum(const WeightMPS& mps);

/// Exact i.i.d. samples from p(idx) proportional to eval_weight(idx)^2,
/// drawn by sequential conditional sampling against precomputed right
/// environments. Throws on an (effectively) all-zero weighting.
std::vector<MultiIndex> sample_indices(const WeightMPS& mps, std::mt19937_64& rng,
                                       std::size_t count);

// JSON serialization: explicit shapes plus row-major flattened entries.
nlohmann::json mps_to_json(const WeightMPS& mps);
WeightMPS mps_from_json(const nlohmann::json& j);

}  // namespace mpsk
