#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

namespace mpsk {

/// One axis of a frequency lattice: 2M+1 strictly increasing frequencies,
/// mirror-symmetric around an exact zero at the center position. Positions
/// are addressed everywhere by signed offsets k in [-M, M].
struct FrequencyAxis {
  std::vector<double> values;

  int max_offset() const { return (static_cast<int>(values.size()) - 1) / 2; }
  int size() const { return static_cast<int>(values.size()); }
  double value_at(int k) const;  // throws std::out_of_range
};

/// Integer axis (-M, ..., M).
FrequencyAxis axis_integer(int m);

/// Axis generated by a sequence of encoding gates, each described by the
/// eigenvalue list of its generator: all sums over gates of pairwise
/// eigenvalue differences (a Minkowski sum of per-gate difference sets).
/// Computed frequencies closer than merge_tol are merged; the result is
/// rebuilt from its positive half so the mirror symmetry and the zero
/// entry are exact.
FrequencyAxis axis_from_spectra(const std::vector<std::vector<double>>& eigenvalue_lists,
                                double merge_tol = 1e-12);

using MultiIndex = std::vector<int>;

MultiIndex negated(const MultiIndex& idx);

struct FrequencyLattice {
  std::vector<FrequencyAxis> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  int max_offset(int axis) const { return axes[axis].max_offset(); }
  int physical_dim(int axis) const { return axes[axis].size(); }

  /// Number of lattice points; saturates at uint64 max when the product
  /// overflows.
  std::uint64_t size() const;

  bool in_bounds(const MultiIndex& idx) const;
  void require_in_bounds(const MultiIndex& idx) const;
};

/// Frequency vector addressed by a multi-index of signed offsets.
std::vector<double> frequency_of(const FrequencyLattice& lattice, const MultiIndex& idx);

/// Splitting rule for mirror pairs: an index represents its pair iff it is
/// all-zero or its first nonzero component is positive. Exactly one of
/// {idx, -idx} satisfies this for nonzero idx.
bool is_positive_rep(const MultiIndex& idx);

/// Enumerates the full lattice in odometer order (last axis fastest),
/// reusing a single index buffer. Exponential in the dimension; intended
/// for desk-scale oracles and tests only.
template <typename Fn>
void for_each_index(const FrequencyLattice& lattice, Fn&& fn) {
  const int d = lattice.dim();
  MultiIndex idx(d);
  if (d == 0) {
    fn(static_cast<const MultiIndex&>(idx));
    return;
  }
  for (int j = 0; j < d; ++j) idx[j] = -lattice.max_offset(j);
  for (;;) {
    fn(static_cast<const MultiIndex&>(idx));
    int j = d - 1;
    while (j >= 0 && idx[j] == lattice.max_offset(j)) {
      idx[j] = -lattice.max_offset(j);
      --j;
    }
    if (j < 0) return;
    ++idx[j];
  }
}

/// All positive representatives, (|lattice|+1)/2 of them. Exponential cost.
std::vector<MultiIndex> half_lattice(const FrequencyLattice& lattice);

/// Position of idx in the odometer enumeration order used by
/// for_each_index and the dense oracles.
std::size_t lattice_linear_index(const FrequencyLattice& lattice, const MultiIndex& idx);

// Encoding strategies, the serializable description of how a lattice is
// built: per axis either {"integer_M": m} or {"spectra": [[...], ...]}.
struct AxisSpec {
  std::optional<int> integer_M;
  std::optional<std::vector<std::vector<double>>> spectra;
};
using EncodingStrategy = std::vector<AxisSpec>;

EncodingStrategy encoding_from_json(const nlohmann::json& j);
nlohmann::json encoding_to_json(const EncodingStrategy& strategy);
FrequencyLattice build_lattice(const EncodingStrategy& strategy);

}  // namespace mpsk
