#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "mpskernel/lattice.hpp"
#include "mpskernel/weight_mps.hpp"

namespace mpsk {

/// Precomputed state for exact kernel evaluation: the weighted chain
/// b_mps = hadamard(c_tensor_mps, symmetrized weighting) and its squared
/// sum norm2 (twice the squared half-lattice norm of the weighting).
/// Immutable after construction; evaluations are pure.
struct KernelEngine {
  FrequencyLattice lattice;
  WeightMPS b_mps;
  double norm2 = 0.0;
};

/// Symmetrizes the weighting (skipped when already flagged symmetric),
/// builds the weighted chain and its normalizer. Throws on shape mismatch
/// or an effectively zero weighting (norm2 <= 1e-14).
KernelEngine new_engine(const FrequencyLattice& lattice, const WeightMPS& weights);

/// Per-axis feature column: entries exp(i w_k x) for offsets k = -M..M.
/// Entry at offset 0 is 1; entries at +-k are complex conjugates.
Eigen::VectorXcd local_features(const FrequencyAxis& axis, double x);

/// Exact kernel value by site-by-site contraction of the weighted chain
/// against the local features of x and x'; cost O(d D^3 P). The imaginary
/// residue of the contraction must stay within 1e-9 (it signals a
/// symmetry violation upstream) and is discarded.
double eval_kernel(const KernelEngine& engine, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x_prime);

/// Same value contracted in the entangled-tensor ordering: the doubled
/// chain is materialized as an operator core per site (bond pairs fused),
/// the local feature vectors are attached first, and the resulting bond
/// matrices are multiplied left to right.
double eval_kernel_etk(const KernelEngine& engine, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& x_prime);

/// Gram matrix with entry (i, j) = K(rows_a[i], rows_b[j]). Entries are
/// independent, so the result does not depend on the thread count.
Eigen::MatrixXd gram(const KernelEngine& engine, const Eigen::MatrixXd& rows_a,
                     const Eigen::MatrixXd& rows_b, int threads = 1);

inline constexpr std::uint64_t kDenseEnumerationCap = 1000000;

/// Explicit normalized feature vector over the full lattice (odometer
/// order, last axis fastest), built by enumeration. Desk-scale oracle.
Eigen::VectorXcd dense_feature_phi2(const FrequencyLattice& lattice, const WeightMPS& weights,
                                    const Eigen::VectorXd& x,
                                    std::uint64_t cap = kDenseEnumerationCap);

/// Brute-force kernel value: cosine sum over one representative per mirror
/// pair of the symmetrized weighting, normalized by the half-lattice norm.
double dense_kernel(const FrequencyLattice& lattice, const WeightMPS& weights,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                    std::uint64_t cap = kDenseEnumerationCap);

/// Variant with an explicit mirror-pair splitting rule; any predicate that
/// keeps the all-zero index and exactly one of {idx, -idx} is valid, and
/// for symmetric weightings the kernel value does not depend on it.
double dense_kernel(const FrequencyLattice& lattice, const WeightMPS& weights,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                    const std::function<bool(const MultiIndex&)>& splitting,
                    std::uint64_t cap = kDenseEnumerationCap);

}  // namespace mpsk
