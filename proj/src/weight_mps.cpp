#include "mpskernel/weight_mps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace mpsk {

namespace {

constexpr double kZeroNormTol = 1e-300;

std::vector<Eigen::MatrixXd> flipped_site(const std::vector<Eigen::MatrixXd>& slices) {
  std::vector<Eigen::MatrixXd> out(slices.rbegin(), slices.rend());
  return out;
}

}  // namespace

int WeightMPS::max_bond() const {
  int bond = 1;
  for (int j = 0; j < sites(); ++j) bond = std::max({bond, left_bond(j), right_bond(j)});
  return bond;
}

void validate_mps(const WeightMPS& mps) {
  if (mps.tensors.empty()) throw std::invalid_argument("WeightMPS: empty chain");
  for (int j = 0; j < mps.sites(); ++j) {
    const auto& site = mps.tensors[j];
    if (site.empty()) throw std::invalid_argument("WeightMPS: site with no physical slices");
    if (site.size() % 2 == 0)
      throw std::invalid_argument("WeightMPS: physical dimension must be odd");
    for (const auto& slice : site) {
      if (slice.rows() != site[0].rows() || slice.cols() != site[0].cols())
        throw std::invalid_argument("WeightMPS: inconsistent slice shapes within a site");
    }
  }
  if (mps.left_bond(0) != 1 || mps.right_bond(mps.sites() - 1) != 1)
    throw std::invalid_argument("WeightMPS: boundary bonds must be 1");
  for (int j = 0; j + 1 < mps.sites(); ++j) {
    if (mps.right_bond(j) != mps.left_bond(j + 1))
      throw std::invalid_argument("WeightMPS: bond dimensions do not chain");
  }
}

void check_compatible(const WeightMPS& mps, const FrequencyLattice& lattice) {
  if (mps.sites() != lattice.dim())
    throw std::invalid_argument("WeightMPS: site count does not match lattice dimension");
  for (int j = 0; j < mps.sites(); ++j) {
    if (mps.physical_dim(j) != lattice.physical_dim(j))
      throw std::invalid_argument("WeightMPS: physical dimension does not match lattice axis");
  }
}

WeightMPS uniform_mps(const FrequencyLattice& lattice) {
  WeightMPS mps;
  mps.tensors.reserve(lattice.dim());
  for (int j = 0; j < lattice.dim(); ++j) {
    mps.tensors.emplace_back(lattice.physical_dim(j), Eigen::MatrixXd::Ones(1, 1));
  }
  mps.symmetric = true;
  return mps;
}

WeightMPS product_weights(const FrequencyLattice& lattice,
                          const std::vector<std::vector<double>>& axis_weights) {
  if (static_cast<int>(axis_weights.size()) != lattice.dim())
    throw std::invalid_argument("product_weights: one weight vector per axis required");
  WeightMPS mps;
  mps.tensors.reserve(lattice.dim());
  bool mirror = true;
  for (int j = 0; j < lattice.dim(); ++j) {
    const auto& v = axis_weights[j];
    const int p = lattice.physical_dim(j);
    if (static_cast<int>(v.size()) != p)
      throw std::invalid_argument("product_weights: weight vector length must be 2M+1");
    std::vector<Eigen::MatrixXd> site;
    site.reserve(v.size());
    for (double w : v) site.push_back(Eigen::MatrixXd::Constant(1, 1, w));
    mps.tensors.push_back(std::move(site));
    for (int s = 0; s < p; ++s) {
      if (v[s] != v[p - 1 - s]) mirror = false;
    }
  }
  mps.symmetric = mirror;
  return mps;
}

WeightMPS random_mps(const FrequencyLattice& lattice, int bond, std::uint64_t seed) {
  if (bond < 1) throw std::invalid_argument("random_mps: bond dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = lattice.dim();
  WeightMPS mps;
  mps.tensors.reserve(d);
  for (int j = 0; j < d; ++j) {
    const int left = (j == 0) ? 1 : bond;
    const int right = (j == d - 1) ? 1 : bond;
    std::vector<Eigen::MatrixXd> site;
    site.reserve(lattice.physical_dim(j));
    for (int s = 0; s < lattice.physical_dim(j); ++s) {
      Eigen::MatrixXd slice(left, right);
      for (int r = 0; r < left; ++r) {
        for (int c = 0; c < right; ++c) slice(r, c) = normal(rng);
      }
      site.push_back(std::move(slice));
    }
    mps.tensors.push_back(std::move(site));
  }
  mps.symmetric = false;
  mps.seed = seed;
  return mps;
}

WeightMPS c_tensor_mps(const FrequencyLattice& lattice) {
  const int d = lattice.dim();
  const double bump = std::sqrt(2.0) - 1.0;
  WeightMPS mps;
  mps.tensors.reserve(d);
  if (d == 1) {
    std::vector<Eigen::MatrixXd> site;
    const int m = lattice.max_offset(0);
    for (int s = 0; s < lattice.physical_dim(0); ++s)
      site.push_back(Eigen::MatrixXd::Constant(1, 1, s == m ? std::sqrt(2.0) : 1.0));
    mps.tensors.push_back(std::move(site));
    mps.symmetric = true;
    return mps;
  }
  // All-ones chain plus a (sqrt(2)-1)-weighted indicator of the all-zero
  // index, summed as two bond-1 branches: bond dimension exactly 2.
  for (int j = 0; j < d; ++j) {
    const int m = lattice.max_offset(j);
    std::vector<Eigen::MatrixXd> site;
    for (int s = 0; s < lattice.physical_dim(j); ++s) {
      const double zero_branch = (s == m) ? 1.0 : 0.0;
      if (j == 0) {
        Eigen::MatrixXd slice(1, 2);
        slice << 1.0, bump * zero_branch;
        site.push_back(std::move(slice));
      } else if (j == d - 1) {
        Eigen::MatrixXd slice(2, 1);
        slice << 1.0, zero_branch;
        site.push_back(std::move(slice));
      } else {
        Eigen::MatrixXd slice = Eigen::MatrixXd::Zero(2, 2);
        slice(0, 0) = 1.0;
        slice(1, 1) = zero_branch;
        site.push_back(std::move(slice));
      }
    }
    mps.tensors.push_back(std::move(site));
  }
  mps.symmetric = true;
  return mps;
}

double eval_weight(const WeightMPS& mps, const MultiIndex& idx) {
  if (static_cast<int>(idx.size()) != mps.sites())
    throw std::invalid_argument("eval_weight: index length does not match chain");
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (int j = 0; j < mps.sites(); ++j) {
    const int m = mps.max_offset(j);
    if (idx[j] < -m || idx[j] > m)
      throw std::out_of_range("eval_weight: multi-index out of bounds");
    v = v * mps.tensors[j][static_cast<std::size_t>(idx[j] + m)];
  }
  return v(0);
}

WeightMPS symmetrize(const WeightMPS& mps) {
  validate_mps(mps);
  const int d = mps.sites();
  WeightMPS out;
  out.tensors.reserve(d);
  if (d == 1) {
    const auto& site = mps.tensors[0];
    const auto flipped = flipped_site(site);
    std::vector<Eigen::MatrixXd> avg;
    avg.reserve(site.size());
    for (std::size_t s = 0; s < site.size(); ++s)
      avg.push_back(0.5 * (site[s] + flipped[s]));
    out.tensors.push_back(std::move(avg));
    out.symmetric = true;
    return out;
  }
  for (int j = 0; j < d; ++j) {
    const auto& site = mps.tensors[j];
    const auto flipped = flipped_site(site);
    const auto l = site[0].rows();
    const auto r = site[0].cols();
    std::vector<Eigen::MatrixXd> joined;
    joined.reserve(site.size());
    for (std::size_t s = 0; s < site.size(); ++s) {
      if (j == 0) {
        Eigen::MatrixXd slice(1, 2 * r);
        slice << 0.5 * site[s], 0.5 * flipped[s];
        joined.push_back(std::move(slice));
      } else if (j == d - 1) {
        Eigen::MatrixXd slice(2 * l, 1);
        slice << site[s], flipped[s];
        joined.push_back(std::move(slice));
      } else {
        Eigen::MatrixXd slice = Eigen::MatrixXd::Zero(2 * l, 2 * r);
        slice.topLeftCorner(l, r) = site[s];
        slice.bottomRightCorner(l, r) = flipped[s];
        joined.push_back(std::move(slice));
      }
    }
    out.tensors.push_back(std::move(joined));
  }
  out.symmetric = true;
  return out;
}

WeightMPS hadamard(const WeightMPS& a, const WeightMPS& b) {
  if (a.sites() != b.sites())
    throw std::invalid_argument("hadamard: chains have different lengths");
  WeightMPS out;
  out.tensors.reserve(a.sites());
  for (int j = 0; j < a.sites(); ++j) {
    if (a.physical_dim(j) != b.physical_dim(j))
      throw std::invalid_argument("hadamard: physical dimensions do not match");
    std::vector<Eigen::MatrixXd> site;
    site.reserve(a.tensors[j].size());
    for (std::size_t s = 0; s < a.tensors[j].size(); ++s)
      site.push_back(Eigen::kroneckerProduct(a.tensors[j][s], b.tensors[j][s]).eval());
    out.tensors.push_back(std::move(site));
  }
  out.symmetric = a.symmetric && b.symmetric;
  return out;
}

double squared_sum(const WeightMPS& mps) {
  Eigen::MatrixXd env = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < mps.sites(); ++j) {
    const int r = mps.right_bond(j);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(r, r);
    for (const auto& slice : mps.tensors[j])
      next.noalias() += slice.transpose() * env * slice;
    env = std::move(next);
  }
  return env(0, 0);
}

std::vector<MultiIndex> sample_indices(const WeightMPS& mps, std::mt19937_64& rng,
                                       std::size_t count) {
  const int d = mps.sites();

  // Right environments of the doubled chain, computed once per call.
  std::vector<Eigen::MatrixXd> right(static_cast<std::size_t>(d) + 1);
  right[d] = Eigen::MatrixXd::Ones(1, 1);
  for (int j = d - 1; j >= 0; --j) {
    const int l = mps.left_bond(j);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(l, l);
    for (const auto& slice : mps.tensors[j])
      acc.noalias() += slice * right[j + 1] * slice.transpose();
    right[j] = std::move(acc);
  }
  if (!(right[0](0, 0) > kZeroNormTol))
    throw std::runtime_error("sample_indices: all-zero weighting (zero normalizer)");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MultiIndex> samples;
  samples.reserve(count);
  std::vector<double> site_weights;
  std::vector<Eigen::RowVectorXd> fronts;
  for (std::size_t n = 0; n < count; ++n) {
    Eigen::RowVectorXd left = Eigen::RowVectorXd::Ones(1);
    MultiIndex idx(d);
    for (int j = 0; j < d; ++j) {
      const auto& site = mps.tensors[j];
      site_weights.assign(site.size(), 0.0);
      fronts.assign(site.size(), Eigen::RowVectorXd());
      double total = 0.0;
      for (std::size_t s = 0; s < site.size(); ++s) {
        fronts[s] = left * site[s];
        const double w = (fronts[s] * right[j + 1] * fronts[s].transpose())(0);
        site_weights[s] = std::max(0.0, w);
        total += site_weights[s];
      }
      if (!(total > 0.0))
        throw std::runtime_error("sample_indices: conditional weights vanished");
      const double u = unit(rng) * total;
      double cum = 0.0;
      std::size_t chosen = site.size() - 1;
      for (std::size_t s = 0; s < site.size(); ++s) {
        cum += site_weights[s];
        if (u < cum) {
          chosen = s;
          break;
        }
      }
      idx[j] = static_cast<int>(chosen) - mps.max_offset(j);
      left = fronts[chosen];
      const double scale = left.norm();
      if (scale > 0.0) left /= scale;  // conditionals are scale-invariant
    }
    samples.push_back(std::move(idx));
  }
  return samples;
}

nlohmann::json mps_to_json(const WeightMPS& mps) {
  nlohmann::json j;
  j["format"] = "mps-weighting";
  j["symmetric"] = mps.symmetric;
  if (mps.seed) j["seed"] = *mps.seed;
  nlohmann::json tensors = nlohmann::json::array();
  for (int site = 0; site < mps.sites(); ++site) {
    const int l = mps.left_bond(site);
    const int p = mps.physical_dim(site);
    const int r = mps.right_bond(site);
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(l) * p * r);
    for (int a = 0; a < l; ++a) {
      for (int s = 0; s < p; ++s) {
        for (int b = 0; b < r; ++b) data.push_back(mps.tensors[site][s](a, b));
      }
    }
    tensors.push_back({{"shape", {l, p, r}}, {"data", std::move(data)}});
  }
  j["tensors"] = std::move(tensors);
  return j;
}

WeightMPS mps_from_json(const nlohmann::json& j) {
  WeightMPS mps;
  mps.symmetric = j.value("symmetric", false);
  if (j.contains("seed")) mps.seed = j.at("seed").get<std::uint64_t>();
  const auto& tensors = j.at("tensors");
  if (!tensors.is_array() || tensors.empty())
    throw std::invalid_argument("mps_from_json: tensors must be a non-empty array");
  for (const auto& t : tensors) {
    const auto shape = t.at("shape").get<std::vector<int>>();
    if (shape.size() != 3 || shape[0] < 1 || shape[1] < 1 || shape[2] < 1)
      throw std::invalid_argument("mps_from_json: shape must be three positive extents");
    const auto data = t.at("data").get<std::vector<double>>();
    const int l = shape[0], p = shape[1], r = shape[2];
    if (data.size() != static_cast<std::size_t>(l) * p * r)
      throw std::invalid_argument("mps_from_json: data length does not match shape");
    std::vector<Eigen::MatrixXd> site(p, Eigen::MatrixXd(l, r));
    std::size_t pos = 0;
    for (int a = 0; a < l; ++a) {
      for (int s = 0; s < p; ++s) {
        for (int b = 0; b < r; ++b) site[s](a, b) = data[pos++];
      }
    }
    mps.tensors.push_back(std::move(site));
  }
  validate_mps(mps);
  return mps;
}

}  // namespace mpsk
