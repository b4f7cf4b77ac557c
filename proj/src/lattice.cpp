#include "mpskernel/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpsk {

namespace {

// Sorts and merges entries closer than tol, keeping the first of each cluster.
void sort_and_merge(std::vector<double>& v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  v = std::move(out);
}

}  // namespace

double FrequencyAxis::value_at(int k) const {
  const int m = max_offset();
  if (k < -m || k > m) throw std::out_of_range("FrequencyAxis::value_at: offset out of range");
  return values[static_cast<std::size_t>(m + k)];
}

FrequencyAxis axis_integer(int m) {
  if (m < 0) throw std::invalid_argument("axis_integer: M must be nonnegative");
  FrequencyAxis axis;
  axis.values.reserve(static_cast<std::size_t>(2 * m + 1));
  for (int k = -m; k <= m; ++k) axis.values.push_back(static_cast<double>(k));
  return axis;
}

FrequencyAxis axis_from_spectra(const std::vector<std::vector<double>>& eigenvalue_lists,
                                double merge_tol) {
  if (eigenvalue_lists.empty())
    throw std::invalid_argument("axis_from_spectra: no spectra given");

  std::vector<double> sums{0.0};
  for (const auto& spectrum : eigenvalue_lists) {
    if (spectrum.empty())
      throw std::invalid_argument("axis_from_spectra: empty spectrum");
    for (double v : spectrum) {
      if (!std::isfinite(v))
        throw std::invalid_argument("axis_from_spectra: non-finite eigenvalue");
    }
    std::vector<double> diffs;
    diffs.reserve(spectrum.size() * spectrum.size());
    for (double a : spectrum) {
      for (double b : spectrum) diffs.push_back(a - b);
    }
    sort_and_merge(diffs, merge_tol);

    std::vector<double> next;
    next.reserve(sums.size() * diffs.size());
    for (double s : sums) {
      for (double d : diffs) next.push_back(s + d);
    }
    sort_and_merge(next, merge_tol);
    sums = std::move(next);
  }

  // Rebuild from the positive half so 0 and the mirror pairs are exact.
  std::vector<double> positive;
  for (double s : sums) {
    if (s > merge_tol) positive.push_back(s);
  }
  FrequencyAxis axis;
  axis.values.reserve(2 * positive.size() + 1);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) axis.values.push_back(-*it);
  axis.values.push_back(0.0);
  for (double p : positive) axis.values.push_back(p);
  return axis;
}

MultiIndex negated(const MultiIndex& idx) {
  MultiIndex out(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out[j] = -idx[j];
  return out;
}

std::uint64_t FrequencyLattice::size() const {
  std::uint64_t total = 1;
  for (const auto& axis : axes) {
    const auto p = static_cast<std::uint64_t>(axis.size());
    if (total > std::numeric_limits<std::uint64_t>::max() / p)
      return std::numeric_limits<std::uint64_t>::max();
    total *= p;
  }
  return total;
}

bool FrequencyLattice::in_bounds(const MultiIndex& idx) const {
  if (static_cast<int>(idx.size()) != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (idx[j] < -max_offset(j) || idx[j] > max_offset(j)) return false;
  }
  return true;
}

void FrequencyLattice::require_in_bounds(const MultiIndex& idx) const {
  if (!in_bounds(idx))
    throw std::out_of_range("FrequencyLattice: multi-index out of bounds");
}

std::vector<double> frequency_of(const FrequencyLattice& lattice, const MultiIndex& idx) {
  lattice.require_in_bounds(idx);
  std::vector<double> freq(idx.size());
  for (int j = 0; j < lattice.dim(); ++j) freq[j] = lattice.axes[j].value_at(idx[j]);
  return freq;
}

bool is_positive_rep(const MultiIndex& idx) {
  for (int v : idx) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return true;  // all-zero index
}

std::vector<MultiIndex> half_lattice(const FrequencyLattice& lattice) {
  std::vector<MultiIndex> out;
  for_each_index(lattice, [&](const MultiIndex& idx) {
    if (is_positive_rep(idx)) out.push_back(idx);
  });
  return out;
}

std::size_t lattice_linear_index(const FrequencyLattice& lattice, const MultiIndex& idx) {
  lattice.require_in_bounds(idx);
  std::size_t li = 0;
  for (int j = 0; j < lattice.dim(); ++j) {
    li = li * static_cast<std::size_t>(lattice.physical_dim(j)) +
         static_cast<std::size_t>(idx[j] + lattice.max_offset(j));
  }
  return li;
}

EncodingStrategy encoding_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("encoding: expected a non-empty array of axis specs");
  EncodingStrategy out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_object())
      throw std::invalid_argument("encoding: axis spec must be an object");
    AxisSpec spec;
    if (item.contains("integer_M")) spec.integer_M = item.at("integer_M").get<int>();
    if (item.contains("spectra"))
      spec.spectra = item.at("spectra").get<std::vector<std::vector<double>>>();
    if (spec.integer_M.has_value() == spec.spectra.has_value())
      throw std::invalid_argument(
          "encoding: axis spec needs exactly one of integer_M or spectra");
    if (spec.integer_M && *spec.integer_M < 0)
      throw std::invalid_argument("encoding: integer_M must be nonnegative");
    out.push_back(std::move(spec));
  }
  return out;
}

nlohmann::json encoding_to_json(const EncodingStrategy& strategy) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& spec : strategy) {
    nlohmann::json item;
    if (spec.integer_M) {
      item["integer_M"] = *spec.integer_M;
    } else {
      item["spectra"] = *spec.spectra;
    }
    j.push_back(std::move(item));
  }
  return j;
}

FrequencyLattice build_lattice(const EncodingStrategy& strategy) {
  if (strategy.empty()) throw std::invalid_argument("build_lattice: empty strategy");
  FrequencyLattice lattice;
  lattice.axes.reserve(strategy.size());
  for (const auto& spec : strategy) {
    if (spec.integer_M) {
      lattice.axes.push_back(axis_integer(*spec.integer_M));
    } else {
      lattice.axes.push_back(axis_from_spectra(*spec.spectra));
    }
  }
  return lattice;
}

}  // namespace mpsk
