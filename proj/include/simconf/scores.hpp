#pragma once

// Non-conformity scores built from pluggable model outputs (densities,
// conditional CDF values, class-probability vectors) plus the
// training/calibration split and the sorted calibration score set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <span>
#include <vector>

#include "simconf/error.hpp"
#include "simconf/numerics.hpp"
#include "simconf/rng.hpp"

namespace simconf {

struct DataSplit {
  std::size_t n = 0;
  std::vector<std::size_t> train_idx;  // sorted
  std::vector<std::size_t> cal_idx;    // sorted
  std::uint64_t seed = 0;
};

/// Random split of [0, n) into training and calibration parts with
/// round(n * cal_fraction) calibration indices. Deterministic in the seed.
inline DataSplit split_data(std::size_t n, double cal_fraction, std::uint64_t seed) {
  if (n < 2) throw DomainError("split_data: need n >= 2");
  if (!(cal_fraction > 0.0 && cal_fraction < 1.0)) {
    throw DomainError("split_data: cal_fraction must lie in (0,1)");
  }
  const auto n_cal = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cal_fraction));
  if (n_cal == 0 || n_cal == n) throw DomainError("split_data: a part would be empty");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto eng = make_engine(seed, 0, Stream::kSplit);
  // Explicit Fisher-Yates: std::shuffle's draw pattern is implementation-defined.
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(eng() % (i + 1));
    std::swap(perm[i], perm[j]);
  }
  DataSplit out;
  out.n = n;
  out.seed = seed;
  out.cal_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_cal));
  out.train_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_cal), perm.end());
  std::sort(out.cal_idx.begin(), out.cal_idx.end());
  std::sort(out.train_idx.begin(), out.train_idx.end());
  return out;
}

/// Calibration scores with their order statistics. Immutable.
class ScoreSet {
 public:
  explicit ScoreSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("ScoreSet: need at least one score");
    for (double v : values_) {
      if (std::isnan(v)) throw DomainError("ScoreSet: NaN score");
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
    has_ties_ = std::adjacent_find(sorted_.begin(), sorted_.end()) != sorted_.end();
  }

  [[nodiscard]] std::size_t m() const noexcept { return sorted_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const double> sorted() const noexcept { return sorted_; }
  [[nodiscard]] bool has_ties() const noexcept { return has_ties_; }

  /// S'_j for 1 <= j <= m.
  [[nodiscard]] double order_stat(std::size_t j) const { return sorted_.at(j - 1); }

  /// Number of scores <= t.
  [[nodiscard]] std::size_t count_le(double t) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) -
                                    sorted_.begin());
  }

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  bool has_ties_ = false;
};

/// Estimated class-probability vector pi(. | x); C >= 2 entries summing to 1.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw DomainError("ProbVector: need at least two classes");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("ProbVector: entry outside [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "ProbVector: entries sum to " << total << ", expected 1";
      throw DomainError(os.str());
    }
    order_.resize(probs_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    // Descending probability; ties broken by ascending label.
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return probs_[a] > probs_[b]; });
    top_sum_.resize(probs_.size() + 1, 0.0);
    for (std::size_t c = 0; c < order_.size(); ++c) top_sum_[c + 1] = top_sum_[c] + probs_[order_[c]];
    top_sum_.back() = 1.0;
  }

  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t label) const { return probs_.at(label); }
  /// Labels by descending probability.
  [[nodiscard]] std::span<const std::size_t> ranking() const noexcept { return order_; }
  /// Sum of the c largest probabilities, c in [0, C]; the full sum is exactly 1.
  [[nodiscard]] double top_sum(std::size_t c) const { return top_sum_.at(c); }

 private:
  std::vector<double> probs_;
  std::vector<std::size_t> order_;
  std::vector<double> top_sum_;
};

/// Inverse-density score 1/p; +inf when p = 0.
inline double density_score(double density_value) {
  if (!(density_value >= 0.0)) throw DomainError("density_score: density must be >= 0");
  if (density_value == 0.0) return kInf;
  return 1.0 / density_value;
}

/// Distributional conformal score |H(y|x) - 1/2|; {s <= t} is the
/// conditional-CDF band 1/2 - t <= H <= 1/2 + t.
inline double dcp_score(double h_value) {
  detail::require_unit(h_value, "dcp_score: h_value");
  return std::abs(h_value - 0.5);
}

/// Smallest c in {1..C} whose c largest probabilities sum to at least tau.
inline std::size_t aps_quantile_L(const ProbVector& pi, double tau) {
  detail::require_unit(tau, "aps_quantile_L: tau");
  for (std::size_t c = 1; c < pi.size(); ++c) {
    if (pi.top_sum(c) >= tau) return c;
  }
  return pi.size();
}

/// Randomized adaptive prediction set S(u; pi, tau) as 0-based labels in
/// descending-probability order. Empty when L = 1 and u < V.
inline std::vector<std::size_t> aps_set(const ProbVector& pi, double u, double tau) {
  detail::require_unit(u, "aps_set: u");
  const std::size_t L = aps_quantile_L(pi, tau);
  const double p_L = pi[pi.ranking()[L - 1]];
  const double v = (pi.top_sum(L) - tau) / p_L;
  const std::size_t keep = (u < v) ? L - 1 : L;
  const auto r = pi.ranking();
  return {r.begin(), r.begin() + static_cast<std::ptrdiff_t>(keep)};
}

/// APS score E = inf { tau : y in S(u; pi, tau) } = T_r - u * pi_y, where r
/// is the rank of y and T_r the sum of the r largest probabilities.
///
/// y is in aps_set(pi, u, t) exactly when t >= E, up to the boundary
/// u = 1 where E = T_{r-1}.
inline double aps_score(const ProbVector& pi, std::size_t y, double u) {
  detail::require_unit(u, "aps_score: u");
  if (y >= pi.size()) throw DomainError("aps_score: label out of range");
  const auto r = pi.ranking();
  const auto rank = static_cast<std::size_t>(std::find(r.begin(), r.end(), y) - r.begin()) + 1;
  return std::clamp(pi.top_sum(rank) - u * pi[y], 0.0, 1.0);
}

}  // namespace simconf
