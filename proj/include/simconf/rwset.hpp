#pragma once

// Rivera-Walther multiscale confidence set for the score distribution and
// its conversion to a pointwise CDF band.
//
// Variables L_i = F(S'_i), i = 1..n. Each interval (j, k) of the family
// yields l_kj <= L_k - L_j <= u_kj; together with 0 <= L_i <= 1 and
// L_i <= L_{i+1} this is a difference-constraint system whose per-coordinate
// extremes come from shortest paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "simconf/bands.hpp"
#include "simconf/difference_constraints.hpp"
#include "simconf/error.hpp"
#include "simconf/numerics.hpp"
#include "simconf/scores.hpp"

namespace simconf {

struct IntervalLevel {
  int l = 0;
  double m_l = 0.0;     // n 2^{-l}
  std::size_t d_l = 0;  // ceil(m_l / (6 sqrt(l)))
  std::size_t count = 0;
};

/// Index pairs (j, k), j < k, of order statistics spanning the intervals.
struct IntervalFamily {
  std::size_t n = 0;
  bool all_intervals = false;
  int l_max = 0;
  std::vector<IntervalLevel> levels;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> intervals;  // sorted, unique
};

/// floor(log2(n / ln n)).
inline int rw_l_max(std::size_t n) {
  if (n < 3) return 0;
  const auto nd = static_cast<double>(n);
  return static_cast<int>(std::floor(std::log2(nd / std::log(nd))));
}

/// Family over the index set D (increasing, within 1..n-1).
inline IntervalFamily build_family(std::size_t n, std::span<const std::size_t> d_set,
                                   bool all_intervals) {
  IntervalFamily fam;
  fam.n = n;
  fam.all_intervals = all_intervals;
  fam.l_max = rw_l_max(n);
  std::vector<char> in_d(n + 1, 0);
  for (std::size_t i : d_set) {
    if (i == 0 || i >= n) throw DomainError("build_family: index outside 1..n-1");
    in_d[i] = 1;
  }

  if (all_intervals) {
    for (std::size_t a = 0; a < d_set.size(); ++a) {
      for (std::size_t b = a + 1; b < d_set.size(); ++b) {
        fam.intervals.emplace_back(static_cast<std::uint32_t>(d_set[a]),
                                   static_cast<std::uint32_t>(d_set[b]));
      }
    }
  } else {
    if (fam.l_max < 2) {
      std::ostringstream os;
      os << "interval family empty: n = " << n << " gives l_max = " << fam.l_max << " < 2";
      throw DomainError(os.str());
    }
    const auto nd = static_cast<double>(n);
    for (int l = 2; l <= fam.l_max; ++l) {
      IntervalLevel lev;
      lev.l = l;
      lev.m_l = std::ldexp(nd, -l);
      lev.d_l = static_cast<std::size_t>(std::ceil(lev.m_l / (6.0 * std::sqrt(double(l)))));
      const std::size_t before = fam.intervals.size();
      for (std::size_t j = 1; j < n; j += lev.d_l) {
        if (!in_d[j]) continue;
        for (std::size_t k = j + lev.d_l; k < n; k += lev.d_l) {
          const auto gap = static_cast<double>(k - j);
          if (gap >= 2.0 * lev.m_l) break;
          if (gap > lev.m_l && in_d[k]) {
            fam.intervals.emplace_back(static_cast<std::uint32_t>(j),
                                       static_cast<std::uint32_t>(k));
          }
        }
      }
      lev.count = fam.intervals.size() - before;
      fam.levels.push_back(lev);  // levels may be empty under heavy ties
    }
  }
  std::sort(fam.intervals.begin(), fam.intervals.end());
  fam.intervals.erase(std::unique(fam.intervals.begin(), fam.intervals.end()),
                      fam.intervals.end());
  if (fam.intervals.empty()) throw DomainError("interval family empty");
  return fam;
}

/// Family for a sample without ties: D = {1..n-1}.
inline IntervalFamily build_family(std::size_t n, bool all_intervals) {
  if (n < 2) throw DomainError("build_family: need n >= 2");
  std::vector<std::size_t> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = i + 1;
  return build_family(n, d, all_intervals);
}

/// Family over D = {i : S'_i != S'_{i+1}}.
inline IntervalFamily build_family(const ScoreSet& scores, bool all_intervals) {
  const auto s = scores.sorted();
  std::vector<std::size_t> d;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] != s[i]) d.push_back(i);
  }
  return build_family(scores.m(), d, all_intervals);
}

/// Penalty c(t) = 2 log(e / (t (1 - t))), t in (0, 1).
inline double rw_penalty(double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("rw_penalty: t must lie in (0,1)");
  return 2.0 * (1.0 - std::log(t) - std::log1p(-t));
}

namespace detail {

// Per-count constants shared by all intervals with the same k - j.
struct RwCount {
  double fn, log_fn, log_1mfn, sqrt_pen;
};

inline std::vector<RwCount> rw_count_table(std::size_t n) {
  std::vector<RwCount> t(n + 1, RwCount{0.0, 0.0, 0.0, 0.0});
  const auto nd = static_cast<double>(n);
  for (std::size_t c = 1; c < n; ++c) {
    const double fn = static_cast<double>(c) / nd;
    t[c] = {fn, std::log(fn), std::log1p(-fn), std::sqrt(rw_penalty(fn))};
  }
  return t;
}

}  // namespace detail

/// Precomputed evaluator of the RW statistic for uniform samples of size n.
class RwStatistic {
 public:
  explicit RwStatistic(IntervalFamily family)
      : fam_(std::move(family)), counts_(detail::rw_count_table(fam_.n)) {}

  [[nodiscard]] const IntervalFamily& family() const noexcept { return fam_; }

  /// max over I of sqrt(2n K(F(I), F_n(I))) - sqrt(c(F_n(I))), with
  /// F(I) = U_(k) - U_(j) and F_n(I) = (k - j)/n.
  [[nodiscard]] double operator()(std::span<const double> sorted_u) const {
    if (sorted_u.size() != fam_.n) throw DomainError("rw_statistic: sample size mismatch");
    const double two_n = 2.0 * static_cast<double>(fam_.n);
    double best = -kInf;
    for (const auto& [j, k] : fam_.intervals) {
      const auto& c = counts_[k - j];
      const double f = sorted_u[k - 1] - sorted_u[j - 1];
      double kl;
      if (f <= 0.0) {
        kl = -c.log_1mfn;
      } else if (f >= 1.0) {
        kl = -c.log_fn;
      } else {
        kl = f * (std::log(f) - c.log_fn) + (1.0 - f) * (std::log1p(-f) - c.log_1mfn);
      }
      best = std::max(best, std::sqrt(two_n * std::max(kl, 0.0)) - c.sqrt_pen);
    }
    return best;
  }

 private:
  IntervalFamily fam_;
  std::vector<detail::RwCount> counts_;
};

inline double rw_statistic(std::span<const double> sorted_u, const IntervalFamily& family) {
  detail::require_sorted_open_unit(sorted_u);
  return RwStatistic(family)(sorted_u);
}

/// Per-interval bounds l_kj <= F(S'_k) - F(S'_j) <= u_kj, aligned with
/// family.intervals.
struct IntervalBounds {
  IntervalFamily family;
  double kappa = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// {h : K(h, b) <= thr} as [lo, hi], rounded outward. K(., b) is convex
/// with minimum 0 at b.
inline std::pair<double, double> kl_ball(double b, double thr) {
  if (thr <= 0.0) return {b, b};
  auto k = [b](double h) { return kl_bernoulli(h, b); };
  double lo = 0.0;
  if (k(0.0) > thr) {
    double a = 0.0;
    double c = b;
    while (c - a > kBisectionTol) {
      const double mid = 0.5 * (a + c);
      if (k(mid) <= thr) c = mid; else a = mid;
    }
    lo = a;
  }
  double hi = 1.0;
  if (k(1.0) > thr) {
    double a = b;
    double c = 1.0;
    while (c - a > kBisectionTol) {
      const double mid = 0.5 * (a + c);
      if (k(mid) <= thr) a = mid; else c = mid;
    }
    hi = c;
  }
  return {lo, hi};
}

/// Inverts sqrt(2n K(h, F_n(I))) - sqrt(c(F_n(I))) <= kappa for every interval.
inline IntervalBounds interval_bounds(const IntervalFamily& family, double kappa) {
  if (std::isnan(kappa)) throw DomainError("interval_bounds: kappa is NaN");
  IntervalBounds out;
  out.family = family;
  out.kappa = kappa;
  out.lower.reserve(family.intervals.size());
  out.upper.reserve(family.intervals.size());
  const auto nd = static_cast<double>(family.n);
  std::unordered_map<std::size_t, std::pair<double, double>> memo;
  for (const auto& [j, k] : family.intervals) {
    const std::size_t c = k - j;
    auto it = memo.find(c);
    if (it == memo.end()) {
      const double fn = static_cast<double>(c) / nd;
      const double r = std::max(kappa + std::sqrt(rw_penalty(fn)), 0.0);
      it = memo.emplace(c, kl_ball(fn, r * r / (2.0 * nd))).first;
    }
    out.lower.push_back(it->second.first);
    out.upper.push_back(it->second.second);
  }
  return out;
}

enum class BandSide { kLower, kUpper };

/// Difference-constraint system of the interval bounds plus monotonicity,
/// and equality of tied order statistics when `sorted` is given.
inline DifferenceSystem rw_constraint_system(const IntervalBounds& bounds,
                                             std::span<const double> sorted = {}) {
  const std::size_t n = bounds.family.n;
  DifferenceSystem sys(n);
  for (std::size_t i = 0; i < bounds.family.intervals.size(); ++i) {
    const auto [j, k] = bounds.family.intervals[i];
    sys.add_range(j, k, bounds.lower[i], bounds.upper[i]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    sys.add_upper(i + 1, i, 0.0);  // L_i <= L_{i+1}
    if (!sorted.empty() && sorted[i - 1] == sorted[i]) sys.add_upper(i, i + 1, 0.0);
  }
  return sys;
}

/// Tightest bounds on L_1..L_n (index 0 unused) for the requested side.
inline std::vector<double> pointwise_band_lp(const IntervalBounds& bounds, BandSide side,
                                             std::span<const double> sorted = {}) {
  const auto ranges = solve_ranges(rw_constraint_system(bounds, sorted));
  return side == BandSide::kLower ? ranges.lo : ranges.hi;
}

/// Band values on the ECDF index grid from the LP extremes: on
/// [S'_i, S'_{i+1}) F lies in [min L_i, max L_{i+1}].
inline BandProfile rw_profile(const IntervalBounds& bounds, std::span<const double> sorted = {}) {
  const std::size_t n = bounds.family.n;
  const auto ranges = solve_ranges(rw_constraint_system(bounds, sorted));
  BandProfile p{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 1.0)};
  for (std::size_t i = 1; i <= n; ++i) p.lower[i] = ranges.lo[i];
  for (std::size_t i = 0; i < n; ++i) p.upper[i] = ranges.hi[i + 1];
  detail::finalize_profile(p);
  return p;
}

struct RwBandResult {
  StepBand band;
  IntervalBounds bounds;
};

/// RW band for the scores at quantile kappa of the RW statistic.
inline RwBandResult rw_band(const ScoreSet& scores, double delta, double kappa,
                            bool all_intervals) {
  detail::require_delta(delta);
  auto family = build_family(scores, all_intervals);
  auto bounds = interval_bounds(family, kappa);
  StepBand band = band_from_profile(rw_profile(bounds, scores.sorted()), scores, BandMethod::kRW,
                                    delta);
  band.kappa = kappa;
  return {std::move(band), std::move(bounds)};
}

}  // namespace simconf
