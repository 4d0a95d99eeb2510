#pragma once

// Finite-sample confidence bands for the CDF of the calibration scores.
//
// A band is stored on the ECDF index grid: entry j holds the bounds on
// F(t) for every t with exactly j scores <= t, i.e. on [S'_j, S'_{j+1}).
// With ties some indices are unreachable; the band is still valid there.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "simconf/error.hpp"
#include "simconf/numerics.hpp"
#include "simconf/scores.hpp"
#include "simconf/statistics.hpp"

namespace simconf {

enum class BandMethod { kDKW, kDW, kBJO, kAD, kEicker, kRW };
enum class Sided { kTwoSided, kLowerOnly };

inline std::string_view to_string(BandMethod m) {
  switch (m) {
    case BandMethod::kDKW: return "dkw";
    case BandMethod::kDW: return "dw";
    case BandMethod::kBJO: return "bjo";
    case BandMethod::kAD: return "ad";
    case BandMethod::kEicker: return "eicker";
    case BandMethod::kRW: return "rw";
  }
  return "?";
}

inline BandMethod parse_band_method(std::string_view s) {
  if (s == "dkw") return BandMethod::kDKW;
  if (s == "dw") return BandMethod::kDW;
  if (s == "bjo") return BandMethod::kBJO;
  if (s == "ad") return BandMethod::kAD;
  if (s == "eicker") return BandMethod::kEicker;
  if (s == "rw") return BandMethod::kRW;
  throw DomainError("unknown band method: " + std::string(s));
}

inline std::string_view to_string(Sided s) {
  return s == Sided::kTwoSided ? "two-sided" : "lower-only";
}

inline Sided parse_sided(std::string_view s) {
  if (s == "two-sided") return Sided::kTwoSided;
  if (s == "lower-only") return Sided::kLowerOnly;
  throw DomainError("unknown band side: " + std::string(s));
}

/// Statistic whose Monte Carlo quantile calibrates a band method.
inline Statistic calibrating_statistic(BandMethod m) {
  switch (m) {
    case BandMethod::kDW: return Statistic::kDW;
    case BandMethod::kBJO: return Statistic::kBJO;
    case BandMethod::kAD: return Statistic::kAD;
    case BandMethod::kEicker: return Statistic::kEicker;
    case BandMethod::kRW: return Statistic::kRW;
    case BandMethod::kDKW: break;
  }
  throw DomainError("dkw band uses a closed-form radius, not a simulated quantile");
}

/// Band values on the index grid 0..m, independent of where the breakpoints sit.
struct BandProfile {
  std::vector<double> lower;  // size m + 1
  std::vector<double> upper;  // size m + 1
  [[nodiscard]] std::size_t m() const noexcept { return lower.empty() ? 0 : lower.size() - 1; }
};

/// Piecewise-constant CDF confidence band over the sorted calibration scores.
struct StepBand {
  BandMethod method = BandMethod::kDKW;
  std::size_t m = 0;
  std::vector<double> breakpoints;  // S'_1 .. S'_m
  std::vector<double> lower;        // l_0 .. l_m
  std::vector<double> upper;        // u_0 .. u_m
  Prob delta;
  std::optional<NuParam> nu;
  std::optional<double> kappa;
  std::optional<AlphaInterval> restriction;
  Sided sided = Sided::kTwoSided;
  bool has_ties = false;

  /// Number of breakpoints <= t, i.e. the grid index of the band at t.
  [[nodiscard]] std::size_t index_at(double t) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), t) -
                                    breakpoints.begin());
  }
  [[nodiscard]] double lower_at(double t) const noexcept { return lower[index_at(t)]; }
  [[nodiscard]] double upper_at(double t) const noexcept { return upper[index_at(t)]; }
  [[nodiscard]] double width(std::size_t j) const { return upper.at(j) - lower.at(j); }
};

/// Right-continuous ECDF of the scores at t.
inline double ecdf(const ScoreSet& scores, double t) noexcept {
  return static_cast<double>(scores.count_le(t)) / static_cast<double>(scores.m());
}

namespace detail {

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    std::ostringstream os;
    os << "delta must lie in (0,1), got " << delta;
    throw DomainError(os.str());
  }
}

// Clips to [0,1], pins l_0 = 0 and u_m = 1, and replaces the band by its
// monotone hull: l_j <- max_{i<=j} l_i, u_j <- min_{i>=j} u_i. On the
// coverage event F is nondecreasing, so the hull keeps validity.
inline void finalize_profile(BandProfile& p) {
  const std::size_t m = p.m();
  for (std::size_t j = 0; j <= m; ++j) {
    p.lower[j] = std::clamp(p.lower[j], 0.0, 1.0);
    p.upper[j] = std::clamp(p.upper[j], 0.0, 1.0);
  }
  p.lower[0] = 0.0;
  p.upper[m] = 1.0;
  for (std::size_t j = 1; j <= m; ++j) p.lower[j] = std::max(p.lower[j], p.lower[j - 1]);
  for (std::size_t j = m; j-- > 0;) p.upper[j] = std::min(p.upper[j], p.upper[j + 1]);
}

inline StepBand attach(const BandProfile& profile, const ScoreSet& scores, BandMethod method,
                       double delta) {
  if (profile.m() != scores.m()) throw DomainError("band profile size does not match scores");
  StepBand band;
  band.method = method;
  band.m = scores.m();
  band.breakpoints.assign(scores.sorted().begin(), scores.sorted().end());
  band.lower = profile.lower;
  band.upper = profile.upper;
  band.delta = Prob(delta);
  band.has_ties = scores.has_ties();
  return band;
}

}  // namespace detail

inline constexpr double kBisectionTol = 1e-10;

/// Largest v in [level, 1] with g(v) <= kappa, for g nondecreasing on
/// [level, 1] and g(level) <= kappa. Bisection to kBisectionTol, rounded up.
template <class Kernel>
double invert_upper(const Kernel& kernel, std::size_t j, double kappa) {
  const double level = kernel.level(j);
  if (kernel(j, kernel.at(1.0)) <= kappa) return 1.0;
  double lo = level;
  double hi = 1.0;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (kernel(j, kernel.at(mid)) <= kappa) lo = mid; else hi = mid;
  }
  return hi;
}

/// Smallest v in [0, level] with g(v) <= kappa; mirror of invert_upper, rounded down.
template <class Kernel>
double invert_lower(const Kernel& kernel, std::size_t j, double kappa) {
  const double level = kernel.level(j);
  if (kernel(j, kernel.at(0.0)) <= kappa) return 0.0;
  double lo = 0.0;
  double hi = level;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (kernel(j, kernel.at(mid)) <= kappa) hi = mid; else lo = mid;
  }
  return lo;
}

/// DKW radius sqrt(log(2/delta) / (2m)); one-sided uses log(1/delta).
inline double dkw_epsilon(std::size_t m, double delta, Sided sided = Sided::kTwoSided) {
  if (!(delta > 0.0 && delta < 0.5)) {
    std::ostringstream os;
    os << "dkw: delta must lie in (0, 1/2), got " << delta;
    throw DomainError(os.str());
  }
  if (m == 0) throw DomainError("dkw: m must be positive");
  const double numer = sided == Sided::kTwoSided ? std::log(2.0 / delta) : std::log(1.0 / delta);
  return std::sqrt(numer / (2.0 * static_cast<double>(m)));
}

inline BandProfile dkw_profile(std::size_t m, double delta, Sided sided = Sided::kTwoSided) {
  const double eps = dkw_epsilon(m, delta, sided);
  BandProfile p{std::vector<double>(m + 1), std::vector<double>(m + 1)};
  for (std::size_t j = 0; j <= m; ++j) {
    const double level = static_cast<double>(j) / static_cast<double>(m);
    p.lower[j] = level - eps;
    p.upper[j] = sided == Sided::kTwoSided ? level + eps : 1.0;
  }
  detail::finalize_profile(p);
  return p;
}

/// Fixed-width DKW band F_m -/+ eps.
inline StepBand dkw_band(const ScoreSet& scores, double delta, Sided sided = Sided::kTwoSided) {
  StepBand band = detail::attach(dkw_profile(scores.m(), delta, sided), scores, BandMethod::kDKW,
                                 delta);
  band.kappa = dkw_epsilon(scores.m(), delta, sided);
  band.sided = sided;
  return band;
}

/// Inverts g_j(v) <= kappa for every grid level with a monotone kernel.
/// With a restriction, only levels j >= restricted_first_index are inverted;
/// lower levels get l_j = 0 and inherit the first inverted upper value.
template <class Kernel>
BandProfile invert_kernel_profile(const Kernel& kernel, double kappa,
                                  const std::optional<AlphaInterval>& restriction) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("band: kappa must be >= 0");
  const std::size_t m = kernel.m();
  const std::size_t first = restricted_first_index(m, restriction);
  BandProfile p{std::vector<double>(m + 1, 0.0), std::vector<double>(m + 1, 1.0)};
  for (std::size_t j = first; j <= m; ++j) {
    if (!kernel.active(j)) continue;
    p.lower[j] = invert_lower(kernel, j, kappa);
    p.upper[j] = invert_upper(kernel, j, kappa);
  }
  detail::finalize_profile(p);
  return p;
}

/// Duembgen-Wellner band values for given quantile kappa of the statistic.
///
/// Unrestricted bands compute u_j by bisection and mirror l_{m-j} = 1 - u_j.
inline BandProfile dw_profile(std::size_t m, NuParam nu, double kappa,
                              const std::optional<AlphaInterval>& restriction = std::nullopt) {
  if (m == 0) throw DomainError("dw band: m must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("dw band: kappa must be >= 0");
  const DwKernel kernel(m, nu);
  if (restriction) return invert_kernel_profile(kernel, kappa, restriction);
  BandProfile p{std::vector<double>(m + 1, 0.0), std::vector<double>(m + 1, 1.0)};
  for (std::size_t j = 0; j < m; ++j) {
    p.upper[j] = invert_upper(kernel, j, kappa);
    p.lower[m - j] = 1.0 - p.upper[j];
  }
  detail::finalize_profile(p);
  return p;
}

inline StepBand dw_band(const ScoreSet& scores, double delta, NuParam nu, double kappa,
                        const std::optional<AlphaInterval>& restriction = std::nullopt) {
  detail::require_delta(delta);
  StepBand band = detail::attach(dw_profile(scores.m(), nu, kappa, restriction), scores,
                                 BandMethod::kDW, delta);
  band.nu = nu;
  band.kappa = kappa;
  band.restriction = restriction;
  return band;
}

/// Berk-Jones-Owen band: m K(j/m, v) <= kappa.
inline BandProfile bjo_profile(std::size_t m, double kappa,
                               const std::optional<AlphaInterval>& restriction = std::nullopt) {
  if (m == 0) throw DomainError("bjo band: m must be positive");
  return invert_kernel_profile(BjoKernel(m), kappa, restriction);
}

/// Anderson-Darling weighted band: m (a - v)^2 <= kappa^2 v (1 - v), i.e.
/// (m + k^2) v^2 - (2am + k^2) v + m a^2 <= 0, solved in closed form.
inline BandProfile ad_profile(std::size_t m, double kappa,
                              const std::optional<AlphaInterval>& restriction = std::nullopt) {
  if (m == 0) throw DomainError("ad band: m must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("ad band: kappa must be >= 0");
  const auto md = static_cast<double>(m);
  const double k2 = kappa * kappa;
  const std::size_t first = restricted_first_index(m, restriction);
  BandProfile p{std::vector<double>(m + 1, 0.0), std::vector<double>(m + 1, 1.0)};
  for (std::size_t j = first; j <= m; ++j) {
    const double a = static_cast<double>(j) / md;
    const double qa = md + k2;
    const double qb = 2.0 * a * md + k2;
    const double disc = std::sqrt(k2 * (4.0 * a * md * (1.0 - a) + k2));
    // Relative nudge absorbs rounding in the root formula.
    p.lower[j] = std::nextafter((qb - disc) / (2.0 * qa), -kInf) - 4e-16;
    p.upper[j] = std::nextafter((qb + disc) / (2.0 * qa), kInf) + 4e-16;
  }
  detail::finalize_profile(p);
  return p;
}

/// Eicker weighted band: |a - v| <= kappa sqrt(a (1 - a) / m) for 0 < a < 1;
/// the trivial bounds at a in {0, 1} are tightened by the monotone hull.
inline BandProfile eicker_profile(std::size_t m, double kappa,
                                  const std::optional<AlphaInterval>& restriction = std::nullopt) {
  if (m == 0) throw DomainError("eicker band: m must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("eicker band: kappa must be >= 0");
  }
  const auto md = static_cast<double>(m);
  const std::size_t first = restricted_first_index(m, restriction);
  BandProfile p{std::vector<double>(m + 1, 0.0), std::vector<double>(m + 1, 1.0)};
  for (std::size_t j = std::max<std::size_t>(first, 1); j < m; ++j) {
    const double a = static_cast<double>(j) / md;
    const double half = kappa * std::sqrt(a * (1.0 - a) / md);
    p.lower[j] = a - half - 4e-16;
    p.upper[j] = a + half + 4e-16;
  }
  detail::finalize_profile(p);
  return p;
}

/// Berk-Jones-Owen, Anderson-Darling, or Eicker band from a simulated quantile.
inline StepBand comparison_band(const ScoreSet& scores, double delta, BandMethod kind, double kappa,
                                const std::optional<AlphaInterval>& restriction = std::nullopt) {
  detail::require_delta(delta);
  BandProfile profile;
  switch (kind) {
    case BandMethod::kBJO: profile = bjo_profile(scores.m(), kappa, restriction); break;
    case BandMethod::kAD: profile = ad_profile(scores.m(), kappa, restriction); break;
    case BandMethod::kEicker: profile = eicker_profile(scores.m(), kappa, restriction); break;
    default: throw DomainError("comparison_band: kind must be bjo, ad or eicker");
  }
  StepBand band = detail::attach(profile, scores, kind, delta);
  band.kappa = kappa;
  band.restriction = restriction;
  return band;
}

/// Band with precomputed values attached to a new score set.
inline StepBand band_from_profile(const BandProfile& profile, const ScoreSet& scores,
                                  BandMethod method, double delta) {
  return detail::attach(profile, scores, method, delta);
}

/// Whether l(t) <= F(t) <= u(t) for all t, where F is the Unif(0,1) CDF and
/// the breakpoints are a uniform sample; checks both ends of every
/// constancy interval (the right end as a limit).
inline bool covers_uniform_cdf(const StepBand& band) {
  const std::size_t m = band.m;
  for (std::size_t j = 0; j <= m; ++j) {
    const double left = j == 0 ? 0.0 : std::clamp(band.breakpoints[j - 1], 0.0, 1.0);
    const double right = j == m ? 1.0 : std::clamp(band.breakpoints[j], 0.0, 1.0);
    if (band.lower[j] > left || band.upper[j] < right) return false;
  }
  return true;
}

}  // namespace simconf
