#pragma once

// Threshold curves alpha -> Q(alpha) from a CDF band, the split-conformal
// and fixed-alpha PAC baselines, and coverage diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "simconf/bands.hpp"
#include "simconf/error.hpp"
#include "simconf/numerics.hpp"
#include "simconf/scores.hpp"

namespace simconf {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct ThresholdCurve {
  BandMethod method = BandMethod::kDKW;
  std::size_t m = 0;
  Prob delta;
  bool has_ties = false;
  std::vector<double> alphas;
  std::vector<double> q_hat;          // +inf when no index qualifies
  std::vector<std::size_t> j_alpha;   // m + 1 when no index qualifies
  std::vector<double> slack;          // l(Q) - (1 - alpha); NaN when Q = +inf
  std::vector<double> band_width;     // u(Q) - l(Q); NaN when Q = +inf
  std::vector<double> r_bound;        // slack + band_width
  std::vector<double> kappa_alpha;    // fixed-alpha PAC level, NaN if not defined

  [[nodiscard]] std::size_t size() const noexcept { return alphas.size(); }
  [[nodiscard]] bool finite(std::size_t i) const { return j_alpha.at(i) <= m; }
};

namespace detail {

inline void require_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream os;
    os << name << " must lie in (0,1), got " << x;
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// j_alpha = min { j in 1..m : l_j >= 1 - alpha }, or m + 1 if none.
inline std::size_t first_index_at_level(std::span<const double> lower, double level) {
  const auto it = std::lower_bound(lower.begin() + 1, lower.end(), level);
  return static_cast<std::size_t>(it - lower.begin());
}

/// Q(alpha) = S'_{j_alpha} for every alpha on the grid.
inline ThresholdCurve simultaneous_thresholds(const StepBand& band, std::span<const double> alphas) {
  ThresholdCurve c;
  c.method = band.method;
  c.m = band.m;
  c.delta = band.delta;
  c.has_ties = band.has_ties;
  for (double a : alphas) {
    detail::require_open_unit(a, "alpha");
    if (band.restriction && !band.restriction->contains(a)) {
      std::ostringstream os;
      os << "alpha " << a << " lies outside the band's restriction [" << band.restriction->lo
         << ", " << band.restriction->hi << "]";
      throw DomainError(os.str());
    }
    const std::size_t j = first_index_at_level(band.lower, 1.0 - a);
    c.alphas.push_back(a);
    c.j_alpha.push_back(j);
    c.q_hat.push_back(j <= band.m ? band.breakpoints[j - 1] : kInf);
    c.slack.push_back(kMissing);
    c.band_width.push_back(kMissing);
    c.r_bound.push_back(kMissing);
    c.kappa_alpha.push_back(kMissing);
  }
  return c;
}

/// Fills the slack, width, and R = slack + width of every finite threshold.
inline void residual_bound(const StepBand& band, ThresholdCurve& curve) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!curve.finite(i)) continue;
    const std::size_t idx = band.index_at(curve.q_hat[i]);
    curve.slack[i] = band.lower[idx] - (1.0 - curve.alphas[i]);
    curve.band_width[i] = band.upper[idx] - band.lower[idx];
    curve.r_bound[i] = curve.slack[i] + curve.band_width[i];
  }
}

/// Closed-form bound on R for the DKW band with distinct scores.
inline double dkw_residual_limit(std::size_t m, double delta) {
  const auto md = static_cast<double>(m);
  return std::sqrt(2.0 * std::log(2.0 / delta) / md) + 1.0 / md;
}

/// Bound w_j + w_{j-1} + 1/m on R for a DW band with distinct scores.
inline double dw_residual_limit(const StepBand& band, std::size_t j_alpha) {
  if (j_alpha < 1 || j_alpha > band.m) throw DomainError("dw_residual_limit: j out of range");
  return band.width(j_alpha) + band.width(j_alpha - 1) + 1.0 / static_cast<double>(band.m);
}

/// k = ceil((m + 1)(1 - alpha)); S'_k or +inf when k > m.
inline std::size_t split_index(std::size_t m, double alpha) {
  detail::require_open_unit(alpha, "alpha");
  const double x = static_cast<double>(m + 1) * (1.0 - alpha);
  return static_cast<std::size_t>(std::ceil(x - 1e-12 * x));
}

inline double split_threshold(const ScoreSet& scores, double alpha) {
  const std::size_t k = split_index(scores.m(), alpha);
  return k <= scores.m() ? scores.order_stat(k) : kInf;
}

/// Smallest k with k/m >= ceil((m+1)(1-alpha))/m + sqrt(log(1/delta)/(2m)).
inline std::size_t vovk_pac_index(std::size_t m, double alpha, double delta) {
  detail::require_open_unit(delta, "delta");
  const auto md = static_cast<double>(m);
  const double level =
      static_cast<double>(split_index(m, alpha)) / md + std::sqrt(std::log(1.0 / delta) / (2.0 * md));
  if (level > 1.0) return m + 1;
  const double x = level * md;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x - 1e-12 * x)));
}

inline double vovk_pac_threshold(const ScoreSet& scores, double alpha, double delta) {
  const std::size_t k = vovk_pac_index(scores.m(), alpha, delta);
  return k <= scores.m() ? scores.order_stat(k) : kInf;
}

/// sqrt(2 log(2/delta) / (9m)) + 1/(3m).
inline double delta_dkw(std::size_t m, double delta) {
  const auto md = static_cast<double>(m);
  return std::sqrt(2.0 * std::log(2.0 / delta) / (9.0 * md)) + 1.0 / (3.0 * md);
}

/// Fixed-alpha PAC level of the DKW simultaneous threshold.
inline double kappa_dkw(double alpha, double delta, std::size_t m) {
  detail::require_open_unit(alpha, "alpha");
  detail::require_open_unit(delta, "delta");
  if (m == 0) throw DomainError("kappa_dkw: m must be positive");
  const double half = delta / 2.0;
  const double d = delta_dkw(m, delta);
  if (alpha <= 0.5) return std::pow(half, 1.0 / (4.0 * alpha * (1.0 - alpha)));
  if (alpha <= 0.5 + d) return half;
  return std::pow(half, 1.0 / (4.0 * (alpha - d) * (1.0 - alpha + d)));
}

/// Floor of 1 - kappa_dkw over alpha.
inline double kappa_dkw_floor(double delta) { return 1.0 - delta / 2.0; }

/// max over j = 1..m of (j + 1)/m - l_j.
inline double delta_dw(const StepBand& band) {
  const auto md = static_cast<double>(band.m);
  double best = -kInf;
  for (std::size_t j = 1; j <= band.m; ++j) {
    best = std::max(best, static_cast<double>(j + 1) / md - band.lower[j]);
  }
  return best;
}

/// Fixed-alpha PAC level of the DW simultaneous threshold, given the DW
/// quantile kappa_n and the realized band (through Delta).
inline double kappa_dw(double alpha, double kappa_n, NuParam nu, double big_delta) {
  detail::require_open_unit(alpha, "alpha");
  if (alpha < 0.5) return std::exp(-dw_cu(1.0 - alpha, nu) - kappa_n);
  if (alpha <= 0.5 + big_delta) return std::exp(-kappa_n);
  return std::exp(-dw_cu(1.0 - alpha + big_delta, nu) - kappa_n);
}

inline double kappa_dw(double alpha, const StepBand& band) {
  if (band.method != BandMethod::kDW || !band.kappa || !band.nu) {
    throw DomainError("kappa_dw: needs a DW band with kappa and nu");
  }
  return kappa_dw(alpha, *band.kappa, *band.nu, delta_dw(band));
}

inline double kappa_dw_floor(double kappa_n) { return 1.0 - std::exp(-kappa_n); }

/// P(F(S'_j) >= 1 - alpha) = 1 - I_{1-alpha}(j, m - j + 1) for continuous scores.
inline double exact_marginal_coverage(std::size_t j, std::size_t m, double alpha) {
  if (j < 1 || j > m) throw DomainError("exact_marginal_coverage: need 1 <= j <= m");
  detail::require_unit(alpha, "alpha");
  return 1.0 - beta_cdf(static_cast<std::int64_t>(j), static_cast<std::int64_t>(m - j + 1),
                        1.0 - alpha);
}

/// Threshold curve with residuals and, for DKW and DW bands, kappa_alpha.
inline ThresholdCurve threshold_curve(const StepBand& band, std::span<const double> alphas) {
  auto curve = simultaneous_thresholds(band, alphas);
  residual_bound(band, curve);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double a = curve.alphas[i];
    if (band.method == BandMethod::kDKW && band.sided == Sided::kTwoSided) {
      curve.kappa_alpha[i] = kappa_dkw(a, band.delta.value(), band.m);
    } else if (band.method == BandMethod::kDW && band.kappa && band.nu) {
      curve.kappa_alpha[i] = kappa_dw(a, band);
    }
  }
  return curve;
}

/// Grid lo, lo + step, ..., up to hi (inclusive within 1e-9).
inline std::vector<double> alpha_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo <= hi)) throw DomainError("alpha_range: need lo <= hi and step > 0");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    // Round to 12 decimals so 0.05 + 0.01 i prints and compares cleanly.
    const double a = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
    if (a > hi + 1e-9) break;
    out.push_back(a);
  }
  return out;
}

}  // namespace simconf
