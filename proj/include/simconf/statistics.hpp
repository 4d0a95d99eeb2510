#pragma once

// Goodness-of-fit statistics of sorted uniform samples, written as local
// discrepancy kernels g_j(v) between an ECDF level a = j/m and a CDF value v.
//
// Every kernel here is nondecreasing in |v - a| on each side of a. The ECDF
// is constant (= j/m) while the uniform CDF sweeps [U_(j), U_(j+1)), so the
// supremum over that constancy interval is attained at one of its two
// endpoints. The supremum over the real line therefore reduces to 2m
// evaluations: at each U_(i), with levels i/m and (i-1)/m.

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

namespace simconf {

enum class Statistic { kDW, kBJO, kAD, kEicker, kKS, kRW };

inline std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::kDW: return "dw";
    case Statistic::kBJO: return "bjo";
    case Statistic::kAD: return "ad";
    case Statistic::kEicker: return "eicker";
    case Statistic::kKS: return "ks";
    case Statistic::kRW: return "rw";
  }
  return "?";
}

inline Statistic parse_statistic(std::string_view s) {
  if (s == "dw") return Statistic::kDW;
  if (s == "bjo") return Statistic::kBJO;
  if (s == "ad") return Statistic::kAD;
  if (s == "eicker") return Statistic::kEicker;
  if (s == "ks") return Statistic::kKS;
  if (s == "rw") return Statistic::kRW;
  throw DomainError("unknown statistic: " + std::string(s));
}

/// Target set I = [lo, hi] of miscoverage levels for an (I, delta) guarantee.
struct AlphaInterval {
  double lo = 0.0;
  double hi = 1.0;

  AlphaInterval() = default;
  AlphaInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo >= 0.0 && lo <= hi && hi < 1.0)) {
      std::ostringstream os;
      os << "alpha restriction must satisfy 0 <= lo <= hi < 1, got [" << lo << ", " << hi << "]";
      throw DomainError(os.str());
    }
  }
  [[nodiscard]] bool contains(double alpha) const noexcept { return alpha >= lo && alpha <= hi; }
  bool operator==(const AlphaInterval&) const = default;
};

/// Smallest ECDF index j with j/m >= 1 - alpha_max. A restricted statistic
/// (and its band inversion) only looks at levels j >= this index.
inline std::size_t restricted_first_index(std::size_t m, const std::optional<AlphaInterval>& r) {
  if (!r) return 0;
  const double level = 1.0 - r->hi;
  const auto md = static_cast<double>(m);
  for (std::size_t j = 0; j <= m; ++j) {
    if (static_cast<double>(j) / md >= level) return j;
  }
  return m;
}

namespace detail {

inline void require_sorted_open_unit(std::span<const double> u) {
  if (u.empty()) throw DomainError("statistic: empty sample");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0)) throw DomainError("statistic: sample must lie in (0,1)");
    if (i > 0 && u[i] < u[i - 1]) throw DomainError("statistic: sample must be sorted");
  }
}

// a log a + (1-a) log(1-a) with 0 log 0 = 0.
inline double neg_entropy(double a) {
  double e = 0.0;
  if (a > 0.0) e += a * std::log(a);
  if (a < 1.0) e += (1.0 - a) * std::log1p(-a);
  return e;
}

}  // namespace detail

/// Kernel for m * K(a, v): Berk-Jones statistic.
class BjoKernel {
 public:
  struct Point {
    double v, log_v, log_1mv;
  };

  explicit BjoKernel(std::size_t m) : m_(m), level_(m + 1), ent_(m + 1) {
    for (std::size_t j = 0; j <= m; ++j) {
      level_[j] = static_cast<double>(j) / static_cast<double>(m);
      ent_[j] = detail::neg_entropy(level_[j]);
    }
  }

  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] double level(std::size_t j) const noexcept { return level_[j]; }
  [[nodiscard]] bool active(std::size_t) const noexcept { return true; }

  [[nodiscard]] Point at(double v) const noexcept {
    return {v, std::log(v), std::log1p(-v)};
  }

  /// K(j/m, v), finite or +inf.
  [[nodiscard]] double kl(std::size_t j, const Point& p) const noexcept {
    const double a = level_[j];
    if (a == p.v) return 0.0;
    double k = ent_[j];
    if (a > 0.0) k -= a * p.log_v;
    if (a < 1.0) k -= (1.0 - a) * p.log_1mv;
    return std::max(k, 0.0);
  }

  [[nodiscard]] double operator()(std::size_t j, const Point& p) const noexcept {
    return static_cast<double>(m_) * kl(j, p);
  }

 protected:
  std::size_t m_;
  std::vector<double> level_;
  std::vector<double> ent_;
};

/// Kernel for m * K(a, v) - C_nu(a, v): Duembgen-Wellner statistic.
class DwKernel {
 public:
  struct Point {
    BjoKernel::Point base;
    double cu;  // C_nu^u(v), +inf at 0 and 1
  };

  DwKernel(std::size_t m, NuParam nu) : bjo_(m), nu_(nu), cu_(m + 1) {
    for (std::size_t j = 0; j <= m; ++j) cu_[j] = dw_cu(bjo_.level(j), nu);
  }

  [[nodiscard]] std::size_t m() const noexcept { return bjo_.m(); }
  [[nodiscard]] double level(std::size_t j) const noexcept { return bjo_.level(j); }
  [[nodiscard]] bool active(std::size_t) const noexcept { return true; }
  [[nodiscard]] NuParam nu() const noexcept { return nu_; }

  [[nodiscard]] Point at(double v) const { return {bjo_.at(v), dw_cu(v, nu_)}; }

  /// C_nu(j/m, v) via the point of [min, max] closest to 1/2.
  [[nodiscard]] double correction(std::size_t j, const Point& p) const noexcept {
    const double a = bjo_.level(j);
    const double v = p.base.v;
    if (std::min(a, v) <= 0.5 && std::max(a, v) >= 0.5) return 0.0;
    if (v < 0.5) return v > a ? p.cu : cu_[j];
    return v < a ? p.cu : cu_[j];
  }

  [[nodiscard]] double operator()(std::size_t j, const Point& p) const noexcept {
    const double c = correction(j, p);
    if (c == kInf) return -kInf;
    return bjo_(j, p.base) - c;
  }

 private:
  BjoKernel bjo_;
  NuParam nu_;
  std::vector<double> cu_;
};

/// Kernel for sqrt(m) |a - v|: Kolmogorov-Smirnov statistic.
class KsKernel {
 public:
  struct Point {
    double v;
  };
  explicit KsKernel(std::size_t m) : m_(m), sqrt_m_(std::sqrt(static_cast<double>(m))) {}
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] double level(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(m_);
  }
  [[nodiscard]] bool active(std::size_t) const noexcept { return true; }
  [[nodiscard]] Point at(double v) const noexcept { return {v}; }
  [[nodiscard]] double operator()(std::size_t j, const Point& p) const noexcept {
    return sqrt_m_ * std::abs(level(j) - p.v);
  }

 private:
  std::size_t m_;
  double sqrt_m_;
};

/// Kernel for sqrt(m) |a - v| / sqrt(v (1 - v)): Anderson-Darling weighting.
class AdKernel {
 public:
  struct Point {
    double v, inv_sd;
  };
  explicit AdKernel(std::size_t m) : ks_(m) {}
  [[nodiscard]] std::size_t m() const noexcept { return ks_.m(); }
  [[nodiscard]] double level(std::size_t j) const noexcept { return ks_.level(j); }
  [[nodiscard]] bool active(std::size_t) const noexcept { return true; }
  [[nodiscard]] Point at(double v) const noexcept {
    const double w = v * (1.0 - v);
    return {v, w > 0.0 ? 1.0 / std::sqrt(w) : kInf};
  }
  [[nodiscard]] double operator()(std::size_t j, const Point& p) const noexcept {
    const double num = ks_(j, {p.v});
    return num == 0.0 ? 0.0 : num * p.inv_sd;
  }

 private:
  KsKernel ks_;
};

/// Kernel for sqrt(m) |a - v| / sqrt(a (1 - a)): Eicker weighting, defined
/// only for ECDF levels strictly inside (0, 1).
class EickerKernel {
 public:
  struct Point {
    double v;
  };
  explicit EickerKernel(std::size_t m) : ks_(m), inv_sd_(m + 1, 0.0) {
    for (std::size_t j = 1; j < m; ++j) {
      const double a = ks_.level(j);
      inv_sd_[j] = 1.0 / std::sqrt(a * (1.0 - a));
    }
  }
  [[nodiscard]] std::size_t m() const noexcept { return ks_.m(); }
  [[nodiscard]] double level(std::size_t j) const noexcept { return ks_.level(j); }
  [[nodiscard]] bool active(std::size_t j) const noexcept { return j > 0 && j < ks_.m(); }
  [[nodiscard]] Point at(double v) const noexcept { return {v}; }
  [[nodiscard]] double operator()(std::size_t j, const Point& p) const noexcept {
    return ks_(j, {p.v}) * inv_sd_[j];
  }

 private:
  KsKernel ks_;
  std::vector<double> inv_sd_;
};

/// sup over the real line of g_{mF_m(z)}(F(z)) for a sorted uniform sample,
/// restricted to ECDF indices j >= first_index.
template <class Kernel>
double endpoint_supremum(std::span<const double> sorted_u, const Kernel& kernel,
                         std::size_t first_index = 0) {
  const std::size_t m = sorted_u.size();
  double best = -kInf;
  for (std::size_t i = 1; i <= m; ++i) {
    const auto p = kernel.at(sorted_u[i - 1]);
    if (i >= first_index && kernel.active(i)) best = std::max(best, kernel(i, p));
    if (i - 1 >= first_index && kernel.active(i - 1)) best = std::max(best, kernel(i - 1, p));
  }
  return best;
}

/// Duembgen-Wellner statistic sup_z { m K(F_m(z), F(z)) - C_nu(F_m(z), F(z)) }
/// of a sorted sample from Unif(0,1). With a restriction, only ECDF levels
/// j/m >= 1 - alpha_max enter the supremum.
inline double dw_statistic(std::span<const double> sorted_u, NuParam nu,
                           const std::optional<AlphaInterval>& restriction = std::nullopt) {
  detail::require_sorted_open_unit(sorted_u);
  const DwKernel kernel(sorted_u.size(), nu);
  return endpoint_supremum(sorted_u, kernel, restricted_first_index(sorted_u.size(), restriction));
}

/// Duembgen-Wellner statistic of a sample from a discrete distribution G,
/// evaluated at its atoms (the only places where G and its ECDF change).
/// `atoms` must be increasing and `atom_cdf[i]` = G(atoms[i]).
inline double dw_statistic_discrete(std::span<const double> sample, std::span<const double> atoms,
                                    std::span<const double> atom_cdf, NuParam nu) {
  if (atoms.size() != atom_cdf.size() || atoms.empty()) {
    throw DomainError("dw_statistic_discrete: atoms and cdf values must match");
  }
  if (sample.empty()) throw DomainError("dw_statistic_discrete: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double best = -kInf;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), atoms[i]) - sorted.begin();
    const double ecdf = static_cast<double>(count) / n;
    const double g = atom_cdf[i];
    const double c = c_nu_pair(ecdf, g, nu);
    if (c == kInf) continue;
    best = std::max(best, n * kl_bernoulli(ecdf, g) - c);
  }
  return best;
}

inline double bjo_statistic(std::span<const double> sorted_u,
                            const std::optional<AlphaInterval>& restriction = std::nullopt) {
  detail::require_sorted_open_unit(sorted_u);
  const BjoKernel kernel(sorted_u.size());
  return endpoint_supremum(sorted_u, kernel, restricted_first_index(sorted_u.size(), restriction));
}

inline double ks_statistic(std::span<const double> sorted_u) {
  detail::require_sorted_open_unit(sorted_u);
  return endpoint_supremum(sorted_u, KsKernel(sorted_u.size()));
}

inline double ad_statistic(std::span<const double> sorted_u,
                           const std::optional<AlphaInterval>& restriction = std::nullopt) {
  detail::require_sorted_open_unit(sorted_u);
  const AdKernel kernel(sorted_u.size());
  return endpoint_supremum(sorted_u, kernel, restricted_first_index(sorted_u.size(), restriction));
}

inline double eicker_statistic(std::span<const double> sorted_u,
                               const std::optional<AlphaInterval>& restriction = std::nullopt) {
  detail::require_sorted_open_unit(sorted_u);
  const EickerKernel kernel(sorted_u.size());
  return endpoint_supremum(sorted_u, kernel, restricted_first_index(sorted_u.size(), restriction));
}

}  // namespace simconf
