#pragma once

// Scalar special functions shared by the band constructions: Bernoulli
// Kullback-Leibler divergence, the Duembgen-Wellner additive correction
// terms, and the regularized incomplete beta function for integer shapes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "simconf/error.hpp"

namespace simconf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A probability in [0, 1].
class Prob {
 public:
  constexpr Prob() = default;
  explicit Prob(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      std::ostringstream os;
      os << "probability out of [0,1]: " << value;
      throw DomainError(os.str());
    }
  }
  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  constexpr auto operator<=>(const Prob&) const = default;

 private:
  double value_ = 0.0;
};

/// Tuning parameter of the Duembgen-Wellner statistic; must exceed 3/4.
class NuParam {
 public:
  explicit NuParam(double nu = 1.5) : nu_(nu) {
    if (!(nu > 0.75) || !std::isfinite(nu)) {
      std::ostringstream os;
      os << "nu must be finite and > 3/4, got " << nu;
      throw DomainError(os.str());
    }
  }
  [[nodiscard]] constexpr double value() const noexcept { return nu_; }
  constexpr auto operator<=>(const NuParam&) const = default;

 private:
  double nu_;
};

namespace detail {

inline void require_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in [0,1], got " << x;
    throw DomainError(os.str());
  }
}

// x*log(x/y) with 0*log(0/y) = 0 and x*log(x/0) = inf for x > 0.
inline double xlogx_over_y(double x, double y) noexcept {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInf;
  return x * std::log(x / y);
}

}  // namespace detail

/// Bernoulli KL divergence K(a, b) = a log(a/b) + (1-a) log((1-a)/(1-b)),
/// using 0 log 0 = 0. Returns +inf when b is 0 or 1 and a differs from b.
inline double kl_bernoulli(double a, double b) {
  detail::require_unit(a, "kl_bernoulli: a");
  detail::require_unit(b, "kl_bernoulli: b");
  if (a == b) return 0.0;
  const double k = detail::xlogx_over_y(a, b) + detail::xlogx_over_y(1.0 - a, 1.0 - b);
  // Rounding can leave a tiny negative value when a and b are adjacent doubles.
  return std::max(k, 0.0);
}

struct DwCorrection {
  double c = 0.0;   // C(t)  = log(log(e / (4 t (1-t))))
  double d = 0.0;   // D(t)  = log(1 + C(t)^2)
  double cu = 0.0;  // C(t) + nu D(t)
};

/// Additive correction terms of the Duembgen-Wellner statistic at t in (0,1).
inline DwCorrection dw_correction(double t, NuParam nu) {
  if (!(t > 0.0 && t < 1.0)) {
    std::ostringstream os;
    os << "dw_correction: t must lie in (0,1), got " << t;
    throw DomainError(os.str());
  }
  // Near t = 1/2, log1p(-(1-2t)^2); in the tails the product itself, since
  // squaring 1 - 2t there loses the relative precision of t.
  const double s = 1.0 - 2.0 * t;
  const double log4tt = std::abs(s) < 0.5 ? std::log1p(-s * s) : std::log(4.0 * t * (1.0 - t));
  DwCorrection out;
  out.c = std::max(0.0, std::log1p(-log4tt));
  out.d = std::log1p(out.c * out.c);
  out.cu = out.c + nu.value() * out.d;
  return out;
}

/// C_nu^u(t) = C(t) + nu D(t); +inf at t in {0, 1}.
inline double dw_cu(double t, NuParam nu) {
  if (t <= 0.0 || t >= 1.0) return kInf;
  return dw_correction(t, nu).cu;
}

/// min { C(t) + nu D(t) : min(u,v) <= t <= max(u,v) }.
///
/// C + nu D is decreasing on (0, 1/2] and increasing on [1/2, 1), so the
/// minimum sits at the point of the interval closest to 1/2. A degenerate
/// interval at 0 or 1 gives +inf.
inline double c_nu_pair(double u, double v, NuParam nu) {
  detail::require_unit(u, "c_nu_pair: u");
  detail::require_unit(v, "c_nu_pair: v");
  const double lo = std::min(u, v);
  const double hi = std::max(u, v);
  if (lo <= 0.5 && hi >= 0.5) return 0.0;
  const double t = hi < 0.5 ? hi : lo;
  return dw_cu(t, nu);
}

/// log Gamma(x) for x >= 1 via upward shift and the Stirling series.
/// Avoids std::lgamma, which writes the global signgam.
inline double log_gamma(double x) {
  if (!(x >= 1.0)) throw DomainError("log_gamma: argument must be >= 1");
  double shift = 0.0;
  while (x < 16.0) {
    shift -= std::log(x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 -
             inv2 * (1.0 / 360.0 -
                     inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
  return shift + (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

namespace detail {

// Continued fraction for I_x(a,b) (modified Lentz), valid for x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("beta continued fraction did not converge");
}

}  // namespace detail

/// P(Beta(j, k) <= x) for integer shapes j, k >= 1.
inline double beta_cdf(std::int64_t j, std::int64_t k, double x) {
  if (j < 1 || k < 1) throw DomainError("beta_cdf: shapes must be >= 1");
  detail::require_unit(x, "beta_cdf: x");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const auto a = static_cast<double>(j);
  const auto b = static_cast<double>(k);
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  double result;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = front * detail::beta_continued_fraction(a, b, x) / a;
  } else {
    result = 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
  }
  return std::clamp(result, 0.0, 1.0);
}

}  // namespace simconf
