#pragma once

// Replication harness: the Poisson regression model with contamination, a
// k-NN conditional-CDF score model, the true-model oracle, and coverage,
// width, and simultaneity metrics for every threshold method.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "simconf/bands.hpp"
#include "simconf/error.hpp"
#include "simconf/numerics.hpp"
#include "simconf/pac.hpp"
#include "simconf/quantile.hpp"
#include "simconf/rng.hpp"
#include "simconf/rwset.hpp"
#include "simconf/scores.hpp"

namespace simconf {

// ---------------------------------------------------------------------------
// Data model

struct Sample {
  std::vector<double> x;
  std::vector<double> y;
  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
};

/// Poisson mean at covariate x: sin^2(x) + 0.1.
inline double poisson_rate(double x) {
  const double s = std::sin(x);
  return s * s + 0.1;
}

inline constexpr double kContaminationProb = 0.01;
inline constexpr double kXLo = 1.0;
inline constexpr double kXHi = 5.0;
inline constexpr double kSlope = 0.03;

/// Y = Pois(sin^2 X + 0.1) + 0.03 X + e1 + 1(U < 0.01) e2, X ~ Unif[1, 5].
inline Sample simulate_dataset(std::size_t n, std::uint64_t seed) {
  auto eng = make_engine(seed, 0, Stream::kData);
  std::uniform_real_distribution<double> ux(kXLo, kXHi);
  std::normal_distribution<double> normal(0.0, 1.0);
  Sample s;
  s.x.resize(n);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(eng);
    std::poisson_distribution<int> pois(poisson_rate(x));
    const double p = pois(eng);
    const double e1 = normal(eng);
    const double e2 = normal(eng);
    const double u = uniform_open(eng);
    s.x[i] = x;
    s.y[i] = p + kSlope * x + e1 + (u < kContaminationProb ? e2 : 0.0);
  }
  return s;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// True conditional CDF of Y - 0.03 x given Poisson rate lambda: a Poisson
/// mixture of N(0, 1) (weight 0.99) and N(0, 2) (weight 0.01) noise.
inline double true_noise_cdf(double z, double lambda) {
  double total = 0.0;
  double pmf = std::exp(-lambda);
  for (int p = 0; p < 200; ++p) {
    if (p > 0) pmf *= lambda / p;
    const double d = z - p;
    total += pmf * ((1.0 - kContaminationProb) * normal_cdf(d) +
                    kContaminationProb * normal_cdf(d / std::numbers::sqrt2));
    if (p > lambda && pmf < 1e-18) break;
  }
  return std::clamp(total, 0.0, 1.0);
}

/// True conditional CDF H(y | x).
inline double true_conditional_cdf(double x, double y) {
  return true_noise_cdf(y - kSlope * x, poisson_rate(x));
}

/// Quantile of the noise mixture at level p in (0, 1), by bisection.
inline double true_noise_quantile(double p, double lambda) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("true_noise_quantile: p must lie in (0,1)");
  double lo = -20.0;
  double hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (true_noise_cdf(mid, lambda) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Width of the central interval [q(p_lo), q(p_hi)] of Y | x; +inf if an end is unbounded.
inline double true_interval_width(double lambda, double p_lo, double p_hi) {
  if (p_lo <= 0.0 || p_hi >= 1.0) return kInf;
  if (p_hi < p_lo) return 0.0;
  return true_noise_quantile(p_hi, lambda) - true_noise_quantile(p_lo, lambda);
}

/// Monte Carlo widths of the central (1 - alpha) quantile intervals of Y | X = x.
inline std::vector<double> oracle_conditional_quantiles(double x, std::span<const double> alphas,
                                                        std::size_t mc_reps, std::uint64_t seed) {
  if (mc_reps < 10000) throw DomainError("oracle_conditional_quantiles: need mc_reps >= 10^4");
  auto eng = make_engine(seed, 0, Stream::kOracle);
  std::poisson_distribution<int> pois(poisson_rate(x));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(mc_reps);
  for (auto& v : y) {
    const double p = pois(eng);
    const double e1 = normal(eng);
    const double e2 = normal(eng);
    const double u = uniform_open(eng);
    v = p + kSlope * x + e1 + (u < kContaminationProb ? e2 : 0.0);
  }
  std::sort(y.begin(), y.end());
  const auto quantile = [&](double p) {
    // Type-7 interpolated empirical quantile.
    const double h = (static_cast<double>(mc_reps) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, mc_reps - 1);
    return y[lo] + (h - static_cast<double>(lo)) * (y[hi] - y[lo]);
  };
  std::vector<double> out;
  for (double a : alphas) {
    detail::require_unit(a, "alpha");
    out.push_back(std::max(0.0, quantile(1.0 - a / 2.0) - quantile(a / 2.0)));
  }
  return out;
}

/// Exact oracle widths on a grid of Poisson rates, interpolated linearly.
class OracleWidthTable {
 public:
  OracleWidthTable(std::span<const double> alphas, std::size_t grid = 101)
      : lam_lo_(0.1), lam_hi_(1.1), grid_(grid), width_(alphas.size(), std::vector<double>(grid)) {
    for (std::size_t g = 0; g < grid; ++g) {
      const double lam = lambda_at(g);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        width_[a][g] = true_interval_width(lam, alphas[a] / 2.0, 1.0 - alphas[a] / 2.0);
      }
    }
  }

  [[nodiscard]] double width(std::size_t alpha_idx, double x) const {
    const double t = (poisson_rate(x) - lam_lo_) / (lam_hi_ - lam_lo_) * double(grid_ - 1);
    const double tc = std::clamp(t, 0.0, double(grid_ - 1));
    const auto g = std::min(static_cast<std::size_t>(tc), grid_ - 2);
    const double f = tc - static_cast<double>(g);
    const auto& w = width_[alpha_idx];
    return w[g] + f * (w[g + 1] - w[g]);
  }

 private:
  [[nodiscard]] double lambda_at(std::size_t g) const {
    return lam_lo_ + (lam_hi_ - lam_lo_) * static_cast<double>(g) / double(grid_ - 1);
  }
  double lam_lo_, lam_hi_;
  std::size_t grid_;
  std::vector<std::vector<double>> width_;
};

// ---------------------------------------------------------------------------
// k-NN conditional CDF

/// H(y | x) = fraction of the k nearest training covariates whose response is <= y.
class KnnConditionalCdf {
 public:
  KnnConditionalCdf(const Sample& train, std::size_t k) : k_(k) {
    if (train.size() == 0) throw DomainError("knn_conditional_cdf: empty training set");
    if (k == 0 || k > train.size()) throw DomainError("knn_conditional_cdf: need 1 <= k <= n_train");
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return train.x[a] < train.x[b]; });
    xs_.reserve(order.size());
    ys_.reserve(order.size());
    for (std::size_t i : order) {
      xs_.push_back(train.x[i]);
      ys_.push_back(train.y[i]);
    }
  }

  [[nodiscard]] std::size_t k() const noexcept { return k_; }

  /// Sorted responses of the k nearest neighbours of x; distance ties go left.
  [[nodiscard]] std::vector<double> neighbors(double x) const {
    const std::size_t n = xs_.size();
    std::size_t right = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    std::size_t left = right;  // window is [left, right)
    std::vector<double> out;
    out.reserve(k_);
    while (out.size() < k_) {
      const bool can_l = left > 0;
      const bool can_r = right < n;
      bool take_left;
      if (can_l && can_r) {
        take_left = x - xs_[left - 1] <= xs_[right] - x;
      } else {
        take_left = can_l;
      }
      if (take_left) {
        out.push_back(ys_[--left]);
      } else {
        out.push_back(ys_[right++]);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  [[nodiscard]] double operator()(double x, double y) const {
    const auto nb = neighbors(x);
    return cdf_from_neighbors(nb, y);
  }

  static double cdf_from_neighbors(std::span<const double> sorted_nb, double y) {
    const auto c = std::upper_bound(sorted_nb.begin(), sorted_nb.end(), y) - sorted_nb.begin();
    return static_cast<double>(c) / static_cast<double>(sorted_nb.size());
  }

 private:
  std::size_t k_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

inline KnnConditionalCdf knn_conditional_cdf(const Sample& train, std::size_t k) {
  return KnnConditionalCdf(train, k);
}

/// Length of {y : |H(y|x) - 1/2| <= q} for the k-NN step CDF; with
/// Y_(0) = -inf and Y_(k+1) = +inf it is [Y_(c_lo), Y_(c_hi + 1)).
inline double knn_dcp_width(std::span<const double> sorted_nb, double q) {
  const std::size_t k = sorted_nb.size();
  const auto kd = static_cast<double>(k);
  std::size_t c_lo = k + 1;
  std::size_t c_hi = 0;
  for (std::size_t c = 0; c <= k; ++c) {
    if (dcp_score(static_cast<double>(c) / kd) <= q) {
      c_lo = std::min(c_lo, c);
      c_hi = c;
    }
  }
  if (c_lo > k) return 0.0;
  if (c_lo == 0 || c_hi == k) return kInf;
  return sorted_nb[c_hi] - sorted_nb[c_lo - 1];
}

// ---------------------------------------------------------------------------
// Experiment configuration and report

enum class HarnessMode { kUniform, kSimulation };
enum class ScoreModel { kKnn, kOracle };

struct SimConfig {
  HarnessMode mode = HarnessMode::kSimulation;
  ScoreModel score_model = ScoreModel::kKnn;
  std::size_t n_train = 2000;
  std::size_t n_cal = 1000;
  std::size_t n_test = 2000;
  std::size_t reps = 100;
  double delta = 0.1;
  std::vector<double> alpha_grid;  // empty: 0.05:0.95:0.01 filtered to the restriction
  std::vector<std::string> methods = {"dkw", "dw", "split", "train_quantile"};
  std::uint64_t seed = 0;
  std::optional<AlphaInterval> restriction;
  bool restrict_statistic = false;  // use the restricted DW statistic and inversion
  std::size_t k = 50;
  double nu = 1.5;
  std::size_t mc_reps = 100000;     // replications for band quantiles
  unsigned threads = 1;

  void validate() const {
    if (n_cal == 0 || n_test == 0 || reps == 0) throw DomainError("SimConfig: counts must be >= 1");
    if (mode == HarnessMode::kSimulation && n_train == 0) throw DomainError("SimConfig: n_train must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("SimConfig: delta must lie in (0,1)");
    for (double a : alpha_grid) {
      if (!(a > 0.0 && a < 1.0)) throw DomainError("SimConfig: alpha outside (0,1)");
      if (restriction && !restriction->contains(a)) throw DomainError("SimConfig: alpha outside restriction");
    }
    static const std::set<std::string> known = {"dkw", "dw", "bjo", "ad", "eicker", "rw",
                                                "split", "vovk", "train_quantile"};
    if (methods.empty()) throw DomainError("SimConfig: no methods");
    for (const auto& m : methods) {
      if (!known.contains(m)) throw DomainError("SimConfig: unknown method " + m);
      if (m == "train_quantile" && mode == HarnessMode::kUniform) {
        throw DomainError("SimConfig: train_quantile needs simulation mode");
      }
    }
    NuParam{nu};
  }

  [[nodiscard]] std::vector<double> alphas() const {
    if (!alpha_grid.empty()) return alpha_grid;
    std::vector<double> out;
    for (double a : alpha_range(0.05, 0.95, 0.01)) {
      if (!restriction || restriction->contains(a)) out.push_back(a);
    }
    if (out.empty()) throw DomainError("SimConfig: alpha grid is empty after restriction");
    return out;
  }
};

struct MethodReport {
  std::string method;
  std::vector<double> mean_coverage;  // per alpha
  std::vector<double> sd_coverage;    // per alpha, across replications
  std::vector<double> mean_width;     // per alpha; threshold value in uniform mode
  std::vector<double> width_ratio;    // per alpha; NaN when no oracle
  std::vector<double> mean_q_hat;     // per alpha
  std::vector<std::uint8_t> simultaneous;  // per replication
  std::size_t simultaneous_count = 0;
  double simultaneity_rate = 0.0;
};

struct EvalReport {
  SimConfig config;
  std::vector<double> alphas;
  std::map<std::string, double> kappa;  // band quantile per method
  std::vector<MethodReport> methods;

  [[nodiscard]] const MethodReport& method(const std::string& name) const {
    for (const auto& m : methods) {
      if (m.method == name) return m;
    }
    throw DomainError("EvalReport: no method " + name);
  }
};

namespace detail {

inline bool is_band_method(const std::string& m) {
  return m == "dkw" || m == "dw" || m == "bjo" || m == "ad" || m == "eicker" || m == "rw";
}

// Band quantiles and data-independent band profiles for one calibration size.
struct BandCache {
  std::map<std::string, double> kappa;
  std::map<std::string, BandProfile> profile;  // not for rw (depends on ties)
};

inline BandCache prepare_bands(const SimConfig& cfg) {
  BandCache cache;
  const std::size_t m = cfg.n_cal;
  const std::optional<AlphaInterval> r = cfg.restrict_statistic ? cfg.restriction : std::nullopt;
  for (const auto& name : cfg.methods) {
    if (!is_band_method(name)) continue;
    const BandMethod bm = parse_band_method(name);
    if (bm == BandMethod::kDKW) {
      cache.kappa[name] = dkw_epsilon(m, cfg.delta);
      cache.profile[name] = dkw_profile(m, cfg.delta);
      continue;
    }
    StatisticSpec spec;
    spec.statistic = calibrating_statistic(bm);
    spec.m = m;
    spec.nu = NuParam(cfg.nu);
    if (bm != BandMethod::kRW) spec.restriction = r;
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(spec.statistic), Stream::kMonteCarlo);
    const double kappa = mc_quantile(spec, cfg.delta, cfg.mc_reps, s, cfg.threads);
    cache.kappa[name] = kappa;
    switch (bm) {
      case BandMethod::kDW: cache.profile[name] = dw_profile(m, NuParam(cfg.nu), kappa, r); break;
      case BandMethod::kBJO: cache.profile[name] = bjo_profile(m, kappa, r); break;
      case BandMethod::kAD: cache.profile[name] = ad_profile(m, kappa, r); break;
      case BandMethod::kEicker: cache.profile[name] = eicker_profile(m, kappa, r); break;
      default: break;
    }
  }
  return cache;
}

// Threshold index (1..m, or m + 1 for +inf) for each alpha.
inline std::vector<std::size_t> method_indices(const std::string& name, const BandCache& cache,
                                               const ScoreSet& cal, std::span<const double> alphas,
                                               double delta) {
  const std::size_t m = cal.m();
  std::vector<std::size_t> idx;
  if (name == "split") {
    for (double a : alphas) idx.push_back(std::min(split_index(m, a), m + 1));
    return idx;
  }
  if (name == "vovk") {
    for (double a : alphas) idx.push_back(vovk_pac_index(m, a, delta));
    return idx;
  }
  std::vector<double> lower;
  if (name == "rw") {
    const auto res = rw_band(cal, delta, cache.kappa.at(name), false);
    lower = res.band.lower;
  } else {
    lower = cache.profile.at(name).lower;
  }
  for (double a : alphas) idx.push_back(first_index_at_level(lower, 1.0 - a));
  return idx;
}

}  // namespace detail

/// Runs all replications and aggregates coverage, width, and simultaneity.
inline EvalReport evaluate_methods(const SimConfig& cfg) {
  cfg.validate();
  EvalReport report;
  report.config = cfg;
  report.alphas = cfg.alphas();
  const auto& alphas = report.alphas;
  const std::size_t na = alphas.size();
  const std::size_t nm = cfg.methods.size();
  const auto cache = detail::prepare_bands(cfg);
  report.kappa = cache.kappa;

  std::optional<OracleWidthTable> oracle;
  if (cfg.mode == HarnessMode::kSimulation) oracle.emplace(alphas);

  // cov[method][rep][alpha], width likewise.
  using Grid = std::vector<std::vector<std::vector<double>>>;
  Grid cov(nm, std::vector<std::vector<double>>(cfg.reps, std::vector<double>(na)));
  Grid width = cov;
  Grid ratio = cov;
  Grid qhat = cov;

  auto run_rep = [&](std::size_t rep, unsigned) {
    try {
      const std::uint64_t rep_seed = derive_seed(cfg.seed, rep, Stream::kData);
      if (cfg.mode == HarnessMode::kUniform) {
        auto eng = make_engine(rep_seed, 0, Stream::kData);
        std::vector<double> u(cfg.n_cal);
        for (auto& v : u) v = uniform_open(eng);
        const ScoreSet cal(std::move(u));
        for (std::size_t mi = 0; mi < nm; ++mi) {
          const auto idx = detail::method_indices(cfg.methods[mi], cache, cal, alphas, cfg.delta);
          for (std::size_t a = 0; a < na; ++a) {
            const double q = idx[a] <= cal.m() ? cal.order_stat(idx[a]) : kInf;
            // Unif(0,1) scores: coverage of {s <= q} is clip(q, 0, 1).
            cov[mi][rep][a] = std::clamp(q, 0.0, 1.0);
            width[mi][rep][a] = q;
            qhat[mi][rep][a] = q;
            ratio[mi][rep][a] = kMissing;
          }
        }
        return;
      }

      const std::size_t n_fit = cfg.n_train + cfg.n_cal;
      const Sample all = simulate_dataset(n_fit, derive_seed(rep_seed, 0, Stream::kData));
      const Sample test = simulate_dataset(cfg.n_test, derive_seed(rep_seed, 1, Stream::kData));
      const auto split = split_data(n_fit, static_cast<double>(cfg.n_cal) / static_cast<double>(n_fit),
                                    derive_seed(cfg.seed, rep, Stream::kSplit));
      Sample train;
      for (std::size_t i : split.train_idx) {
        train.x.push_back(all.x[i]);
        train.y.push_back(all.y[i]);
      }
      std::optional<KnnConditionalCdf> knn;
      if (cfg.score_model == ScoreModel::kKnn) knn.emplace(train, std::min(cfg.k, train.size()));

      auto score_of = [&](double x, double y) {
        return dcp_score(knn ? (*knn)(x, y) : true_conditional_cdf(x, y));
      };
      std::vector<double> cal_scores;
      cal_scores.reserve(split.cal_idx.size());
      for (std::size_t i : split.cal_idx) cal_scores.push_back(score_of(all.x[i], all.y[i]));
      const ScoreSet cal(std::move(cal_scores));

      std::vector<std::vector<double>> test_nb;
      std::vector<double> test_scores(cfg.n_test);
      for (std::size_t i = 0; i < cfg.n_test; ++i) {
        if (knn) {
          test_nb.push_back(knn->neighbors(test.x[i]));
          test_scores[i] = dcp_score(KnnConditionalCdf::cdf_from_neighbors(test_nb.back(), test.y[i]));
        } else {
          test_scores[i] = dcp_score(true_conditional_cdf(test.x[i], test.y[i]));
        }
      }
      std::vector<double> sorted_test = test_scores;
      std::sort(sorted_test.begin(), sorted_test.end());

      std::vector<double> oracle_mean(na, 0.0);
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t i = 0; i < cfg.n_test; ++i) oracle_mean[a] += oracle->width(a, test.x[i]);
        oracle_mean[a] /= static_cast<double>(cfg.n_test);
      }

      auto mean_width = [&](double q) {
        if (q >= 0.5) return kInf;
        double total = 0.0;
        if (knn) {
          for (const auto& nb : test_nb) total += knn_dcp_width(nb, q);
        } else {
          const double level = 1.0 - 2.0 * q;
          const double lv[] = {level};
          const OracleWidthTable table(lv, 41);
          for (std::size_t i = 0; i < cfg.n_test; ++i) total += table.width(0, test.x[i]);
        }
        return total / static_cast<double>(cfg.n_test);
      };

      std::vector<double> train_scores;
      for (std::size_t mi = 0; mi < nm; ++mi) {
        const auto& name = cfg.methods[mi];
        std::vector<double> qs(na);
        if (name == "train_quantile") {
          if (train_scores.empty()) {
            for (std::size_t i = 0; i < train.size(); ++i) train_scores.push_back(score_of(train.x[i], train.y[i]));
            std::sort(train_scores.begin(), train_scores.end());
          }
          const auto nt = static_cast<double>(train_scores.size());
          for (std::size_t a = 0; a < na; ++a) {
            const double x = nt * (1.0 - alphas[a]);
            const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(x - 1e-12 * x)), 1,
                                                   train_scores.size());
            qs[a] = train_scores[k - 1];
          }
        } else {
          const auto idx = detail::method_indices(name, cache, cal, alphas, cfg.delta);
          for (std::size_t a = 0; a < na; ++a) qs[a] = idx[a] <= cal.m() ? cal.order_stat(idx[a]) : kInf;
        }
        std::map<double, double> width_memo;
        for (std::size_t a = 0; a < na; ++a) {
          const double q = qs[a];
          const auto covered = std::upper_bound(sorted_test.begin(), sorted_test.end(), q) - sorted_test.begin();
          cov[mi][rep][a] = static_cast<double>(covered) / static_cast<double>(cfg.n_test);
          auto it = width_memo.find(q);
          if (it == width_memo.end()) it = width_memo.emplace(q, mean_width(q)).first;
          width[mi][rep][a] = it->second;
          ratio[mi][rep][a] = it->second / oracle_mean[a];
          qhat[mi][rep][a] = q;
        }
      }
    } catch (const DomainError& e) {
      throw DomainError("replication " + std::to_string(rep) + ": " + e.what());
    } catch (const std::exception& e) {
      throw NumericalError("replication " + std::to_string(rep) + ": " + e.what());
    }
  };
  parallel_for(cfg.reps, cfg.threads, run_rep);

  for (std::size_t mi = 0; mi < nm; ++mi) {
    MethodReport mr;
    mr.method = cfg.methods[mi];
    mr.mean_coverage.assign(na, 0.0);
    mr.sd_coverage.assign(na, 0.0);
    mr.mean_width.assign(na, 0.0);
    mr.width_ratio.assign(na, 0.0);
    mr.mean_q_hat.assign(na, 0.0);
    const auto reps = static_cast<double>(cfg.reps);
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      bool all_ok = true;
      for (std::size_t a = 0; a < na; ++a) {
        const double c = cov[mi][rep][a];
        if (c < 1.0 - alphas[a]) all_ok = false;
        mr.mean_coverage[a] += c / reps;
        mr.mean_width[a] += width[mi][rep][a] / reps;
        mr.width_ratio[a] += ratio[mi][rep][a] / reps;
        mr.mean_q_hat[a] += qhat[mi][rep][a] / reps;
      }
      mr.simultaneous.push_back(all_ok ? 1 : 0);
      mr.simultaneous_count += all_ok ? 1 : 0;
    }
    for (std::size_t a = 0; a < na; ++a) {
      double ss = 0.0;
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
        const double d = cov[mi][rep][a] - mr.mean_coverage[a];
        ss += d * d;
      }
      mr.sd_coverage[a] = cfg.reps > 1 ? std::sqrt(ss / (reps - 1.0)) : 0.0;
    }
    mr.simultaneity_rate = static_cast<double>(mr.simultaneous_count) / reps;
    report.methods.push_back(std::move(mr));
  }
  return report;
}

}  // namespace simconf
