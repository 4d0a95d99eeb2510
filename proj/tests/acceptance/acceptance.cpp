// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/reference.hpp"
#include "simconf/simconf.hpp"

using namespace simconf;

namespace {

constexpr std::size_t kBandReps = 100000;  // Monte Carlo replications for band quantiles
constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double kappa_for(Statistic s, std::size_t m, double delta, std::uint64_t salt,
                 std::optional<AlphaInterval> r = std::nullopt, bool all_intervals = false) {
  StatisticSpec spec;
  spec.statistic = s;
  spec.m = m;
  spec.nu = NuParam(1.5);
  spec.restriction = r;
  spec.all_intervals = all_intervals;
  return mc_quantile(spec, delta, kBandReps, derive_seed(kSeed, salt), default_threads());
}

// 1 and 2 share the uniform exact-coverage experiment.
EvalReport uniform_experiment() {
  SimConfig cfg;
  cfg.mode = HarnessMode::kUniform;
  cfg.n_cal = 500;
  cfg.reps = 2000;
  cfg.delta = 0.1;
  cfg.methods = {"dkw", "dw", "split"};
  cfg.seed = kSeed + 1;
  cfg.mc_reps = kBandReps;
  cfg.threads = default_threads();
  return evaluate_methods(cfg);
}

void criterion1(const EvalReport& r, Outcome& o) {
  const double thr = 0.90 - 3.0 * std::sqrt(0.09 / 2000.0);
  for (const char* name : {"dkw", "dw"}) {
    const auto& m = r.method(name);
    o.pass = o.pass && m.simultaneity_rate >= thr;
    o.detail << name << " rate=" << fmt(m.simultaneity_rate) << " ";
  }
  o.detail << "(threshold " << fmt(thr) << ")";
}

void criterion2(const EvalReport& r, Outcome& o) {
  const auto& s = r.method("split");
  o.pass = s.simultaneity_rate < 0.5;
  o.detail << "split rate=" << fmt(s.simultaneity_rate) << " (<0.5)";
  double worst = 0.0;
  std::size_t bad = 0;
  double worst_vs_exact = 0.0;
  for (std::size_t a = 0; a < r.alphas.size(); ++a) {
    const double target = 1.0 - r.alphas[a];
    const double z = std::abs(s.mean_coverage[a] - target) / s.sd_coverage[a];
    worst = std::max(worst, z);
    if (z > 3.0) ++bad;
    // Informational: standard error of the mean against the exact expectation k/(m+1).
    const std::size_t k = split_index(500, r.alphas[a]);
    const double exact = std::min(1.0, static_cast<double>(k) / 501.0);
    const double se = s.sd_coverage[a] / std::sqrt(2000.0);
    worst_vs_exact = std::max(worst_vs_exact, std::abs(s.mean_coverage[a] - exact) / se);
  }
  o.pass = o.pass && bad == 0;
  o.detail << "; max |mean cov - (1-alpha)|/sd=" << fmt(worst, 3)
           << "; info: max |mean - k/(m+1)|/se=" << fmt(worst_vs_exact, 3);
}

struct CurveSetup {
  std::size_t m = 1000;
  double delta = 0.1;
  StepBand dkw, dw;
  std::vector<double> alphas;
};

CurveSetup curve_setup() {
  CurveSetup c;
  auto eng = make_engine(kSeed, 3, Stream::kTest);
  const ScoreSet scores(sorted_uniforms(eng, c.m));
  c.dkw = dkw_band(scores, c.delta);
  const double k = kappa_for(Statistic::kDW, c.m, c.delta, 3);
  c.dw = dw_band(scores, c.delta, NuParam(1.5), k);
  for (int i = 1; i <= 19; ++i) c.alphas.push_back(0.05 * i);
  return c;
}

void criterion3(const CurveSetup& c, Outcome& o) {
  std::size_t checked = 0;
  double min_gap = kInf;
  for (const StepBand* b : {&c.dkw, &c.dw}) {
    const auto curve = threshold_curve(*b, c.alphas);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (!curve.finite(i)) continue;
      const double cov = exact_marginal_coverage(curve.j_alpha[i], c.m, curve.alphas[i]);
      const double gap = cov - (1.0 - curve.kappa_alpha[i]);
      min_gap = std::min(min_gap, gap);
      if (!(gap >= 0.0)) {
        o.pass = false;
        o.detail << to_string(b->method) << "@alpha=" << curve.alphas[i] << " fails; ";
      }
      ++checked;
    }
  }
  o.detail << checked << " (method, alpha) pairs; min margin=" << fmt(min_gap, 4);
}

void criterion4(const CurveSetup& c, Outcome& o) {
  double min_dkw = kInf, min_dw = kInf;
  const double dw_floor = kappa_dw_floor(*c.dw.kappa);
  for (const StepBand* b : {&c.dkw, &c.dw}) {
    const auto curve = simultaneous_thresholds(*b, c.alphas);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (!curve.finite(i)) continue;
      const double cov = exact_marginal_coverage(curve.j_alpha[i], c.m, curve.alphas[i]);
      if (b->method == BandMethod::kDKW) {
        min_dkw = std::min(min_dkw, cov);
        o.pass = o.pass && cov >= kappa_dkw_floor(c.delta);
      } else {
        min_dw = std::min(min_dw, cov);
        o.pass = o.pass && cov >= dw_floor;
      }
    }
  }
  o.detail << "DKW min=" << fmt(min_dkw) << " (>= " << kappa_dkw_floor(c.delta) << "), DW min="
           << fmt(min_dw) << " (>= " << fmt(dw_floor) << ")";
}

void criterion5(Outcome& o) {
  const auto alphas = alpha_range(0.01, 0.99, 0.01);
  std::size_t checks = 0;
  double worst = -kInf;  // max of R - bound
  for (std::size_t m : {100u, 500u}) {
    StatisticSpec spec;
    spec.statistic = Statistic::kDW;
    spec.m = m;
    spec.nu = NuParam(1.5);
    const double deltas[] = {0.05, 0.1};
    const auto table = mc_quantile_table(spec, deltas, kBandReps, derive_seed(kSeed, 5 + m), default_threads());
    for (double delta : deltas) {
      const auto dw_prof = dw_profile(m, NuParam(1.5), table.at(delta));
      for (std::size_t rep = 0; rep < 100; ++rep) {
        auto eng = make_engine(derive_seed(kSeed, m * 1000 + rep), static_cast<std::uint64_t>(delta * 1000),
                               Stream::kTest);
        std::vector<double> v(m);
        std::exponential_distribution<double> ex(1.0);
        for (auto& x : v) x = ex(eng);
        const ScoreSet scores(v);
        const auto dkw = dkw_band(scores, delta);
        auto dw = band_from_profile(dw_prof, scores, BandMethod::kDW, delta);
        for (const StepBand* b : {&dkw, static_cast<const StepBand*>(&dw)}) {
          auto curve = simultaneous_thresholds(*b, alphas);
          residual_bound(*b, curve);
          for (std::size_t i = 0; i < curve.size(); ++i) {
            if (!curve.finite(i)) continue;
            const double lim = b->method == BandMethod::kDKW ? dkw_residual_limit(m, delta)
                                                             : dw_residual_limit(*b, curve.j_alpha[i]);
            worst = std::max(worst, curve.r_bound[i] - lim);
            if (!(curve.r_bound[i] <= lim)) o.pass = false;
            ++checks;
          }
        }
      }
    }
  }
  o.detail << checks << " checks; max(R - bound)=" << fmt(worst, 4);
}

void criterion6(Outcome& o) {
  const std::size_t m = 100;
  const double delta = 0.05;
  const double k = kappa_for(Statistic::kDW, m, delta, 6);
  const auto dw = dw_profile(m, NuParam(1.5), k);
  const auto dkw = dkw_profile(m, delta);
  const double eps = dkw_epsilon(m, delta);
  o.pass = dw.upper[0] < eps;
  o.detail << "kappa=" << fmt(k) << " u0_DW=" << fmt(dw.upper[0]) << " eps_DKW=" << fmt(eps);
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, m - 1, m}) {
    const double wd = dw.upper[j] - dw.lower[j];
    const double wk = dkw.upper[j] - dkw.lower[j];
    o.pass = o.pass && wd < wk;
    o.detail << " j=" << j << ":" << fmt(wd, 4) << "<" << fmt(wk, 4);
  }
}

void criterion7(Outcome& o) {
  const std::size_t m = 200;
  const double delta = 0.1;
  const std::size_t samples = 5000;
  const double limit = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / samples);
  std::vector<std::pair<std::string, BandProfile>> profiles;
  profiles.emplace_back("dkw", dkw_profile(m, delta));
  profiles.emplace_back("dw", dw_profile(m, NuParam(1.5), kappa_for(Statistic::kDW, m, delta, 71)));
  profiles.emplace_back("bjo", bjo_profile(m, kappa_for(Statistic::kBJO, m, delta, 72)));
  profiles.emplace_back("ad", ad_profile(m, kappa_for(Statistic::kAD, m, delta, 73)));
  profiles.emplace_back("eicker", eicker_profile(m, kappa_for(Statistic::kEicker, m, delta, 74)));
  // Without ties the RW bounds depend only on interval counts, so the band
  // values are the same for every sample.
  const auto rw_bounds = interval_bounds(build_family(m, false), kappa_for(Statistic::kRW, m, delta, 75));
  profiles.emplace_back("rw", rw_profile(rw_bounds));

  std::vector<std::size_t> misses(profiles.size(), 0);
  for (std::size_t s = 0; s < samples; ++s) {
    auto eng = make_engine(kSeed, 700000 + s, Stream::kTest);
    const ScoreSet scores(sorted_uniforms(eng, m));
    if (scores.has_ties()) throw std::runtime_error("unexpected ties in a uniform sample");
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      const auto band = band_from_profile(profiles[p].second, scores, BandMethod::kDKW, delta);
      if (!covers_uniform_cdf(band)) ++misses[p];
    }
  }
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const double rate = static_cast<double>(misses[p]) / samples;
    o.pass = o.pass && rate <= limit;
    o.detail << profiles[p].first << "=" << fmt(rate, 4) << " ";
  }
  o.detail << "(limit " << fmt(limit, 5) << ")";
}

void criterion8(Outcome& o) {
  const std::size_t m = 100;
  const std::size_t reps = 10000;
  const NuParam nu(1.5);
  const std::vector<double> atoms = {0.0, 1.0, 2.0};
  const std::vector<double> cdf = {0.2, 0.7, 1.0};
  std::vector<double> disc(reps), cont(reps);
  std::size_t pointwise_violations = 0;
  std::vector<double> y(m);
  for (std::size_t r = 0; r < reps; ++r) {
    auto eng = make_engine(kSeed, 800000 + r, Stream::kTest);
    const auto u = sorted_uniforms(eng, m);
    // Y = G^{-1}(U): the appendix coupling with F the identity on (0, 1).
    for (std::size_t i = 0; i < m; ++i) {
      y[i] = u[i] <= cdf[0] ? atoms[0] : (u[i] <= cdf[1] ? atoms[1] : atoms[2]);
    }
    disc[r] = dw_statistic_discrete(y, atoms, cdf, nu);
    cont[r] = dw_statistic(u, nu);
    if (disc[r] > cont[r] + 1e-12) ++pointwise_violations;
  }
  std::vector<double> sorted_cont = cont;
  std::sort(sorted_cont.begin(), sorted_cont.end());
  for (double delta : {0.05, 0.1, 0.2}) {
    const double qd = conservative_quantile(disc, delta);
    const double qc = conservative_quantile(cont, delta);
    // Standard error of the order statistic from the binomial spread of its rank.
    const double s = std::sqrt(reps * delta * (1.0 - delta));
    const auto k = static_cast<double>(reps) * (1.0 - delta);
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(k - s)));
    const auto hi = static_cast<std::size_t>(std::min(double(reps - 1), std::ceil(k + s)));
    const double se = 0.5 * (sorted_cont[hi] - sorted_cont[lo]);
    o.pass = o.pass && qd <= qc + 2.0 * se;
    o.detail << "delta=" << delta << ": " << fmt(qd, 4) << "<=" << fmt(qc, 4) << "+2*" << fmt(se, 3) << "; ";
  }
  o.pass = o.pass && pointwise_violations == 0;
  o.detail << "coupled pointwise violations=" << pointwise_violations;
}

void criterion9(Outcome& o) {
  auto eng = make_engine(kSeed, 9, Stream::kTest);
  std::uniform_int_distribution<std::size_t> pick_n(2, 30);
  double worst = 0.0;
  std::size_t systems = 0;
  while (systems < 200) {
    const std::size_t n = pick_n(eng);
    const auto sys = oracle::random_feasible_system(n, 2 * n, eng);
    const auto sp = solve_ranges(sys);
    const auto lp = oracle::lp_ranges(sys);
    if (!lp.feasible) {
      o.pass = false;
      o.detail << "LP oracle reports infeasible; ";
      break;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      worst = std::max({worst, std::abs(sp.lo[i] - lp.lo[i]), std::abs(sp.hi[i] - lp.hi[i])});
    }
    ++systems;
  }
  o.pass = o.pass && worst <= 1e-9;
  o.detail << systems << " systems, max |SP - LP|=" << fmt(worst, 3) << "; ";

  const std::size_t m = 100;
  const double delta = 0.05;
  auto eng2 = make_engine(kSeed, 91, Stream::kTest);
  const ScoreSet scores(sorted_uniforms(eng2, m));
  const auto dw = dw_band(scores, delta, NuParam(1.5), kappa_for(Statistic::kDW, m, delta, 6));
  const double krw = kappa_for(Statistic::kRW, m, delta, 92, std::nullopt, true);
  const auto rw = rw_band(scores, delta, krw, true).band;
  std::size_t wider = 0;
  for (std::size_t j = 0; j <= m; ++j) wider += rw.width(j) >= dw.width(j) ? 1 : 0;
  const double frac = static_cast<double>(wider) / static_cast<double>(m + 1);
  o.pass = o.pass && frac >= 0.6;
  o.detail << "RW >= DW width at " << fmt(frac, 4) << " of indices (>= 0.6), kappa_RW=" << fmt(krw, 4);
}

void criterion10(Outcome& o) {
  SimConfig cfg;
  cfg.mode = HarnessMode::kSimulation;
  cfg.n_train = 2000;
  cfg.n_cal = 1000;
  cfg.n_test = 2000;
  cfg.reps = 100;
  cfg.delta = 0.1;
  cfg.restriction = AlphaInterval(0.0, 0.5);
  cfg.methods = {"dkw", "dw", "split", "train_quantile"};
  cfg.seed = kSeed + 10;
  cfg.mc_reps = kBandReps;
  cfg.threads = default_threads();
  const auto r = evaluate_methods(cfg);
  const auto& dkw = r.method("dkw");
  const auto& dw = r.method("dw");
  const auto& tq = r.method("train_quantile");
  o.pass = dkw.simultaneous_count >= 84 && dw.simultaneous_count >= 84;
  o.pass = o.pass && tq.simultaneous_count < dkw.simultaneous_count &&
           tq.simultaneous_count < dw.simultaneous_count;
  double min_ratio = kInf;
  std::size_t infinite = 0;
  for (const auto* mr : {&dkw, &dw}) {
    for (double w : mr->width_ratio) {
      min_ratio = std::min(min_ratio, w);
      infinite += std::isinf(w) ? 1 : 0;
      o.pass = o.pass && w >= 0.98;
    }
  }
  o.detail << "counts dkw=" << dkw.simultaneous_count << " dw=" << dw.simultaneous_count
           << " split=" << r.method("split").simultaneous_count << " train_quantile=" << tq.simultaneous_count
           << "; min width ratio=" << fmt(min_ratio, 4) << " (" << infinite << " infinite of "
           << 2 * r.alphas.size() << ")";
}

void criterion11(Outcome& o) {
  // (a) beta_cdf against Monte Carlo.
  auto eng = make_engine(kSeed, 11, Stream::kTest);
  std::uniform_int_distribution<int> shape(1, 40);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  double worst_beta = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int j = shape(eng);
    const int k = shape(eng);
    const double x = unit(eng);
    const double mc = oracle::beta_cdf_mc(j, k, x, 10000000, derive_seed(kSeed, 1100 + t));
    worst_beta = std::max(worst_beta, std::abs(beta_cdf(j, k, x) - mc));
  }
  o.pass = worst_beta <= 5e-4;

  // (b) closed forms against 50-digit arithmetic.
  double worst_mp = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double a = unit(eng);
    const double b = unit(eng);
    worst_mp = std::max(worst_mp, std::abs(kl_bernoulli(a, b) - oracle::kl_bernoulli_mp(a, b)));
    const auto c = dw_correction(a, NuParam(1.5));
    const auto r = oracle::dw_correction_mp(a, 1.5);
    worst_mp = std::max({worst_mp, std::abs(c.c - r.c), std::abs(c.d - r.d), std::abs(c.cu - r.cu)});
  }
  for (double tt : {1e-6, 1e-3, 0.01, 0.5 - 1e-4, 0.999}) {
    const auto c = dw_correction(tt, NuParam(1.5));
    worst_mp = std::max(worst_mp, std::abs(c.cu - oracle::dw_correction_mp(tt, 1.5).cu));
  }
  o.pass = o.pass && worst_mp <= 1e-12;

  // (c) DW inversion against a 1e-7 grid.
  std::uniform_int_distribution<std::size_t> pick_m(20, 400);
  std::uniform_real_distribution<double> pick_k(0.5, 6.0);
  double worst_inv = 0.0;
  const NuParam nu(1.5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = pick_m(eng);
    std::uniform_int_distribution<std::size_t> pick_j(0, m - 1);
    const std::size_t j = pick_j(eng);
    const double kappa = pick_k(eng);
    const double a = static_cast<double>(j) / static_cast<double>(m);
    const DwKernel kernel(m, nu);
    const double bis = invert_upper(kernel, j, kappa);
    const auto g = [&](double v) {
      if (v >= 1.0) return false;
      const double c = c_nu_pair(a, v, nu);
      return static_cast<double>(m) * kl_bernoulli(a, v) - c <= kappa;
    };
    const double grid = oracle::grid_last_feasible(a, 1e-7, g);
    worst_inv = std::max(worst_inv, std::abs(bis - grid));
  }
  o.pass = o.pass && worst_inv <= 1e-6;
  o.detail << "beta max|err|=" << fmt(worst_beta, 3) << " (<=5e-4); closed forms max|err|=" << fmt(worst_mp, 3)
           << " (<=1e-12); DW inversion max|err|=" << fmt(worst_inv, 3) << " (<=1e-6)";
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail.str() << " ("
              << fmt(secs, 3) << " s)" << std::endl;
  };

  std::optional<EvalReport> uniform;
  report(1, "simultaneity, exact-coverage mode", [&](Outcome& o) {
    uniform = uniform_experiment();
    criterion1(*uniform, o);
  });
  report(2, "split conformal lacks simultaneity", [&](Outcome& o) {
    if (!uniform) throw std::runtime_error("experiment of criterion 1 did not run");
    criterion2(*uniform, o);
  });
  std::optional<CurveSetup> curves;
  report(3, "fixed-alpha PAC levels vs exact coverage", [&](Outcome& o) {
    curves = curve_setup();
    criterion3(*curves, o);
  });
  report(4, "marginal coverage floors", [&](Outcome& o) {
    if (!curves) throw std::runtime_error("setup of criterion 3 did not run");
    criterion4(*curves, o);
  });
  report(5, "residual bounds", criterion5);
  report(6, "tail sharpness of DW vs DKW", criterion6);
  report(7, "band validity", criterion7);
  report(8, "stochastic dominance, discrete vs continuous DW", criterion8);
  report(9, "shortest paths vs LP, RW vs DW width", criterion9);
  report(10, "desk-scale simulation rerun", criterion10);
  report(11, "numerics", criterion11);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
