// Calibrates DKW and DW bands on exponential scores and prints the
// simultaneous threshold curve next to split conformal.

#include <cstdio>
#include <random>
#include <vector>

#include "simconf/simconf.hpp"

int main() {
  using namespace simconf;
  const std::size_t m = 500;
  const double delta = 0.1;
  const std::uint64_t seed = 2024;

  auto eng = make_engine(seed, 0, Stream::kData);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> raw(m);
  for (auto& v : raw) v = ex(eng);
  const ScoreSet scores(raw);

  StatisticSpec spec;
  spec.statistic = Statistic::kDW;
  spec.m = m;
  const double kappa = mc_quantile(spec, delta, 20000, derive_seed(seed, 1, Stream::kMonteCarlo),
                                   default_threads());

  const auto dkw = dkw_band(scores, delta);
  const auto dw = dw_band(scores, delta, NuParam(1.5), kappa);
  const auto alphas = alpha_range(0.05, 0.5, 0.05);
  const auto c_dkw = threshold_curve(dkw, alphas);
  const auto c_dw = threshold_curve(dw, alphas);

  std::printf("DW kappa = %.4f (m = %zu, delta = %.2f)\n", kappa, m, delta);
  std::printf("%6s %10s %10s %10s %10s\n", "alpha", "split", "dkw", "dw", "true");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    std::printf("%6.2f %10.4f %10.4f %10.4f %10.4f\n", a, split_threshold(scores, a), c_dkw.q_hat[i],
                c_dw.q_hat[i], -std::log(a));
  }
  return 0;
}
