#include <atomic>
#include <cmath>

#include "catch_amalgamated.hpp"
#include "simconf/quantile.hpp"

using namespace simconf;
using Catch::Approx;

namespace {

StatisticSpec spec_of(Statistic s, std::size_t m) {
  StatisticSpec spec;
  spec.statistic = s;
  spec.m = m;
  return spec;
}

}  // namespace

TEST_CASE("conservative quantile picks the ceil(B(1-delta))-th order statistic") {
  std::vector<double> v;
  for (int i = 10; i >= 1; --i) v.push_back(i);
  CHECK(conservative_quantile(v, 0.1) == 9.0);
  CHECK(conservative_quantile(v, 0.05) == 10.0);
  CHECK(conservative_quantile(v, 0.5) == 5.0);
  CHECK(conservative_quantile(v, 0.99) == 1.0);
  CHECK(conservative_quantile(std::vector<double>{3.5}, 0.2) == 3.5);
  CHECK_THROWS_AS(conservative_quantile(std::vector<double>{}, 0.1), DomainError);
  CHECK_THROWS_AS(conservative_quantile(v, 1.0), DomainError);
}

TEST_CASE("KS quantile respects the Massart bound") {
  const double k = mc_quantile(spec_of(Statistic::kKS, 500), 0.05, 100000, 11);
  CHECK(k <= std::sqrt(std::log(2.0 / 0.05) / 2.0));
  CHECK(k > 1.2);  // close to the asymptotic 1.358
}

TEST_CASE("one replication gives the simulated value itself") {
  const auto spec = spec_of(Statistic::kDW, 30);
  const auto v = simulate_statistic(spec, 1, 5, 1);
  CHECK(mc_quantile(spec, 0.1, 1, 5, 1) == v[0]);
  // independent recomputation of replication 0
  auto eng = make_engine(5, 0, Stream::kMonteCarlo);
  const auto u = sorted_uniforms(eng, 30);
  CHECK(v[0] == dw_statistic(u, NuParam()));
}

TEST_CASE("simulation is deterministic and thread-count independent") {
  for (auto s : {Statistic::kDW, Statistic::kBJO, Statistic::kAD, Statistic::kEicker, Statistic::kKS, Statistic::kRW}) {
    const auto spec = spec_of(s, 64);
    const auto a = simulate_statistic(spec, 300, 42, 1);
    const auto b = simulate_statistic(spec, 300, 42, 3);
    const auto c = simulate_statistic(spec, 300, 42, 1);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a != simulate_statistic(spec, 300, 43, 1));
  }
}

TEST_CASE("quantile calibrates the statistic on fresh samples") {
  const auto spec = spec_of(Statistic::kDW, 100);
  const double delta = 0.1;
  const double kappa = mc_quantile(spec, delta, 20000, 1);
  const auto fresh = simulate_statistic(spec, 20000, 2);
  double below = 0.0;
  for (double v : fresh) below += v <= kappa ? 1.0 : 0.0;
  const double rate = below / 20000.0;
  // two independent estimates of the same probability
  const double sd = std::sqrt(2.0 * delta * (1.0 - delta) / 20000.0);
  CHECK(std::abs(rate - (1.0 - delta)) <= 4.0 * sd);
}

TEST_CASE("quantile table entries are monotone in delta") {
  const auto spec = spec_of(Statistic::kBJO, 50);
  const double deltas[] = {0.01, 0.05, 0.1, 0.2};
  const auto t = mc_quantile_table(spec, deltas, 5000, 9);
  CHECK(t.entries.size() == 4);
  CHECK(t.at(0.01) >= t.at(0.05));
  CHECK(t.at(0.05) >= t.at(0.1));
  CHECK(t.at(0.1) >= t.at(0.2));
  CHECK(t.reps == 5000);
  CHECK(!t.low_reps());
  CHECK_THROWS_AS(t.at(0.3), DomainError);
  CHECK(mc_quantile_table(spec, deltas, 10, 9).low_reps());
}

TEST_CASE("restricted statistics are stochastically smaller") {
  auto spec = spec_of(Statistic::kDW, 100);
  const auto full = simulate_statistic(spec, 500, 3, 1);
  spec.restriction = AlphaInterval(0.0, 0.5);
  const auto part = simulate_statistic(spec, 500, 3, 1);
  for (std::size_t r = 0; r < 500; ++r) CHECK(part[r] <= full[r] + 1e-12);
}

TEST_CASE("invalid specifications") {
  auto ks = spec_of(Statistic::kKS, 50);
  ks.restriction = AlphaInterval(0.0, 0.5);
  CHECK_THROWS_AS(simulate_statistic(ks, 10, 1), DomainError);
  auto rw = spec_of(Statistic::kRW, 50);
  rw.restriction = AlphaInterval(0.0, 0.5);
  CHECK_THROWS_AS(simulate_statistic(rw, 10, 1), DomainError);
  CHECK_THROWS_AS(simulate_statistic(spec_of(Statistic::kDW, 0), 10, 1), DomainError);
  CHECK_THROWS_AS(simulate_statistic(spec_of(Statistic::kDW, 10), 0, 1), DomainError);
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](std::size_t r, unsigned) { hits[r]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](std::size_t r, unsigned) {
                                 if (r == 57) throw NumericalError("boom");
                               }),
                  NumericalError);
}

TEST_CASE("spec equality uses the default nu") {
  auto a = spec_of(Statistic::kDW, 10);
  auto b = a;
  b.nu = NuParam(1.5);
  CHECK(a == b);
  b.nu = NuParam(2.0);
  CHECK(!(a == b));
}
