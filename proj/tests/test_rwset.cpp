#include <cmath>
#include <set>

#include "catch_amalgamated.hpp"
#include "oracles/reference.hpp"
#include "simconf/bands.hpp"
#include "simconf/difference_constraints.hpp"
#include "simconf/rng.hpp"
#include "simconf/rwset.hpp"

using namespace simconf;
using Catch::Approx;

namespace {

// Straight enumeration of the sparse family over D = {1..n-1}.
std::set<std::pair<std::uint32_t, std::uint32_t>> brute_family(std::size_t n) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  const double nd = static_cast<double>(n);
  const int l_max = static_cast<int>(std::floor(std::log2(nd / std::log(nd))));
  for (int l = 2; l <= l_max; ++l) {
    const double ml = nd / std::pow(2.0, l);
    const auto dl = static_cast<std::size_t>(std::ceil(ml / (6.0 * std::sqrt(double(l)))));
    for (std::size_t j = 1; j < n; ++j) {
      if ((j - 1) % dl != 0) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if ((k - 1) % dl != 0) continue;
        const double gap = static_cast<double>(k - j);
        if (gap > ml && gap < 2.0 * ml) out.emplace(j, k);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("level arithmetic") {
  CHECK(rw_l_max(1024) == 7);
  const auto f = build_family(1024, false);
  CHECK(f.l_max == 7);
  REQUIRE(!f.levels.empty());
  CHECK(f.levels[0].l == 2);
  CHECK(f.levels[0].m_l == 256.0);
  CHECK(f.levels[0].d_l == 31);
  CHECK(f.levels.size() == 6);
}

TEST_CASE("sparse family matches brute-force enumeration") {
  for (std::size_t n : {40u, 100u, 257u, 1024u}) {
    const auto f = build_family(n, false);
    const auto expect = brute_family(n);
    CHECK(f.intervals.size() == expect.size());
    std::set<std::pair<std::uint32_t, std::uint32_t>> got(f.intervals.begin(), f.intervals.end());
    CHECK(got == expect);
    CHECK(std::is_sorted(f.intervals.begin(), f.intervals.end()));
  }
}

TEST_CASE("all-intervals family") {
  const auto f = build_family(10, true);
  CHECK(f.intervals.size() == 36);
  for (const auto& [j, k] : f.intervals) {
    CHECK(j >= 1);
    CHECK(j < k);
    CHECK(k <= 9);
  }
}

TEST_CASE("ties shrink the index set") {
  const ScoreSet s({0.1, 0.2, 0.2, 0.3, 0.4, 0.4, 0.4, 0.5});
  const auto f = build_family(s, true);
  // D = {1, 3, 4, 7}
  CHECK(f.intervals.size() == 6);
  for (const auto& [j, k] : f.intervals) {
    CHECK(j != 2);
    CHECK(k != 5);
    CHECK(k != 6);
  }
  CHECK(build_family(ScoreSet({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), true).intervals.size() == 36);
}

TEST_CASE("tiny samples give an empty family") {
  CHECK_THROWS_AS(build_family(5, false), DomainError);
  CHECK_THROWS_AS(build_family(ScoreSet({1.0, 1.0, 1.0}), true), DomainError);
  CHECK_THROWS_AS(build_family(1, true), DomainError);
}

TEST_CASE("penalty") {
  CHECK(rw_penalty(0.5) == Approx(2.0 * (1.0 + 2.0 * std::log(2.0))));
  CHECK(rw_penalty(0.3) == Approx(2.0 * std::log(std::exp(1.0) / 0.21)));
  CHECK_THROWS_AS(rw_penalty(0.0), DomainError);
}

TEST_CASE("RW statistic closed-form cases") {
  const std::size_t n = 100;
  const auto fam = build_family(n, true);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (static_cast<double>(i) + 0.5) / n;
  // F(I) = F_n(I) everywhere: the best interval is the one closest to half mass
  CHECK(rw_statistic(u, fam) == Approx(-std::sqrt(rw_penalty(0.5))).epsilon(1e-9));

  const std::size_t d[] = {10, 40};
  const auto single = build_family(n, d, true);
  REQUIRE(single.intervals.size() == 1);
  // U_(10) = 0.2 and U_(40) = 0.7, still sorted
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1);
    u[i] = x <= 10 ? 0.02 * x : (x <= 40 ? 0.2 + (x - 10) / 60.0 : 0.7 + (x - 40) * 0.29 / 60.0);
  }
  const double expect = std::sqrt(200.0 * kl_bernoulli(0.5, 0.3)) - std::sqrt(rw_penalty(0.3));
  CHECK(rw_statistic(u, single) == Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(rw_statistic(std::vector<double>(50, 0.5), fam), DomainError);
}

TEST_CASE("kl_ball against a grid") {
  const double b = 0.5;
  const double thr = std::pow(1.0 + std::sqrt(rw_penalty(0.5)), 2) / 200.0;
  const auto [lo, hi] = kl_ball(b, thr);
  const auto ok = [&](double h) { return kl_bernoulli(h, b) <= thr; };
  CHECK(lo == Approx(oracle::grid_first_feasible(b, 1e-7, ok)).margin(2e-7));
  CHECK(hi == Approx(oracle::grid_last_feasible(b, 1e-7, ok)).margin(2e-7));
  CHECK(kl_bernoulli(lo, b) >= thr);  // rounded outward
  CHECK(kl_bernoulli(hi, b) >= thr);
  const auto [l0, h0] = kl_ball(0.3, 0.0);
  CHECK(l0 == 0.3);
  CHECK(h0 == 0.3);
}

TEST_CASE("interval bounds contain the empirical mass") {
  const auto fam = build_family(200, false);
  const auto b = interval_bounds(fam, 1.5);
  REQUIRE(b.lower.size() == fam.intervals.size());
  for (std::size_t i = 0; i < fam.intervals.size(); ++i) {
    const double fn = (fam.intervals[i].second - fam.intervals[i].first) / 200.0;
    CHECK(b.lower[i] <= fn);
    CHECK(b.upper[i] >= fn);
  }
  // kappa + sqrt(c) <= 0 collapses every interval
  const auto z = interval_bounds(fam, -100.0);
  for (std::size_t i = 0; i < fam.intervals.size(); ++i) CHECK(z.lower[i] == z.upper[i]);
}

TEST_CASE("difference constraints by hand") {
  DifferenceSystem sys(2);
  sys.add_range(1, 2, 0.3, 0.4);
  const auto r = solve_ranges(sys);
  CHECK(r.lo[2] == Approx(0.3));
  CHECK(r.hi[1] == Approx(0.7));
  CHECK(r.lo[1] == 0.0);
  CHECK(r.hi[2] == 1.0);

  const auto empty = solve_ranges(DifferenceSystem(4));
  for (std::size_t i = 1; i <= 4; ++i) {
    CHECK(empty.lo[i] == 0.0);
    CHECK(empty.hi[i] == 1.0);
  }

  DifferenceSystem bad(2);
  bad.add_range(1, 2, 0.5, 0.6);
  bad.add_range(2, 1, 0.5, 0.6);
  CHECK_THROWS_AS(solve_ranges(bad), InfeasibleError);
}

TEST_CASE("difference constraints against the simplex oracle") {
  auto eng = make_engine(21, 0, Stream::kTest);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 25;
    const auto sys = oracle::random_feasible_system(n, 60, eng);
    const auto sp = solve_ranges(sys);
    const auto lp = oracle::lp_ranges(sys);
    REQUIRE(lp.feasible);
    for (std::size_t i = 1; i <= n; ++i) {
      CHECK(sp.lo[i] == Approx(lp.lo[i]).margin(1e-9));
      CHECK(sp.hi[i] == Approx(lp.hi[i]).margin(1e-9));
    }
  }
}

TEST_CASE("RW band contains the ECDF and is well shaped") {
  auto eng = make_engine(8, 0, Stream::kTest);
  for (int t = 0; t < 5; ++t) {
    const ScoreSet s(sorted_uniforms(eng, 150));
    for (bool all : {false, true}) {
      const auto res = rw_band(s, 0.1, 1.2, all);
      const auto& b = res.band;
      CHECK(b.method == BandMethod::kRW);
      CHECK(b.lower[0] == 0.0);
      CHECK(b.upper[150] == 1.0);
      for (std::size_t j = 0; j <= 150; ++j) {
        CHECK(b.lower[j] <= j / 150.0 + 1e-12);
        CHECK(b.upper[j] >= j / 150.0 - 1e-12);
        if (j > 0) CHECK(b.lower[j] >= b.lower[j - 1]);
      }
    }
  }
}

TEST_CASE("RW band with ties keeps tied order statistics equal") {
  std::vector<double> v;
  for (int i = 0; i < 120; ++i) v.push_back(std::floor(i / 3.0));
  const ScoreSet s(v);
  const auto res = rw_band(s, 0.1, 1.0, true);
  const auto ranges = solve_ranges(rw_constraint_system(res.bounds, s.sorted()));
  for (std::size_t i = 1; i < 120; ++i) {
    if (s.sorted()[i - 1] == s.sorted()[i]) {
      CHECK(ranges.lo[i] == Approx(ranges.lo[i + 1]).margin(1e-12));
      CHECK(ranges.hi[i] == Approx(ranges.hi[i + 1]).margin(1e-12));
    }
  }
  CHECK(pointwise_band_lp(res.bounds, BandSide::kLower, s.sorted()) == ranges.lo);
}
