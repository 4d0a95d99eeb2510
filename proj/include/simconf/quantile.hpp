#pragma once

// Monte Carlo calibration of band statistics under Unif(0,1) scores.
//
// Replication r draws its sample from an engine seeded by (seed, r), so the
// simulated values do not depend on the number of threads or on scheduling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <thread>
#include <variant>
#include <vector>

#include "simconf/error.hpp"
#include "simconf/numerics.hpp"
#include "simconf/rng.hpp"
#include "simconf/rwset.hpp"
#include "simconf/statistics.hpp"

namespace simconf {

/// Which statistic to simulate and at which sample size.
struct StatisticSpec {
  Statistic statistic = Statistic::kDW;
  std::size_t m = 0;
  std::optional<NuParam> nu;                 // DW only; defaults to 3/2
  std::optional<AlphaInterval> restriction;  // DW, BJO, AD, Eicker
  bool all_intervals = false;                // RW only

  bool operator==(const StatisticSpec& o) const {
    return statistic == o.statistic && m == o.m && nu_value() == o.nu_value() &&
           restriction == o.restriction && all_intervals == o.all_intervals;
  }
  [[nodiscard]] double nu_value() const noexcept { return nu ? nu->value() : 1.5; }
};

/// Estimated (1 - delta) quantiles of one statistic.
struct QuantileTable {
  StatisticSpec spec;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::map<double, double> entries;  // delta -> kappa

  [[nodiscard]] double at(double delta) const {
    const auto it = entries.find(delta);
    if (it == entries.end()) throw DomainError("quantile table has no entry for this delta");
    return it->second;
  }
  /// Below this many replications the estimate is too coarse for production.
  [[nodiscard]] bool low_reps() const noexcept { return reps < 1000; }
};

/// Runs body(r) for r in [0, count) over `threads` workers in contiguous blocks.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r, 0u);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = count * t / threads;
      const std::size_t end = count * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] {
        try {
          for (std::size_t r = begin; r < end; ++r) body(r, t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

namespace detail {

template <class Kernel>
struct KernelEval {
  Kernel kernel;
  std::size_t first = 0;
  double operator()(std::span<const double> u) const { return endpoint_supremum(u, kernel, first); }
};

using Evaluator = std::variant<KernelEval<DwKernel>, KernelEval<BjoKernel>, KernelEval<AdKernel>,
                               KernelEval<EickerKernel>, KernelEval<KsKernel>, RwStatistic>;

inline Evaluator make_evaluator(const StatisticSpec& spec) {
  const std::size_t m = spec.m;
  const std::size_t first = restricted_first_index(m, spec.restriction);
  if (spec.restriction &&
      (spec.statistic == Statistic::kKS || spec.statistic == Statistic::kRW)) {
    throw DomainError("restriction is not supported for the ks and rw statistics");
  }
  switch (spec.statistic) {
    case Statistic::kDW:
      return KernelEval<DwKernel>{DwKernel(m, NuParam(spec.nu_value())), first};
    case Statistic::kBJO: return KernelEval<BjoKernel>{BjoKernel(m), first};
    case Statistic::kAD: return KernelEval<AdKernel>{AdKernel(m), first};
    case Statistic::kEicker: return KernelEval<EickerKernel>{EickerKernel(m), first};
    case Statistic::kKS: return KernelEval<KsKernel>{KsKernel(m), 0};
    case Statistic::kRW: return RwStatistic(build_family(m, spec.all_intervals));
  }
  throw DomainError("unknown statistic");
}

}  // namespace detail

/// Statistic values of `reps` independent sorted Unif(0,1) samples, in
/// replication order.
inline std::vector<double> simulate_statistic(const StatisticSpec& spec, std::size_t reps,
                                              std::uint64_t seed,
                                              unsigned threads = default_threads()) {
  if (spec.m == 0) throw DomainError("simulate_statistic: m must be positive");
  if (reps == 0) throw DomainError("simulate_statistic: reps must be positive");
  const auto eval = detail::make_evaluator(spec);
  threads = std::max(1u, threads);
  std::vector<std::vector<double>> buffers(threads, std::vector<double>(spec.m));
  std::vector<double> values(reps);
  parallel_for(reps, threads, [&](std::size_t r, unsigned t) {
    auto eng = make_engine(seed, r, Stream::kMonteCarlo);
    auto& u = buffers[t];
    sorted_uniforms(eng, u);
    values[r] = std::visit([&](const auto& e) { return e(u); }, eval);
  });
  return values;
}

/// The ceil(B (1 - delta))-th smallest of B simulated values.
inline double conservative_quantile(std::span<const double> values, double delta) {
  if (values.empty()) throw DomainError("conservative_quantile: no values");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("conservative_quantile: delta in (0,1)");
  const auto b = static_cast<double>(values.size());
  // Guard against B (1 - delta) landing a hair above an integer.
  auto k = static_cast<std::size_t>(std::ceil(b * (1.0 - delta) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

inline QuantileTable mc_quantile_table(const StatisticSpec& spec, std::span<const double> deltas,
                                       std::size_t reps, std::uint64_t seed,
                                       unsigned threads = default_threads()) {
  if (deltas.empty()) throw DomainError("mc_quantile_table: no delta values");
  const auto values = simulate_statistic(spec, reps, seed, threads);
  QuantileTable table;
  table.spec = spec;
  table.reps = reps;
  table.seed = seed;
  for (double d : deltas) table.entries[d] = conservative_quantile(values, d);
  return table;
}

/// Conservative Monte Carlo (1 - delta) quantile of the statistic.
inline double mc_quantile(const StatisticSpec& spec, double delta, std::size_t reps,
                          std::uint64_t seed, unsigned threads = default_threads()) {
  const double d[] = {delta};
  return mc_quantile_table(spec, d, reps, seed, threads).at(delta);
}

}  // namespace simconf
