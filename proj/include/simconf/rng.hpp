#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace simconf {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-purpose substreams, so adding a consumer never shifts another's draws.
enum class Stream : std::uint64_t {
  kMonteCarlo = 1,
  kData = 2,
  kModel = 3,
  kSplit = 4,
  kOracle = 5,
  kTest = 6,
};

/// Seed for stream `purpose` of replication `index` under root `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    Stream purpose = Stream::kMonteCarlo) noexcept {
  return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(purpose))) + index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t index,
                          Stream purpose = Stream::kMonteCarlo) {
  return Engine(derive_seed(seed, index, purpose));
}

/// Uniform draw in the open interval (0, 1).
inline double uniform_open(Engine& eng) {
  for (;;) {
    const double u = std::generate_canonical<double, 64>(eng);
    if (u > 0.0 && u < 1.0) return u;
  }
}

/// Fills `out` with sorted standard uniforms using normalized exponential
/// spacings (O(m), no sort).
inline void sorted_uniforms(Engine& eng, std::span<double> out) {
  const std::size_t m = out.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total += -std::log(uniform_open(eng));
    out[i] = total;
  }
  total += -std::log(uniform_open(eng));
  // Division can round the last partial sum to exactly 1.
  constexpr double kBelowOne = 1.0 - 0x1p-53;
  for (auto& v : out) v = std::clamp(v / total, std::numeric_limits<double>::min(), kBelowOne);
}

inline std::vector<double> sorted_uniforms(Engine& eng, std::size_t m) {
  std::vector<double> out(m);
  sorted_uniforms(eng, out);
  return out;
}

}  // namespace simconf
