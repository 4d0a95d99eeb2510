#pragma once

// Systems of difference constraints x_b - x_a <= w over variables x_1..x_n
// with a box lo <= x_i <= hi, solved per coordinate by shortest paths.
//
// Node 0 is a ground node fixed at x_0 = 0. Every constraint is an edge
// a -> b of weight w, and the box adds 0 -> i (weight hi) and i -> 0
// (weight -lo). Then max x_i = dist(0, i) and min x_i = -dist(i, 0); the
// latter is a single-source problem on the reversed graph.

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "simconf/error.hpp"
#include "simconf/numerics.hpp"

namespace simconf {

/// x_b - x_a <= w.
struct DifferenceConstraint {
  std::size_t a = 0;
  std::size_t b = 0;
  double w = 0.0;
};

class DifferenceSystem {
 public:
  /// Variables are numbered 1..n; 0 is the ground node.
  explicit DifferenceSystem(std::size_t n, double box_lo = 0.0, double box_hi = 1.0)
      : n_(n), box_lo_(box_lo), box_hi_(box_hi) {
    if (!(box_lo <= box_hi)) throw DomainError("DifferenceSystem: empty box");
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double box_lo() const noexcept { return box_lo_; }
  [[nodiscard]] double box_hi() const noexcept { return box_hi_; }
  [[nodiscard]] const std::vector<DifferenceConstraint>& constraints() const noexcept {
    return edges_;
  }

  /// x_b - x_a <= w.
  void add_upper(std::size_t a, std::size_t b, double w) {
    if (a == 0 || b == 0 || a > n_ || b > n_) throw DomainError("DifferenceSystem: bad variable");
    if (std::isnan(w)) throw DomainError("DifferenceSystem: NaN weight");
    if (w == kInf) return;
    edges_.push_back({a, b, w});
  }

  /// lo <= x_b - x_a <= hi.
  void add_range(std::size_t a, std::size_t b, double lo, double hi) {
    add_upper(a, b, hi);
    add_upper(b, a, -lo);
  }

 private:
  std::size_t n_;
  double box_lo_;
  double box_hi_;
  std::vector<DifferenceConstraint> edges_;
};

struct VariableRanges {
  std::vector<double> lo;  // index 0 unused
  std::vector<double> hi;
};

namespace detail {

// Relaxations smaller than this are ignored, so a cycle whose weight is
// negative only through rounding is not reported as infeasible.
inline constexpr double kRelaxTol = 1e-14;

struct Edge {
  std::size_t from, to;
  double w;
};

// Bellman-Ford from node 0 with early exit; throws on a negative cycle.
inline std::vector<double> bellman_ford(std::size_t nodes, const std::vector<Edge>& edges) {
  std::vector<double> dist(nodes, kInf);
  dist[0] = 0.0;
  for (std::size_t pass = 0; pass < nodes; ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      if (dist[e.from] == kInf) continue;
      const double cand = dist[e.from] + e.w;
      if (cand < dist[e.to] - kRelaxTol) {
        dist[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) return dist;
  }
  throw InfeasibleError("infeasible constraint system: negative cycle");
}

}  // namespace detail

/// Per-coordinate minimum and maximum of every variable over the feasible set.
inline VariableRanges solve_ranges(const DifferenceSystem& sys) {
  const std::size_t nodes = sys.size() + 1;
  std::vector<detail::Edge> fwd;
  std::vector<detail::Edge> rev;
  fwd.reserve(sys.constraints().size() + 2 * sys.size());
  rev.reserve(fwd.capacity());
  auto add = [&](std::size_t a, std::size_t b, double w) {
    fwd.push_back({a, b, w});
    rev.push_back({b, a, w});
  };
  for (std::size_t i = 1; i < nodes; ++i) {
    add(0, i, sys.box_hi());
    add(i, 0, -sys.box_lo());
  }
  for (const auto& c : sys.constraints()) add(c.a, c.b, c.w);

  const auto up = detail::bellman_ford(nodes, fwd);
  const auto down = detail::bellman_ford(nodes, rev);
  VariableRanges out{std::vector<double>(nodes, 0.0), std::vector<double>(nodes, 0.0)};
  for (std::size_t i = 1; i < nodes; ++i) {
    out.hi[i] = up[i];
    out.lo[i] = -down[i];
    if (out.lo[i] > out.hi[i] + 1e-12) {
      std::ostringstream os;
      os << "infeasible constraint system at variable " << i;
      throw InfeasibleError(os.str());
    }
  }
  return out;
}

}  // namespace simconf
