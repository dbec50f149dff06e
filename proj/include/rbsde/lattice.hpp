#pragma once

#include <vector>

#include "rbsde/time_grid.hpp"

namespace rbsde {

/// Recombining binomial approximation of a one-dimensional Brownian motion.
/// Step i carries i+1 nodes; node j of step i sits at (2j - i) * sqrt(dt),
/// and both transitions out of a node have probability 1/2. The children of
/// node j are node j (down) and node j+1 (up) of step i+1.
class Lattice {
 public:
  explicit Lattice(const TimeGrid& grid) : grid_(grid) {}

  const TimeGrid& grid() const { return grid_; }
  int node_count(int step) const { return step + 1; }

  /// Brownian position of node j at step i.
  double node(int step, int j) const {
    return (2 * j - step) * grid_.sqrt_dt();
  }

  /// Marginal probabilities C(i,j) / 2^i of the step-i nodes, computed with
  /// the Pascal recurrence so that large steps stay accurate and the row
  /// sums to 1 up to rounding.
  std::vector<double> probabilities(int step) const {
    std::vector<double> p{1.0};
    for (int i = 1; i <= step; ++i) {
      std::vector<double> q(i + 1, 0.0);
      for (int j = 0; j < i; ++j) {
        q[j] += 0.5 * p[j];
        q[j + 1] += 0.5 * p[j];
      }
      p = std::move(q);
    }
    return p;
  }

 private:
  TimeGrid grid_;
};

inline Lattice build_lattice(const TimeGrid& grid) { return Lattice(grid); }

}  // namespace rbsde
