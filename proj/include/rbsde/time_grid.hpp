#pragma once

#include <cmath>

#include "rbsde/errors.hpp"

namespace rbsde {

/// Uniform partition 0 = t_0 < t_1 < ... < t_N = T of a finite horizon.
/// Non-uniform grids are deliberately unsupported; every scheme below
/// assumes a constant step.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      throw ParameterError("TimeGrid: horizon must be positive and finite");
    if (steps < 1) throw ParameterError("TimeGrid: need at least one step");
    dt_ = horizon_ / steps_;
    sqrt_dt_ = std::sqrt(dt_);
  }

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double sqrt_dt() const { return sqrt_dt_; }

  /// t_i. Evaluated as (i * T) / N so that t(N) reproduces the horizon
  /// exactly whenever N * T is exactly representable.
  double t(int i) const { return (horizon_ * i) / steps_; }

 private:
  double horizon_;
  int steps_;
  double dt_;
  double sqrt_dt_;
};

}  // namespace rbsde
