#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbsde/errors.hpp"
#include "rbsde/state_map.hpp"

namespace rbsde {

/// Sampling box for the construction-time floor probes.
struct ObstacleProbeBox {
  double t_max = 10.0;
  double state_lo = -10.0;
  double state_hi = 10.0;
};

/// Lower barrier S(t, state) for the reflected solves, together with the
/// constant upper bound the operator axioms require the floor to respect.
/// The "no floor" sentinel keeps one code path for plain and reflected
/// solves: reflection against -infinity never binds.
class Obstacle {
 public:
  static Obstacle none() { return Obstacle(); }

  static Obstacle constant(double level) {
    return Obstacle(
        "CONSTANT", {},
        [level](double, std::span<const double>) { return level; }, level, 1,
        {}, false);
  }

  static Obstacle zero() { return constant(0.0); }

  /// (strike - x)^+ on a GBM price state; bounded above by the strike.
  static Obstacle put(double spot, double strike, double rate, double sigma) {
    return Obstacle(
        "PUT", StateMap::gbm(spot, rate, sigma),
        [strike](double, std::span<const double> x) {
          return std::max(strike - x[0], 0.0);
        },
        strike, 1, ObstacleProbeBox{10.0, 0.0, 10.0 * std::max(strike, 1.0)},
        true);
  }

  /// Custom floor. `bound` is the declared constant dominating S; it is
  /// spot-checked on 10^3 random probes of the box at construction.
  Obstacle(std::string name, StateMap state,
           std::function<double(double, std::span<const double>)> fn,
           double bound, int state_dim, ObstacleProbeBox box = {},
           bool probe = true)
      : name_(std::move(name)),
        state_(std::move(state)),
        fn_(std::move(fn)),
        bound_(bound),
        state_dim_(state_dim),
        none_(false) {
    if (!fn_) throw ParameterError("Obstacle: missing floor map");
    if (!std::isfinite(bound_))
      throw ParameterError("Obstacle: bound must be finite");
    if (probe) run_probes(box);
  }

  bool is_none() const { return none_; }
  const std::string& name() const { return name_; }
  const StateMap& state() const { return state_; }
  double bound() const { return bound_; }

  double value(double t, std::span<const double> state) const {
    return fn_(t, state);
  }
  const std::function<double(double, std::span<const double>)>& fn() const {
    return fn_;
  }

  /// Same floor lowered by a constant (bound drops with it).
  Obstacle shifted(double c) const {
    if (none_) return none();
    auto base = fn_;
    Obstacle out(name_ + "_shift", state_,
                 [base, c](double t, std::span<const double> x) {
                   return base(t, x) + c;
                 },
                 bound_ + c, state_dim_, {}, false);
    return out;
  }

 private:
  Obstacle()
      : bound_(-std::numeric_limits<double>::infinity()),
        state_dim_(0),
        none_(true) {}

  void run_probes(const ObstacleProbeBox& box) const {
    std::mt19937_64 eng(0x666c6f6f72ULL);
    std::uniform_real_distribution<double> ut(0.0, box.t_max);
    std::uniform_real_distribution<double> ux(box.state_lo, box.state_hi);
    std::vector<double> x(state_dim_);
    for (int k = 0; k < 1000; ++k) {
      const double t = ut(eng);
      for (int c = 0; c < state_dim_; ++c) x[c] = ux(eng);
      if (fn_(t, x) > bound_ + 1e-12)
        throw ParameterError("Obstacle " + name_ +
                             ": floor exceeds its declared upper bound");
    }
  }

  std::string name_;
  StateMap state_;
  std::function<double(double, std::span<const double>)> fn_;
  double bound_;
  int state_dim_;
  bool none_;
};

}  // namespace rbsde
