#pragma once

#include <cmath>
#include <functional>
#include <span>

namespace rbsde {

/// Markov state read off the Brownian position. Regressions, floors and
/// terminal payoffs all evaluate through one of these. Maps must be
/// memoryless in the path (a function of (t, W_t) only); that is what keeps
/// the recombining lattice usable.
struct StateMap {
  /// 0 means identity: the state is the Brownian position itself.
  int dim = 0;
  std::function<void(double t, std::span<const double> w, std::span<double> out)>
      fn;

  bool identity() const { return !fn; }
  int dim_for(int brownian_dim) const { return identity() ? brownian_dim : dim; }

  void eval(double t, std::span<const double> w, std::span<double> out) const {
    if (identity()) {
      for (std::size_t c = 0; c < w.size(); ++c) out[c] = w[c];
    } else {
      fn(t, w, out);
    }
  }

  /// Geometric Brownian motion driven by the first component:
  /// x = spot * exp((rate - sigma^2 / 2) t + sigma W_t).
  static StateMap gbm(double spot, double rate, double sigma) {
    StateMap m;
    m.dim = 1;
    m.fn = [spot, rate, sigma](double t, std::span<const double> w,
                               std::span<double> out) {
      out[0] = spot * std::exp((rate - 0.5 * sigma * sigma) * t + sigma * w[0]);
    };
    return m;
  }

  /// GBM level plus the put payoff (strike - x)^+. Polynomials of the level
  /// alone fit the continuation value poorly across the exercise kink, and
  /// the backward max() turns that misfit into a systematic upward bias; a
  /// payoff column restores accuracy at unchanged degree.
  static StateMap put_features(double spot, double strike, double rate,
                               double sigma) {
    StateMap m;
    m.dim = 2;
    m.fn = [spot, strike, rate, sigma](double t, std::span<const double> w,
                                       std::span<double> out) {
      const double x =
          spot * std::exp((rate - 0.5 * sigma * sigma) * t + sigma * w[0]);
      out[0] = x;
      out[1] = x < strike ? strike - x : 0.0;
    };
    return m;
  }
};

}  // namespace rbsde
