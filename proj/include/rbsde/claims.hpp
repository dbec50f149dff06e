#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "rbsde/state_map.hpp"

namespace rbsde {

/// Terminal condition: a payoff read off the declared Markov state at the
/// horizon. Claims needing a richer state than the raw Brownian position
/// declare it here (the American put reads a GBM price, for instance).
struct TerminalClaim {
  std::string name;
  StateMap state;
  std::function<double(std::span<const double>)> payoff;
};

inline TerminalClaim claim_bt() {
  return {"BT", {}, [](std::span<const double> w) { return w[0]; }};
}

inline TerminalClaim claim_abs_bt() {
  return {"ABS_BT", {}, [](std::span<const double> w) { return std::abs(w[0]); }};
}

inline TerminalClaim claim_bt_squared() {
  return {"BT_SQUARED", {},
          [](std::span<const double> w) { return w[0] * w[0]; }};
}

inline TerminalClaim claim_constant(double c) {
  return {"CONSTANT", {}, [c](std::span<const double>) { return c; }};
}

/// (strike - x)^+ on a GBM price state.
inline TerminalClaim claim_put(double spot, double strike, double rate,
                               double sigma) {
  return {"PUT", StateMap::gbm(spot, rate, sigma),
          [strike](std::span<const double> x) {
            return std::max(strike - x[0], 0.0);
          }};
}

/// (x - strike)^+ on a GBM price state.
inline TerminalClaim claim_call(double spot, double strike, double rate,
                                double sigma) {
  return {"CALL", StateMap::gbm(spot, rate, sigma),
          [strike](std::span<const double> x) {
            return std::max(x[0] - strike, 0.0);
          }};
}

/// Pointwise transform of an existing claim; keeps the declared state.
inline TerminalClaim map_claim(const TerminalClaim& base, std::string name,
                               std::function<double(double)> f) {
  auto payoff = base.payoff;
  return {std::move(name), base.state,
          [payoff, f = std::move(f)](std::span<const double> s) {
            return f(payoff(s));
          }};
}

inline TerminalClaim shift_claim(const TerminalClaim& base, double c) {
  return map_claim(base, base.name + (c < 0 ? "" : "+") + std::to_string(c),
                   [c](double v) { return v + c; });
}

inline TerminalClaim negate_claim(const TerminalClaim& base) {
  return map_claim(base, "-" + base.name, [](double v) { return -v; });
}

}  // namespace rbsde
