#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "rbsde/bsde.hpp"

namespace rbsde {

/// Backward solve of the reflected equation: the plain scheme followed by
/// the pointwise projection Y_i = max(Ytilde_i, S_i), whose pushes are the
/// increments of the nondecreasing process K. The terminal condition must
/// already dominate the floor.
template <class Backend>
SolutionTriple solve_rbsde(const Backend& bk, const TerminalClaim& claim,
                           const Generator& gen, const Obstacle& floor) {
  detail::BackwardRecord rec;
  auto terminal = detail::terminal_values(bk, claim);
  detail::backward_solve(bk, gen, floor, std::move(terminal),
                         bk.grid().steps(), 0, &rec);
  return detail::record_to_solution(bk, rec);
}

namespace detail {

template <class Backend>
std::vector<std::vector<double>> floor_history(const Backend& bk,
                                               const Obstacle& floor,
                                               int steps) {
  std::vector<std::vector<double>> s(steps + 1);
  for (int i = 0; i <= steps; ++i)
    s[i] = bk.eval_state_values(i, floor.state(), floor.fn());
  return s;
}

}  // namespace detail

/// Total Skorokhod defect of a solved triple: sum over steps of the worst
/// nodewise/pathwise product (Y_i - S_i) dK_i. Zero iff K only grows while
/// Y sits on the floor; the projection scheme achieves that by
/// construction, so anything visibly positive marks a corrupted triple.
template <class Backend>
double skorokhod_residual(const Backend& bk, const SolutionTriple& sol,
                          const Obstacle& floor) {
  if (floor.is_none()) return 0.0;
  double total = 0.0;
  for (int i = 0; i < sol.steps; ++i) {
    const auto s_vals = bk.eval_state_values(i, floor.state(), floor.fn());
    double worst = 0.0;
    for (std::size_t j = 0; j < s_vals.size(); ++j)
      worst = std::max(worst,
                       std::abs((sol.y[i].v[j] - s_vals[j]) * sol.dk[i].v[j]));
    total += worst;
  }
  return total;
}

struct FlatnessReport {
  bool pass = true;
  double worst = 0.0;  // largest dK found strictly above the floor
  std::vector<std::pair<int, std::size_t>> violations;
};

/// K must be flat off the floor: dK_i = 0 wherever Y_i > S_i (strictly,
/// beyond `gap_tol`). Lists every offending (step, index).
template <class Backend>
FlatnessReport flatness_check(const Backend& bk, const SolutionTriple& sol,
                              const Obstacle& floor, double gap_tol = 0.0) {
  FlatnessReport rep;
  if (floor.is_none()) {
    for (int i = 0; i < sol.steps; ++i)
      for (std::size_t j = 0; j < sol.dk[i].v.size(); ++j)
        if (sol.dk[i].v[j] != 0.0) {
          rep.pass = false;
          rep.worst = std::max(rep.worst, std::abs(sol.dk[i].v[j]));
          rep.violations.emplace_back(i, j);
        }
    return rep;
  }
  for (int i = 0; i < sol.steps; ++i) {
    const auto s_vals = bk.eval_state_values(i, floor.state(), floor.fn());
    for (std::size_t j = 0; j < s_vals.size(); ++j) {
      if (sol.y[i].v[j] > s_vals[j] + gap_tol && sol.dk[i].v[j] != 0.0) {
        rep.pass = false;
        rep.worst = std::max(rep.worst, sol.dk[i].v[j]);
        rep.violations.emplace_back(i, j);
      }
    }
  }
  return rep;
}

struct FloorShiftResult {
  SolutionTriple base;
  SolutionTriple shifted;
  double residual = 0.0;  // max_i max_j |Y_i - (Y^C_i + C)|
};

/// Translation invariance of the floored solve for z-only drivers:
/// solving (xi - C) against (S - C) and adding C back must reproduce the
/// original Y at every step and node/path.
template <class Backend>
FloorShiftResult floor_shift_solve(const Backend& bk,
                                   const TerminalClaim& claim,
                                   const Generator& gen, const Obstacle& floor,
                                   double c) {
  if (!gen.y_independent())
    throw ParameterError(
        "floor_shift_solve: driver must not depend on y (translation "
        "invariance fails otherwise)");
  FloorShiftResult out;
  out.base = solve_rbsde(bk, claim, gen, floor);
  out.shifted = solve_rbsde(bk, shift_claim(claim, -c), gen, floor.shifted(-c));
  for (int i = 0; i <= out.base.steps; ++i)
    for (std::size_t j = 0; j < out.base.y[i].v.size(); ++j)
      out.residual =
          std::max(out.residual, std::abs(out.base.y[i].v[j] -
                                          (out.shifted.y[i].v[j] + c)));
  return out;
}

/// Reconstructs Y_s from Y_t by running the unreflected step map and adding
/// back the recorded reflection increments: the discrete form of "Y + K is
/// a martingale under the shifted expectation". Exact on the lattice, where
/// the increments are node functions. Returns max |M_s - Y_s|.
inline double doob_meyer_verify(const LatticeBackend& bk,
                                const TerminalClaim& claim,
                                const Generator& gen, const Obstacle& floor,
                                int s_idx, int t_idx) {
  const TimeGrid& grid = bk.grid();
  if (s_idx < 0 || s_idx > t_idx || t_idx > grid.steps())
    throw ParameterError("doob_meyer_verify: bad step window");
  const auto sol = solve_rbsde(bk, claim, gen, floor);

  std::vector<double> m = sol.y[t_idx].v;
  std::vector<double> yhat;
  std::vector<std::vector<double>> zw;
  std::vector<double> zbuf(1);
  const double dt = grid.dt();
  for (int i = t_idx - 1; i >= s_idx; --i) {
    bk.step_moments(i, m, yhat, zw);
    const double t = grid.t(i);
    std::vector<double> next(bk.width(i));
    for (std::size_t j = 0; j < next.size(); ++j) {
      zbuf[0] = zw[0][j] / dt;
      next[j] = yhat[j] + gen(t, yhat[j], zbuf) * dt + sol.dk[i].v[j];
    }
    m = std::move(next);
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j)
    worst = std::max(worst, std::abs(m[j] - sol.y[s_idx].v[j]));
  return worst;
}

/// The augmented recursion needs exact per-path increments; a regression
/// backend cannot provide them, so the ensemble overload is rejected.
inline double doob_meyer_verify(const EnsembleBackend&, const TerminalClaim&,
                                const Generator&, const Obstacle&, int, int) {
  throw ParameterError(
      "doob_meyer_verify: lattice backend only (the check needs exact "
      "conditional expectations)");
}

struct SupermartingaleReport {
  double worst_margin = 0.0;   // max over (s, t, node) of E_{s,t}[Y_t] - Y_s
  double strict_margin = 0.0;  // most negative gap observed
  bool pass = true;
  int witness_s = -1, witness_t = -1;
  std::size_t witness_index = 0;
};

/// Y of the reflected solve must dominate every restarted unreflected
/// evolution of itself: for all s < t, E^plain_{s,t}[Y_t] <= Y_s. The
/// check replays the plain scheme from every t down to 0 and records the
/// worst violation and the most strictly negative margin (evidence the
/// inequality is not vacuously an equality when the floor binds).
template <class Backend>
SupermartingaleReport supermartingale_check(const Backend& bk,
                                            const TerminalClaim& claim,
                                            const Generator& gen,
                                            const Obstacle& floor) {
  const auto sol = solve_rbsde(bk, claim, gen, floor);
  SupermartingaleReport rep;
  for (int t = 1; t <= sol.steps; ++t) {
    detail::BackwardRecord rec;
    detail::backward_solve(bk, gen, Obstacle::none(),
                           std::vector<double>(sol.y[t].v), t, 0, &rec);
    for (int s = 0; s < t; ++s) {
      for (std::size_t j = 0; j < rec.y[s].size(); ++j) {
        const double margin = rec.y[s][j] - sol.y[s].v[j];
        if (margin > rep.worst_margin) {
          rep.worst_margin = margin;
          rep.witness_s = s;
          rep.witness_t = t;
          rep.witness_index = j;
        }
        rep.strict_margin = std::min(rep.strict_margin, margin);
      }
    }
  }
  return rep;
}

struct PricedAmerican {
  double price = 0.0;
  SolutionTriple solution;
};

struct AmericanParams {
  double spot = 100.0;
  double strike = 100.0;
  double rate = 0.05;
  double sigma = 0.2;
};

/// American put as a reflected solve: GBM price state, discount driver,
/// payoff floor. Price is Y_0 (node 0 / regression value at the shared
/// starting state).
template <class Backend>
PricedAmerican price_american(const Backend& bk, const AmericanParams& p) {
  if (!(p.sigma > 0.0)) throw ParameterError("price_american: sigma must be > 0");
  if (p.spot < 0.0 || p.strike < 0.0)
    throw ParameterError("price_american: negative spot or strike");
  if (p.rate < 0.0) throw ParameterError("price_american: negative rate");
  PricedAmerican out;
  const auto claim = claim_put(p.spot, p.strike, p.rate, p.sigma);
  const auto floor = Obstacle::put(p.spot, p.strike, p.rate, p.sigma);
  out.solution = solve_rbsde(bk, claim, Generator::discount(p.rate), floor);
  out.price = out.solution.y[0].v[0];
  return out;
}

/// Convenience entry points that bind the GBM price state to the backend
/// (the ensemble regression basis must see the price, not the raw motion).
inline PricedAmerican price_american(const Lattice& lat,
                                     const AmericanParams& p) {
  LatticeBackend bk(lat, StateMap::gbm(p.spot, p.rate, p.sigma));
  return price_american(bk, p);
}

inline PricedAmerican price_american(const PathEnsemble& ens,
                                     const RegressionSpec& spec,
                                     const AmericanParams& p) {
  EnsembleBackend bk(
      ens, spec, StateMap::put_features(p.spot, p.strike, p.rate, p.sigma));
  return price_american(bk, p);
}

}  // namespace rbsde
