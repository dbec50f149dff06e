#pragma once

#include <cmath>
#include <vector>

#include "rbsde/backends.hpp"
#include "rbsde/claims.hpp"
#include "rbsde/solution.hpp"
#include "rbsde/solver_core.hpp"
#include "rbsde/tree_solve.hpp"

namespace rbsde {

namespace detail {

template <class Backend>
std::vector<double> terminal_values(const Backend& bk,
                                    const TerminalClaim& claim) {
  if (!claim.payoff) throw ParameterError("terminal claim has no payoff");
  const int n = bk.grid().steps();
  auto vals = bk.eval_state_values(
      n, claim.state,
      [&claim](double, std::span<const double> s) { return claim.payoff(s); });
  // square-integrability witness: the empirical second moment must be finite
  double m2 = 0.0;
  for (double v : vals) m2 += v * v;
  if (!std::isfinite(m2 / static_cast<double>(vals.size())))
    throw NumericalError("terminal claim " + claim.name +
                         " has no finite second moment on this backend");
  return vals;
}

template <class Backend>
SolutionTriple record_to_solution(const Backend& bk,
                                  const BackwardRecord& rec) {
  const int n = bk.grid().steps();
  SolutionTriple out;
  out.kind = bk.kind();
  out.horizon = bk.grid().horizon();
  out.steps = n;
  out.y.reserve(n + 1);
  for (int i = 0; i <= n; ++i) out.y.push_back(bk.wrap(i, rec.y[i]));
  out.z.resize(n);
  out.dk.reserve(n);
  for (int i = 0; i < n; ++i) {
    for (auto& comp : rec.z[i]) out.z[i].push_back(bk.wrap(i, comp));
    out.dk.push_back(bk.wrap(i, rec.dk[i]));
  }
  return out;
}

}  // namespace detail

/// Backward solve of the unreflected equation
///   Y_t = xi + int g(s, Y, Z) ds - int <Z, dB>
/// on the discrete grid. Returns the full (Y, Z, K = 0) history.
template <class Backend>
SolutionTriple solve_bsde(const Backend& bk, const TerminalClaim& claim,
                          const Generator& gen) {
  detail::BackwardRecord rec;
  auto terminal = detail::terminal_values(bk, claim);
  detail::backward_solve(bk, gen, Obstacle::none(), std::move(terminal),
                         bk.grid().steps(), 0, &rec);
  return detail::record_to_solution(bk, rec);
}

/// Reference nonlinear expectation with driver mu * ||z||.
template <class Backend>
SolutionTriple e_mu(const Backend& bk, const TerminalClaim& claim, double mu) {
  return solve_bsde(bk, claim, Generator::emu(mu, bk.brownian_dim()));
}

/// Conjugation identity of the +-mu pair: the value of X + Y under the
/// (-mu)-expectation must equal Y minus the mu-expectation of -X, where Y
/// is known at the evaluation step. Both sides are computed independently:
/// the left side genuinely solves the (path-dependent) shifted claim, on
/// the lattice via the exhaustive path tree, and the right side runs a
/// plain mu-solve of the negated claim. Returns the largest pointwise gap
/// at step t_idx.
inline double duality_check(const LatticeBackend& bk,
                            const TerminalClaim& claim,
                            const StepValues& y_shift, double mu, int t_idx) {
  const TimeGrid& grid = bk.grid();
  const int n = grid.steps();
  require_width(y_shift, BackendKind::lattice, t_idx, bk.width(t_idx),
                "duality_check");

  // left side: E^{-mu}[X + Y] on the path tree, down to t_idx
  const auto xi = detail::terminal_values(bk, claim);
  auto path_claim = [&](const LatticePathCtx& p) {
    return xi[p.node(n)] + y_shift.v[p.node(t_idx)];
  };
  const auto lhs = exhaustive_path_solve(
      bk.lattice(), Generator::neg_emu(mu), Obstacle::none(), path_claim, n,
      t_idx);

  // right side: Y - E^mu[-X], a plain recombining solve
  std::vector<double> neg(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) neg[j] = -xi[j];
  const auto emu_neg = detail::backward_solve(
      bk, Generator::emu(mu), Obstacle::none(), std::move(neg), n, t_idx);

  double worst = 0.0;
  for (std::uint64_t p = 0; p < lhs.size(); ++p) {
    const int j = LatticePathCtx{&bk.lattice(), p, t_idx}.node(t_idx);
    worst = std::max(worst, std::abs(lhs[p] - (y_shift.v[j] - emu_neg[j])));
  }
  return worst;
}

inline double duality_check(const EnsembleBackend& bk,
                            const TerminalClaim& claim,
                            const StepValues& y_shift, double mu, int t_idx) {
  const int n = bk.grid().steps();
  require_width(y_shift, BackendKind::ensemble, t_idx, bk.width(t_idx),
                "duality_check");
  auto xi = detail::terminal_values(bk, claim);
  std::vector<double> shifted(xi.size());
  for (std::size_t m = 0; m < xi.size(); ++m)
    shifted[m] = xi[m] + y_shift.v[m];
  const auto lhs =
      detail::backward_solve(bk, Generator::neg_emu(mu, bk.brownian_dim()),
                             Obstacle::none(), std::move(shifted), n, t_idx);
  for (auto& v : xi) v = -v;
  const auto emu_neg =
      detail::backward_solve(bk, Generator::emu(mu, bk.brownian_dim()),
                             Obstacle::none(), std::move(xi), n, t_idx);
  double worst = 0.0;
  for (std::size_t m = 0; m < lhs.size(); ++m)
    worst = std::max(worst, std::abs(lhs[m] - (y_shift.v[m] - emu_neg[m])));
  return worst;
}

struct MomentBoundReport {
  double lhs = 0.0;     // E[(Y_t)^p]
  double rhs = 0.0;     // bound_factor * E[X^p]
  double factor = 0.0;  // exp(p mu^2 (T - t) / (2 (p - 1)))
  double slack = 0.0;
  bool pass = false;
};

/// p-th moment domination of the mu-expectation of a nonnegative claim:
/// E[(E^mu_t[X])^p] <= exp(p mu^2 (T-t) / (2(p-1))) E[X^p], p in (1, 2].
template <class Backend>
MomentBoundReport moment_bound_check(const Backend& bk,
                                     const TerminalClaim& claim, double mu,
                                     double p, int t_idx = 0,
                                     double slack = 1e-6) {
  if (!(p > 1.0) || !(p <= 2.0))
    throw ParameterError("moment_bound_check: p must lie in (1, 2]");
  if (mu < 0.0) throw ParameterError("moment_bound_check: mu must be >= 0");
  const TimeGrid& grid = bk.grid();
  const int n = grid.steps();
  if (t_idx < 0 || t_idx > n)
    throw ParameterError("moment_bound_check: bad step index");

  auto xi = detail::terminal_values(bk, claim);
  for (double v : xi)
    if (v < 0.0)
      throw ParameterError("moment_bound_check: claim must be nonnegative");

  const double tau = grid.horizon() - grid.t(t_idx);
  MomentBoundReport rep;
  rep.slack = slack;
  rep.factor = std::exp(0.5 * p / (p - 1.0) * mu * mu * tau);
  rep.rhs = rep.factor *
            bk.mean_of(n, xi, [p](double v) { return std::pow(v, p); });
  const auto yt =
      detail::backward_solve(bk, Generator::emu(mu, bk.brownian_dim()),
                             Obstacle::none(), std::move(xi), n, t_idx);
  rep.lhs =
      bk.mean_of(t_idx, yt, [p](double v) { return std::pow(std::abs(v), p); });
  rep.pass = rep.lhs <= rep.rhs + slack;
  return rep;
}

}  // namespace rbsde
