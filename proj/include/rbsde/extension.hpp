#pragma once

#include <cmath>
#include <vector>

#include "rbsde/bsde.hpp"
#include "rbsde/rbsde_solver.hpp"
#include "rbsde/trials.hpp"

namespace rbsde {

/// One truncation level of the extension procedure.
struct ExtensionStage {
  double level = 0.0;           // n in X 1_{X >= -n}
  std::vector<double> y;        // E_{t,T}[X 1_{X >= -n} + n] - n
  double diff_l2 = 0.0;         // ||y - y_prev||_2 under the time-t measure
  double bound = 0.0;           // e^{mu^2 (T-t)/2} ||X 1_{-m <= X <= -n}||_2
  bool within = true;
};

struct ExtensionReport {
  std::vector<ExtensionStage> stages;
  bool cauchy_pass = true;  // every successive difference within its bound
  int stable_from = -1;     // first stage index agreeing with the last stage
  double stab_tol = 0.0;
};

/// Extends an operator on nonnegative claims to claims unbounded below by
/// truncate-and-shift: Y_n = E_{t,T}[X 1_{X >= -n} + n] - n per schedule
/// level n. Successive differences are checked against the contraction
/// bound (slack 1e-12 for roundoff); the last stage is the extended value.
template <class Op>
ExtensionReport extend_operator(const Op& op, const TerminalClaim& claim,
                                int t_idx, const std::vector<double>& levels,
                                double stab_tol = 1e-10) {
  const auto& bk = op.backend();
  const int n = bk.grid().steps();
  if (t_idx < 0 || t_idx > n)
    throw ParameterError("extend_operator: t index outside the grid");
  if (levels.empty())
    throw ParameterError("extend_operator: empty truncation schedule");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] >= 0.0))
      throw ParameterError("extend_operator: levels must be nonnegative");
    if (k > 0 && !(levels[k] > levels[k - 1]))
      throw ParameterError("extend_operator: schedule must be increasing");
  }
  for (int i = t_idx; i <= n; ++i)
    for (double v : op.floor_values(i))
      if (v > 1e-12)
        throw ParameterError(
            "extend_operator: operator must act on nonnegative claims "
            "(floor above zero)");

  const auto xv = detail::terminal_values(bk, claim);
  const double mu = op.dominating_mu();
  const double tau = bk.grid().horizon() - bk.grid().t(t_idx);
  const double factor = std::exp(0.5 * mu * mu * tau);

  ExtensionReport rep;
  rep.stab_tol = stab_tol;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double lv = levels[k];
    std::vector<double> trunc(xv.size());
    for (std::size_t j = 0; j < xv.size(); ++j)
      trunc[j] = (xv[j] >= -lv ? xv[j] : 0.0) + lv;
    auto y = op.evaluate(t_idx, n, bk.wrap(n, std::move(trunc))).v;
    for (auto& v : y) v -= lv;

    ExtensionStage st;
    st.level = lv;
    st.y = std::move(y);
    if (k > 0) {
      const auto& prev = rep.stages.back();
      std::vector<double> d(st.y.size());
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = st.y[j] - prev.y[j];
      st.diff_l2 = std::sqrt(
          bk.mean_of(t_idx, d, [](double x) { return x * x; }));
      const double lo = levels[k], hi = levels[k - 1];
      std::vector<double> band(xv.size());
      for (std::size_t j = 0; j < xv.size(); ++j)
        band[j] = (xv[j] >= -lo && xv[j] <= -hi) ? xv[j] : 0.0;
      st.bound = factor * std::sqrt(bk.mean_of(
                              n, band, [](double x) { return x * x; }));
      st.within = st.diff_l2 <= st.bound + 1e-12;
      rep.cauchy_pass = rep.cauchy_pass && st.within;
    }
    rep.stages.push_back(std::move(st));
  }

  const auto& last = rep.stages.back().y;
  rep.stable_from = static_cast<int>(rep.stages.size()) - 1;
  for (int k = static_cast<int>(rep.stages.size()) - 2; k >= 0; --k) {
    double worst = 0.0;
    for (std::size_t j = 0; j < last.size(); ++j)
      worst = std::max(worst, std::abs(rep.stages[k].y[j] - last[j]));
    if (worst <= stab_tol)
      rep.stable_from = k;
    else
      break;
  }
  return rep;
}

struct RepresentationReport {
  std::vector<AxiomReport> axioms;
  int interior_claims = 0;      // trials whose plain solution clears the floor
  double agreement_worst = 0.0; // reflected vs plain on those trials
  bool agreement_pass = true;
  bool pass = false;
};

/// Round-trip representation test: the operator built from (gen, floor) must
/// behave like a floored nonlinear expectation. Checks the axiom battery
/// with mu taken from the generator, and, on trial claims whose unreflected
/// solution already clears the floor everywhere, that the reflected and
/// plain solutions coincide.
template <class Backend>
RepresentationReport representation_check(const Backend& bk,
                                          const Generator& gen,
                                          const Obstacle& floor,
                                          const TrialConfig& cfg = {},
                                          const TolerancePolicy& pol = {}) {
  if (!gen.y_independent())
    throw ParameterError("representation_check: generator must not depend on y");
  if (!gen.zero_at_zero())
    throw ParameterError("representation_check: generator must vanish at z = 0");
  if (!floor.is_none() && !std::isfinite(floor.bound()))
    throw ParameterError("representation_check: floor must be bounded above");

  DynamicOperator<Backend> op(bk, gen, floor);
  RepresentationReport rep;
  rep.axioms = run_axiom_battery(
      op,
      {AxiomId::D1, AxiomId::D2, AxiomId::D3, AxiomId::D4, AxiomId::H1,
       AxiomId::H2},
      cfg, pol);

  const int n = bk.grid().steps();
  for (int k = 0; k < cfg.trials; ++k) {
    const auto tr = make_axiom_trial(op, AxiomId::H1, k, cfg);
    detail::BackwardRecord rec;
    detail::backward_solve(bk, gen, Obstacle::none(),
                           std::vector<double>(tr.claim_a.v), n, 0, &rec);
    bool interior = true;
    for (int i = 0; i <= n && interior; ++i) {
      const auto fl = op.floor_values(i);
      if (fl.empty()) break;
      for (std::size_t j = 0; j < fl.size(); ++j)
        if (!(rec.y[i][j] >= fl[j])) interior = false;
    }
    if (!interior) continue;
    ++rep.interior_claims;
    detail::BackwardRecord rrec;
    detail::backward_solve(bk, gen, floor, std::vector<double>(tr.claim_a.v),
                           n, 0, &rrec);
    for (int i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < rec.y[i].size(); ++j)
        rep.agreement_worst = std::max(
            rep.agreement_worst, std::abs(rec.y[i][j] - rrec.y[i][j]));
  }
  rep.agreement_pass = rep.agreement_worst <= pol.lattice_abs;
  rep.pass = rep.agreement_pass;
  for (const auto& a : rep.axioms) rep.pass = rep.pass && a.pass;
  return rep;
}

}  // namespace rbsde
