#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rbsde/dynamic_operator.hpp"

namespace rbsde {

/// The conformance checks the operator lab can run. D1..D4 are the dynamic
/// operator axioms (monotonicity with strictness, constant/identity
/// preservation, time consistency, the zero-one law); H1/H2 are the
/// domination and translation hypotheses; SANDWICH is the two-sided
/// mu-envelope; MIX is locality under an F_s mixture.
enum class AxiomId { D1, D2, D3, D4, H1, H2, SANDWICH, MIX };

inline const char* to_string(AxiomId id) {
  switch (id) {
    case AxiomId::D1: return "D1";
    case AxiomId::D2: return "D2";
    case AxiomId::D3: return "D3";
    case AxiomId::D4: return "D4";
    case AxiomId::H1: return "H1";
    case AxiomId::H2: return "H2";
    case AxiomId::SANDWICH: return "SANDWICH";
    case AxiomId::MIX: return "MIX";
  }
  return "?";
}

inline std::optional<AxiomId> parse_axiom_id(const std::string& s) {
  for (AxiomId id : {AxiomId::D1, AxiomId::D2, AxiomId::D3, AxiomId::D4,
                     AxiomId::H1, AxiomId::H2, AxiomId::SANDWICH, AxiomId::MIX})
    if (s == to_string(id)) return id;
  return std::nullopt;
}

/// One tolerance object decides every pass/fail in the lab: exact checks on
/// the lattice against an absolute bar, statistical checks on ensembles
/// against a standard-error multiple. ensemble_abs_floor keeps comparisons
/// whose two sides agree to roundoff (so the standard error collapses to
/// roundoff scale too) from flapping on rounding bias; it is far below any
/// statistically meaningful signal.
struct TolerancePolicy {
  double lattice_abs = 1e-10;
  double se_mult = 3.0;
  double ensemble_abs_floor = 1e-9;
};

struct AxiomReport {
  AxiomId id = AxiomId::D1;
  BackendKind backend = BackendKind::lattice;
  double violation = 0.0;  // deciding statistic (worst pointwise on the
                           // lattice, worst aggregate on ensembles)
  double tolerance = 0.0;
  bool pass = false;
  int witness_step = -1;
  long long witness_index = -1;
  double worst_pointwise = 0.0;  // ensembles: recorded alongside the aggregate
  double aggregate_se = 0.0;
  std::string note;

  static std::string csv_header() {
    return "axiom,backend,violation,tolerance,pass,witness_step,witness_index";
  }

  std::string csv_row() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%d,%d,%lld",
                  to_string(id), rbsde::to_string(backend), violation,
                  tolerance, pass ? 1 : 0, witness_step, witness_index);
    return buf;
  }
};

/// One trial's worth of inputs. Claims live at t_idx and must dominate the
/// operator's domain floor; nonneg_* are nonnegative; event_* are 0/1
/// indicators; shift_s is a nonnegative cross-section at s_idx.
struct AxiomTrial {
  int r_idx = 0;
  int s_idx = 0;
  int t_idx = 0;
  StepValues claim_a, claim_b;
  StepValues nonneg_a, nonneg_b;
  StepValues event_s, event_t;
  StepValues shift_s;
  double mu = 1.0;
  double c_tilde = 0.0;
  double strict_eps = 1.0;
};

namespace detail {

struct Comparison {
  int step = 0;
  bool one_sided = false;  // true: require lhs <= rhs
  std::vector<double> lhs, rhs;
  std::vector<long long> idx;  // node/path index per entry; empty = identity
};

/// Folds comparisons into a report. Lattice: worst pointwise excess against
/// the absolute bar. Ensemble: worst mean excess against se_mult standard
/// errors of the mean (the pointwise worst is recorded as context).
template <class Backend>
void judge(const Backend&, const std::vector<Comparison>& cmps,
           const TolerancePolicy& pol, AxiomReport& rep) {
  rep.backend =
      std::is_same_v<Backend, LatticeBackend> ? BackendKind::lattice
                                              : BackendKind::ensemble;
  auto excess = [](const Comparison& c, std::size_t p) {
    const double d = c.lhs[p] - c.rhs[p];
    return c.one_sided ? d : std::abs(d);
  };
  if (rep.backend == BackendKind::lattice) {
    rep.tolerance = pol.lattice_abs;
    double worst = 0.0;
    for (const auto& c : cmps)
      for (std::size_t p = 0; p < c.lhs.size(); ++p) {
        const double e = excess(c, p);
        if (e > worst) {
          worst = e;
          rep.witness_step = c.step;
          rep.witness_index = c.idx.empty() ? static_cast<long long>(p)
                                            : c.idx[p];
        }
      }
    rep.violation = std::max(worst, 0.0);
    rep.worst_pointwise = rep.violation;
    rep.pass = rep.violation <= rep.tolerance;
    return;
  }
  // ensemble: aggregate per comparison, keep the worst one
  rep.pass = true;
  double deciding_gap = -1.0;
  for (const auto& c : cmps) {
    const std::size_t n = c.lhs.size();
    double mean = 0.0;
    for (std::size_t p = 0; p < n; ++p) mean += c.lhs[p] - c.rhs[p];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = (c.lhs[p] - c.rhs[p]) - mean;
      var += d * d;
      const double e = excess(c, p);
      if (e > rep.worst_pointwise) rep.worst_pointwise = e;
    }
    var /= static_cast<double>(n > 1 ? n - 1 : 1);
    const double se = std::sqrt(var / static_cast<double>(n));
    const double stat =
        c.one_sided ? std::max(mean, 0.0) : std::abs(mean);
    const double tol = std::max(pol.se_mult * se, pol.ensemble_abs_floor);
    if (stat > tol) rep.pass = false;
    if (stat - tol > deciding_gap) {
      deciding_gap = stat - tol;
      rep.violation = stat;
      rep.tolerance = tol;
      rep.aggregate_se = se;
      rep.witness_step = c.step;
    }
  }
}

inline void require_indicator(const StepValues& ev, const char* where) {
  for (double v : ev.v)
    if (v != 0.0 && v != 1.0)
      throw ParameterError(std::string(where) +
                           ": event values must be 0 or 1");
}

template <class Op>
void require_domain(const Op& op, const StepValues& claim, int step,
                    const char* where) {
  const auto fl = op.floor_values(step);
  if (fl.empty()) return;
  for (std::size_t j = 0; j < claim.v.size(); ++j)
    if (claim.v[j] < fl[j])
      throw ParameterError(std::string(where) +
                           ": trial claim below the operator domain floor");
}

/// Plain mu-expectation of a cross-section on the op's backend (reference
/// side of H1 and SANDWICH).
template <class Backend>
std::vector<double> emu_values(const Backend& bk, std::vector<double> vals,
                               double mu, int t_idx, int s_idx) {
  return detail::backward_solve(bk, Generator::emu(mu, bk.brownian_dim()),
                                Obstacle::none(), std::move(vals), t_idx,
                                s_idx);
}

}  // namespace detail

/// Runs one axiom check for one trial and returns the report. Exactness
/// expectations (what "pass" means per backend) sit in the tolerance
/// policy, not here.
template <class Op>
AxiomReport check_axiom(const Op& op, AxiomId id, const AxiomTrial& trial,
                        const TolerancePolicy& pol = {}) {
  using Backend = typename Op::backend_type;
  const Backend& bk = op.backend();
  const int s = trial.s_idx, t = trial.t_idx, r = trial.r_idx;
  const int n = bk.grid().steps();
  if (!(0 <= r && r <= s && s <= t && t <= n))
    throw ParameterError("check_axiom: need 0 <= r <= s <= t <= N");

  AxiomReport rep;
  rep.id = id;
  std::vector<detail::Comparison> cmps;

  auto idx_of = [&](int step, std::size_t p) {
    return static_cast<long long>(point_index(bk, step, p));
  };
  auto map_indices = [&](int step, std::size_t count) {
    std::vector<long long> idx(count);
    for (std::size_t p = 0; p < count; ++p) idx[p] = idx_of(step, p);
    return idx;
  };

  switch (id) {
    case AxiomId::D1: {
      // monotonicity: claims ordered pointwise => values ordered at every
      // intermediate step
      detail::require_domain(op, trial.claim_a, t, "D1");
      detail::require_domain(op, trial.claim_b, t, "D1");
      StepValues hi = trial.claim_a, lo = trial.claim_a;
      for (std::size_t j = 0; j < hi.v.size(); ++j) {
        hi.v[j] = std::max(trial.claim_a.v[j], trial.claim_b.v[j]);
        lo.v[j] = std::min(trial.claim_a.v[j], trial.claim_b.v[j]);
      }
      for (int si = s; si < t; ++si) {
        detail::Comparison c{si, true};
        c.lhs = op.evaluate(si, t, lo).v;
        c.rhs = op.evaluate(si, t, hi).v;
        cmps.push_back(std::move(c));
      }
      // strictness, contrapositive form: bump the claim up on a positive
      // probability event; if the floor never binds for the base solve the
      // operator value must strictly increase somewhere
      detail::require_indicator(trial.event_t, "D1");
      double event_mass = 0.0;
      for (double v : trial.event_t.v) event_mass += v;
      if (event_mass > 0.0) {
        bool interior = true;
        for (int si = s; si <= t && interior; ++si) {
          const auto fl = op.floor_values(si);
          if (fl.empty()) break;
          const auto base =
              si == t ? hi : op.evaluate(si, t, hi);
          for (std::size_t j = 0; j < base.v.size(); ++j)
            if (base.v[j] <= fl[j]) interior = false;
        }
        if (interior) {
          StepValues bumped = hi;
          for (std::size_t j = 0; j < bumped.v.size(); ++j)
            bumped.v[j] += trial.strict_eps * trial.event_t.v[j];
          const auto vb = op.evaluate(s, t, bumped).v;
          const auto v0 = op.evaluate(s, t, hi).v;
          double max_inc = 0.0;
          for (std::size_t j = 0; j < vb.size(); ++j)
            max_inc = std::max(max_inc, vb[j] - v0[j]);
          if (!(max_inc > 0.0)) {
            rep.note = "strictness: no increase anywhere";
            detail::Comparison c{s, true};
            c.lhs = {trial.strict_eps};
            c.rhs = {0.0};
            cmps.push_back(std::move(c));
          }
        } else {
          rep.note = "strictness skipped: floor binds on [s,t]";
        }
      }
      break;
    }

    case AxiomId::D2: {
      // constants above the domain bound ride through every (s', t) pair,
      // and evaluation at (s', s') is the identity
      for (double c0 : {0.0, 1.0, 2.5}) {
        const double c = trial.c_tilde + c0;
        for (int si = s; si <= t; ++si) {
          StepValues cc = bk.wrap(t, std::vector<double>(bk.width(t), c));
          detail::require_domain(op, cc, t, "D2");
          detail::Comparison cmp{si, false};
          cmp.lhs = op.evaluate(si, t, cc).v;
          cmp.rhs.assign(bk.width(si), c);
          cmps.push_back(std::move(cmp));
        }
      }
      detail::require_domain(op, trial.claim_a, t, "D2");
      const auto vs = op.evaluate(s, t, trial.claim_a);
      detail::Comparison cmp{s, false};
      cmp.lhs = op.evaluate(s, s, vs).v;
      cmp.rhs = vs.v;
      cmps.push_back(std::move(cmp));
      detail::Comparison cmpt{t, false};
      cmpt.lhs = op.evaluate(t, t, trial.claim_a).v;
      cmpt.rhs = trial.claim_a.v;
      cmps.push_back(std::move(cmpt));
      break;
    }

    case AxiomId::D3: {
      // time consistency through the intermediate step s
      for (const StepValues* cl : {&trial.claim_a, &trial.claim_b}) {
        detail::require_domain(op, *cl, t, "D3");
        detail::Comparison c{r, false};
        c.lhs = op.evaluate(r, s, op.evaluate(s, t, *cl)).v;
        c.rhs = op.evaluate(r, t, *cl).v;
        cmps.push_back(std::move(c));
      }
      break;
    }

    case AxiomId::D4: {
      // zero-one law: E[1_A Y + c] - c = 1_A (E[Y + c] - c) for A known at s
      detail::require_indicator(trial.event_s, "D4");
      const double c = trial.c_tilde;
      StepValues yc = trial.nonneg_a;
      for (auto& v : yc.v) v += c;
      detail::require_domain(op, yc, t, "D4");
      const auto rhs_core = op.evaluate(s, t, yc).v;

      const auto& ev = trial.event_s.v;
      const auto& yv = trial.nonneg_a.v;
      typename Backend::path_claim pc;
      if constexpr (std::is_same_v<Backend, LatticeBackend>) {
        pc = [&ev, &yv, c, s, t](const LatticePathCtx& p) {
          return ev[p.node(s)] * yv[p.node(t)] + c;
        };
      } else {
        pc = [&ev, &yv, c](const EnsemblePathCtx& p) {
          return ev[p.m] * yv[p.m] + c;
        };
      }
      const auto lhs = op.evaluate_path_values(s, t, pc);
      detail::Comparison cmp{s, false};
      cmp.lhs.resize(lhs.size());
      cmp.rhs.resize(lhs.size());
      cmp.idx = map_indices(s, lhs.size());
      for (std::size_t p = 0; p < lhs.size(); ++p) {
        const auto j = static_cast<std::size_t>(cmp.idx[p]);
        cmp.lhs[p] = lhs[p] - c;
        cmp.rhs[p] = ev[j] * (rhs_core[j] - c);
      }
      cmps.push_back(std::move(cmp));
      break;
    }

    case AxiomId::H1: {
      // super-domination of differences by the mu-expectation
      detail::require_domain(op, trial.claim_a, t, "H1");
      StepValues xy = trial.claim_a;
      for (std::size_t j = 0; j < xy.v.size(); ++j)
        xy.v[j] += trial.nonneg_a.v[j];
      for (int si = s; si < t; ++si) {
        detail::Comparison c{si, true};
        const auto vxy = op.evaluate(si, t, xy).v;
        const auto vx = op.evaluate(si, t, trial.claim_a).v;
        c.lhs.resize(vxy.size());
        for (std::size_t j = 0; j < vxy.size(); ++j)
          c.lhs[j] = vxy[j] - vx[j];
        c.rhs = detail::emu_values(bk, std::vector<double>(trial.nonneg_a.v),
                                   trial.mu, t, si);
        cmps.push_back(std::move(c));
      }
      break;
    }

    case AxiomId::H2: {
      // adding an F_s-known nonnegative Y on top of the claim raises the
      // value at s by at most Y, exactly when the floor stays slack
      detail::require_domain(op, trial.claim_a, t, "H2");
      for (double v : trial.shift_s.v)
        if (v < 0.0) throw ParameterError("H2: shift must be nonnegative");

      const auto& xv = trial.claim_a.v;
      const auto& sv = trial.shift_s.v;
      typename Backend::path_claim pc;
      if constexpr (std::is_same_v<Backend, LatticeBackend>) {
        pc = [&xv, &sv, s, t](const LatticePathCtx& p) {
          return xv[p.node(t)] + sv[p.node(s)];
        };
      } else {
        pc = [&xv, &sv](const EnsemblePathCtx& p) {
          return xv[p.m] + sv[p.m];
        };
      }
      const auto lhs = op.evaluate_path_values(s, t, pc);
      const auto vx = op.evaluate(s, t, trial.claim_a).v;

      detail::Comparison c{s, true};
      c.lhs = lhs;
      c.rhs.resize(lhs.size());
      c.idx = map_indices(s, lhs.size());
      for (std::size_t p = 0; p < lhs.size(); ++p) {
        const auto j = static_cast<std::size_t>(c.idx[p]);
        c.rhs[p] = vx[j] + sv[j];
      }

      // strict slack of the base solve on [s, t] upgrades <= to =
      bool slted = true;
      for (int si = s; si <= t && slted; ++si) {
        const auto fl = op.floor_values(si);
        if (fl.empty()) break;
        const auto base = si == t ? trial.claim_a : op.evaluate(si, t, trial.claim_a);
        for (std::size_t j = 0; j < base.v.size(); ++j)
          if (!(base.v[j] > fl[j])) slted = false;
      }
      cmps.push_back(c);
      if (slted) {
        c.one_sided = false;
        cmps.push_back(std::move(c));
      } else {
        rep.note = "equality part skipped: floor binds for the base claim";
      }
      break;
    }

    case AxiomId::SANDWICH: {
      // E^{-mu}[Y] <= E[X + Y] - E[X] <= E^mu[Y]
      detail::require_domain(op, trial.nonneg_a, t, "SANDWICH");
      detail::require_domain(op, trial.nonneg_b, t, "SANDWICH");
      StepValues xy = trial.nonneg_a;
      for (std::size_t j = 0; j < xy.v.size(); ++j)
        xy.v[j] += trial.nonneg_b.v[j];
      for (int si = s; si < t; ++si) {
        const auto vxy = op.evaluate(si, t, xy).v;
        const auto vx = op.evaluate(si, t, trial.nonneg_a).v;
        std::vector<double> mid(vxy.size());
        for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = vxy[j] - vx[j];
        auto upper = detail::emu_values(
            bk, std::vector<double>(trial.nonneg_b.v), trial.mu, t, si);
        auto lower = detail::backward_solve(
            bk, Generator::neg_emu(trial.mu, bk.brownian_dim()),
            Obstacle::none(), std::vector<double>(trial.nonneg_b.v), t, si);
        detail::Comparison up{si, true};
        up.lhs = mid;
        up.rhs = std::move(upper);
        cmps.push_back(std::move(up));
        detail::Comparison lo{si, true};
        lo.lhs = std::move(lower);
        lo.rhs = std::move(mid);
        cmps.push_back(std::move(lo));
      }
      break;
    }

    case AxiomId::MIX: {
      // locality: mixing two claims over an F_s event mixes the values
      detail::require_indicator(trial.event_s, "MIX");
      detail::require_domain(op, trial.claim_a, t, "MIX");
      detail::require_domain(op, trial.claim_b, t, "MIX");
      const auto va = op.evaluate(s, t, trial.claim_a).v;
      const auto vb = op.evaluate(s, t, trial.claim_b).v;
      const auto& ev = trial.event_s.v;
      const auto& av = trial.claim_a.v;
      const auto& bv = trial.claim_b.v;
      typename Backend::path_claim pc;
      if constexpr (std::is_same_v<Backend, LatticeBackend>) {
        pc = [&ev, &av, &bv, s, t](const LatticePathCtx& p) {
          return ev[p.node(s)] != 0.0 ? av[p.node(t)] : bv[p.node(t)];
        };
      } else {
        pc = [&ev, &av, &bv](const EnsemblePathCtx& p) {
          return ev[p.m] != 0.0 ? av[p.m] : bv[p.m];
        };
      }
      const auto lhs = op.evaluate_path_values(s, t, pc);
      detail::Comparison c{s, false};
      c.lhs = lhs;
      c.rhs.resize(lhs.size());
      c.idx = map_indices(s, lhs.size());
      for (std::size_t p = 0; p < lhs.size(); ++p) {
        const auto j = static_cast<std::size_t>(c.idx[p]);
        c.rhs[p] = ev[j] != 0.0 ? va[j] : vb[j];
      }
      cmps.push_back(std::move(c));
      break;
    }
  }

  detail::judge(bk, cmps, pol, rep);
  return rep;
}

}  // namespace rbsde
