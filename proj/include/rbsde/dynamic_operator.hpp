#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rbsde/bsde.hpp"
#include "rbsde/solver_core.hpp"
#include "rbsde/tree_solve.hpp"

namespace rbsde {

// Evaluation points of a path-claim result at step s: path prefixes on the
// lattice, paths on an ensemble. point_index maps a point back to the
// node/path index a node-functional cross-section is indexed by.
inline std::size_t path_points(const LatticeBackend&, int s) {
  return std::size_t{1} << s;
}
inline std::size_t path_points(const EnsembleBackend& bk, int s) {
  return bk.width(s);
}
inline std::size_t point_index(const LatticeBackend& bk, int s,
                               std::size_t p) {
  return static_cast<std::size_t>(
      LatticePathCtx{&bk.lattice(), p, s}.node(s));
}
inline std::size_t point_index(const EnsembleBackend&, int, std::size_t p) {
  return p;
}

/// The two-parameter family E_{s,t} induced by restarting the (possibly
/// reflected) backward scheme: feed a cross-section at t in, read the
/// cross-section at s out. Time consistency is structural (the restarted
/// sweep is literally a suffix of the full sweep) and E_{t,t} is the
/// identity.
template <class Backend>
class DynamicOperator {
 public:
  using backend_type = Backend;
  using path_claim = typename Backend::path_claim;

  DynamicOperator(const Backend& bk, Generator gen,
                  Obstacle floor = Obstacle::none())
      : bk_(&bk), gen_(std::move(gen)), floor_(std::move(floor)) {}
  // the operator aliases the backend, so a temporary would dangle
  DynamicOperator(Backend&&, Generator, Obstacle = Obstacle::none()) = delete;

  const Backend& backend() const { return *bk_; }
  const TimeGrid& grid() const { return bk_->grid(); }
  const Generator& generator() const { return gen_; }
  const Obstacle& floor() const { return floor_; }
  double dominating_mu() const { return gen_.dominating_mu(); }

  /// Domain floor at a step: the values claims fed in at that step must
  /// dominate. Empty when unconstrained.
  std::vector<double> floor_values(int step) const {
    if (floor_.is_none()) return {};
    return bk_->eval_state_values(step, floor_.state(), floor_.fn());
  }

  StepValues evaluate(int s_idx, int t_idx, const StepValues& claim) const {
    require_width(claim, bk_->kind(), t_idx, bk_->width(t_idx),
                  "DynamicOperator::evaluate");
    auto vals = detail::backward_solve(*bk_, gen_, floor_,
                                       std::vector<double>(claim.v), t_idx,
                                       s_idx);
    return bk_->wrap(s_idx, std::move(vals));
  }

  /// Value of an F_t-measurable path functional, one entry per evaluation
  /// point at s (prefix or path). This is what the zero-one and
  /// translation axioms need, since their claims are not node functions.
  std::vector<double> evaluate_path_values(int s_idx, int t_idx,
                                           const path_claim& pc) const {
    if constexpr (std::is_same_v<Backend, LatticeBackend>) {
      return exhaustive_path_solve(bk_->lattice(), gen_, floor_, pc, t_idx,
                                   s_idx);
    } else {
      std::vector<double> terminal(bk_->width(t_idx));
      for (std::size_t m = 0; m < terminal.size(); ++m)
        terminal[m] =
            pc(EnsemblePathCtx{&bk_->paths(), static_cast<int>(m)});
      return detail::backward_solve(*bk_, gen_, floor_, std::move(terminal),
                                    t_idx, s_idx);
    }
  }

 private:
  const Backend* bk_;
  Generator gen_;
  Obstacle floor_;
};

/// Shifted family E^zeta_{s,t}[X] = E_{s,t}[X + zeta_t] - zeta_s built from
/// a nonnegative terminal claim zeta, where zeta_i is the base value
/// process of zeta. Inherits the dynamic-operator axioms from the base
/// family; its domain is the nonnegative claims.
template <class Op>
class ZetaShifted {
 public:
  using backend_type = typename Op::backend_type;
  using path_claim = typename backend_type::path_claim;

  // aliases the base operator; a temporary would dangle
  ZetaShifted(Op&&, const TerminalClaim&) = delete;

  ZetaShifted(const Op& base, const TerminalClaim& zeta)
      : base_(&base) {
    const auto& bk = base.backend();
    const int n = bk.grid().steps();
    auto zt = detail::terminal_values(bk, zeta);
    for (double v : zt)
      if (v < 0.0)
        throw ParameterError("zeta_shift: zeta must be nonnegative");
    zeta_.reserve(n + 1);
    for (int i = 0; i < n; ++i)
      zeta_.push_back(base.evaluate(i, n, bk.wrap(n, std::vector<double>(zt))));
    zeta_.push_back(bk.wrap(n, std::move(zt)));
  }

  const backend_type& backend() const { return base_->backend(); }
  const TimeGrid& grid() const { return base_->grid(); }
  double dominating_mu() const { return base_->dominating_mu(); }

  /// Claims fed to the shifted family live above zero.
  std::vector<double> floor_values(int step) const {
    return std::vector<double>(backend().width(step), 0.0);
  }

  const StepValues& zeta_at(int step) const { return zeta_[step]; }

  StepValues evaluate(int s_idx, int t_idx, const StepValues& claim) const {
    const auto& bk = backend();
    require_width(claim, bk.kind(), t_idx, bk.width(t_idx),
                  "ZetaShifted::evaluate");
    // domain is the nonnegative claims; leave room for roundoff when an
    // operator output is fed back in (composition, identity checks)
    for (double v : claim.v)
      if (v < -1e-12)
        throw ParameterError("ZetaShifted: claims must be nonnegative");
    StepValues shifted = claim;
    for (std::size_t j = 0; j < shifted.v.size(); ++j)
      shifted.v[j] += zeta_[t_idx].v[j];
    StepValues out = base_->evaluate(s_idx, t_idx, shifted);
    for (std::size_t j = 0; j < out.v.size(); ++j)
      out.v[j] -= zeta_[s_idx].v[j];
    return out;
  }

  std::vector<double> evaluate_path_values(int s_idx, int t_idx,
                                           const path_claim& pc) const {
    const auto& bk = backend();
    const auto& zt = zeta_[t_idx];
    path_claim shifted;
    if constexpr (std::is_same_v<backend_type, LatticeBackend>) {
      shifted = [&zt, pc, t_idx](const LatticePathCtx& c) {
        return pc(c) + zt.v[c.node(t_idx)];
      };
    } else {
      shifted = [&zt, pc](const EnsemblePathCtx& c) {
        return pc(c) + zt.v[c.m];
      };
    }
    auto out = base_->evaluate_path_values(s_idx, t_idx, shifted);
    for (std::size_t p = 0; p < out.size(); ++p)
      out[p] -= zeta_[s_idx].v[point_index(bk, s_idx, p)];
    return out;
  }

 private:
  const Op* base_;
  std::vector<StepValues> zeta_;
};

template <class Op>
ZetaShifted<Op> zeta_shift(const Op& base, const TerminalClaim& zeta) {
  return ZetaShifted<Op>(base, zeta);
}

}  // namespace rbsde
