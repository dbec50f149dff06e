#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rbsde/brownian.hpp"
#include "rbsde/errors.hpp"
#include "rbsde/lattice.hpp"
#include "rbsde/regression.hpp"
#include "rbsde/state_map.hpp"
#include "rbsde/step_values.hpp"

namespace rbsde {

namespace detail {

// Two-child conditional moments under the fair-coin transition. These two
// lines are shared verbatim by the recombining solver and the exhaustive
// path-tree oracle; the bit-for-bit agreement tests depend on both engines
// doing literally the same arithmetic.
inline double child_mean(double up, double dn) { return 0.5 * (up + dn); }
inline double child_weighted(double up, double dn, double sdt) {
  return 0.5 * (up * sdt + dn * (-sdt));
}

}  // namespace detail

/// View of one enumerated lattice path; bit i of `bits` is the i-th
/// up/down move. Passed to path-dependent (non node-functional) claims.
struct LatticePathCtx {
  const Lattice* lat = nullptr;
  std::uint64_t bits = 0;
  int len = 0;

  int node(int step) const {
    const std::uint64_t mask = step >= 64 ? ~0ULL : ((1ULL << step) - 1);
    return static_cast<int>(std::popcount(bits & mask));
  }
  double w(int step) const { return lat->node(step, node(step)); }
};

/// View of one sampled path.
struct EnsemblePathCtx {
  const PathEnsemble* ens = nullptr;
  int m = 0;

  double w(int step, int c = 0) const { return ens->position(m, step)[c]; }
};

/// Exact conditional-expectation engine on the recombining lattice. One
/// Brownian dimension by design; richer state enters through the state map.
class LatticeBackend {
 public:
  using path_ctx = LatticePathCtx;
  using path_claim = std::function<double(const LatticePathCtx&)>;

  explicit LatticeBackend(const Lattice& lat, StateMap state = {})
      : lat_(&lat), state_(std::move(state)) {}
  // the backend aliases the lattice, so a temporary would dangle
  explicit LatticeBackend(Lattice&&, StateMap = {}) = delete;

  BackendKind kind() const { return BackendKind::lattice; }
  const TimeGrid& grid() const { return lat_->grid(); }
  const Lattice& lattice() const { return *lat_; }
  const StateMap& state_map() const { return state_; }
  int brownian_dim() const { return 1; }
  int state_dim() const { return state_.dim_for(1); }
  std::size_t width(int step) const { return static_cast<std::size_t>(step + 1); }

  /// E[next | node] seen from step `step`: the plain two-child average.
  std::vector<double> cond_exp(int step, std::span<const double> next) const {
    check(step, next);
    std::vector<double> out(width(step));
    for (int j = 0; j <= step; ++j)
      out[j] = detail::child_mean(next[j + 1], next[j]);
    return out;
  }

  /// E[next * dW | node]; the increment weight is +-sqrt(dt).
  std::vector<double> cond_exp_weighted(int step, std::span<const double> next,
                                        int comp = 0) const {
    check(step, next);
    if (comp != 0)
      throw ParameterError("LatticeBackend: only one Brownian component");
    const double sdt = grid().sqrt_dt();
    std::vector<double> out(width(step));
    for (int j = 0; j <= step; ++j)
      out[j] = detail::child_weighted(next[j + 1], next[j], sdt);
    return out;
  }

  /// Mean and weighted moments in one call; what the backward solvers use.
  void step_moments(int step, std::span<const double> next,
                    std::vector<double>& yhat,
                    std::vector<std::vector<double>>& zw) const {
    yhat = cond_exp(step, next);
    zw.resize(1);
    zw[0] = cond_exp_weighted(step, next, 0);
  }

  /// f(t_step, state) evaluated at every node.
  std::vector<double> eval_state_values(
      int step, const StateMap& map,
      const std::function<double(double, std::span<const double>)>& f) const {
    const double t = grid().t(step);
    const int sd = map.dim_for(1);
    std::vector<double> state(sd);
    std::vector<double> out(width(step));
    double w = 0.0;
    for (int j = 0; j <= step; ++j) {
      w = lat_->node(step, j);
      map.eval(t, std::span<const double>(&w, 1), state);
      out[j] = f(t, state);
    }
    return out;
  }

  /// Probability-weighted mean at a step.
  double mean(int step, std::span<const double> v) const {
    check_width(step, v);
    const auto& p = probs(step);
    double s = 0.0;
    for (int j = 0; j <= step; ++j) s += p[j] * v[j];
    return s;
  }

  /// Probability-weighted mean of f(v_j).
  double mean_of(int step, std::span<const double> v,
                 const std::function<double(double)>& f) const {
    check_width(step, v);
    const auto& p = probs(step);
    double s = 0.0;
    for (int j = 0; j <= step; ++j) s += p[j] * f(v[j]);
    return s;
  }

  const std::vector<double>& probs(int step) const {
    while (static_cast<int>(probs_.size()) <= step) {
      if (probs_.empty()) {
        probs_.push_back({1.0});
        continue;
      }
      const auto& prev = probs_.back();
      const int i = static_cast<int>(probs_.size());
      std::vector<double> q(i + 1, 0.0);
      for (int j = 0; j < i; ++j) {
        q[j] += 0.5 * prev[j];
        q[j + 1] += 0.5 * prev[j];
      }
      probs_.push_back(std::move(q));
    }
    return probs_[step];
  }

  StepValues wrap(int step, std::vector<double> v) const {
    return StepValues{BackendKind::lattice, step, std::move(v)};
  }

 private:
  void check(int step, std::span<const double> next) const {
    if (step < 0 || step >= grid().steps())
      throw ParameterError("LatticeBackend: step out of range");
    if (next.size() != width(step + 1))
      throw ParameterError("LatticeBackend: child values have wrong width");
  }
  void check_width(int step, std::span<const double> v) const {
    if (v.size() != width(step))
      throw ParameterError("LatticeBackend: values have wrong width");
  }

  const Lattice* lat_;
  StateMap state_;
  mutable std::vector<std::vector<double>> probs_;
};

/// Regression-based conditional-expectation engine on a path ensemble.
/// Projections use a polynomial basis in the backend's Markov state; the
/// Z-moment regresses the centered response (value minus its fitted
/// conditional mean) against the increment, which targets the same moment
/// (E[dW | F_i] = 0) with less variance and keeps the scheme exactly
/// equivariant under constant shifts of the terminal condition.
class EnsembleBackend {
 public:
  using path_ctx = EnsemblePathCtx;
  using path_claim = std::function<double(const EnsemblePathCtx&)>;

  EnsembleBackend(const PathEnsemble& ens, RegressionSpec spec = {},
                  StateMap state = {})
      : ens_(&ens), spec_(spec), state_(std::move(state)) {
    if (spec_.degree < 0)
      throw ParameterError("EnsembleBackend: degree must be >= 0");
    if (spec_.ridge < 0.0)
      throw ParameterError("EnsembleBackend: ridge must be >= 0");
  }
  // the backend aliases the ensemble, so a temporary would dangle
  EnsembleBackend(PathEnsemble&&, RegressionSpec = {}, StateMap = {}) = delete;

  BackendKind kind() const { return BackendKind::ensemble; }
  const TimeGrid& grid() const { return ens_->grid(); }
  const PathEnsemble& paths() const { return *ens_; }
  const RegressionSpec& spec() const { return spec_; }
  const StateMap& state_map() const { return state_; }
  int brownian_dim() const { return ens_->dim(); }
  int state_dim() const { return state_.dim_for(ens_->dim()); }
  std::size_t width(int) const { return static_cast<std::size_t>(ens_->count()); }

  std::vector<double> cond_exp(int step, std::span<const double> next) const {
    check(step, next);
    return regression(step).fit(next);
  }

  std::vector<double> cond_exp_weighted(int step, std::span<const double> next,
                                        int comp = 0) const {
    check(step, next);
    if (comp < 0 || comp >= ens_->dim())
      throw ParameterError("EnsembleBackend: component out of range");
    const auto reg = regression(step);
    return weighted_with(reg, step, next, comp);
  }

  /// One regression shared between the mean and all d weighted moments;
  /// the backward solvers call this once per step.
  void step_moments(int step, std::span<const double> next,
                    std::vector<double>& yhat,
                    std::vector<std::vector<double>>& zw) const {
    check(step, next);
    const auto reg = regression(step);
    yhat = reg.fit(next);
    zw.resize(ens_->dim());
    const int m_count = ens_->count();
    std::vector<double> centered(m_count);
    for (int c = 0; c < ens_->dim(); ++c) {
      for (int m = 0; m < m_count; ++m)
        centered[m] = (next[m] - yhat[m]) * ens_->increment(m, step, c);
      zw[c] = reg.fit(centered);
    }
  }

  std::vector<double> eval_state_values(
      int step, const StateMap& map,
      const std::function<double(double, std::span<const double>)>& f) const {
    const double t = grid().t(step);
    const int sd = map.dim_for(ens_->dim());
    std::vector<double> state(sd);
    std::vector<double> out(width(step));
    for (int m = 0; m < ens_->count(); ++m) {
      map.eval(t, ens_->position(m, step), state);
      out[m] = f(t, state);
    }
    return out;
  }

  double mean(int, std::span<const double> v) const {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  double mean_of(int, std::span<const double> v,
                 const std::function<double(double)>& f) const {
    double s = 0.0;
    for (double x : v) s += f(x);
    return s / static_cast<double>(v.size());
  }

  StepValues wrap(int step, std::vector<double> v) const {
    return StepValues{BackendKind::ensemble, step, std::move(v)};
  }

 private:
  detail::StepRegression regression(int step) const {
    const int m_count = ens_->count();
    const int sd = state_dim();
    const double t = grid().t(step);
    std::vector<double> states(static_cast<std::size_t>(m_count) * sd);
    std::vector<double> buf(sd);
    for (int m = 0; m < m_count; ++m) {
      state_.eval(t, ens_->position(m, step), buf);
      for (int c = 0; c < sd; ++c) states[m * sd + c] = buf[c];
    }
    return detail::StepRegression(states, m_count, sd, spec_, step);
  }

  std::vector<double> weighted_with(const detail::StepRegression& reg, int step,
                                    std::span<const double> next,
                                    int comp) const {
    const int m_count = ens_->count();
    std::vector<double> yhat = reg.fit(next);
    std::vector<double> centered(m_count);
    for (int m = 0; m < m_count; ++m)
      centered[m] = (next[m] - yhat[m]) * ens_->increment(m, step, comp);
    return reg.fit(centered);
  }

  void check(int step, std::span<const double> next) const {
    if (step < 0 || step >= grid().steps())
      throw ParameterError("EnsembleBackend: step out of range");
    if (next.size() != width(step + 1))
      throw ParameterError("EnsembleBackend: values have wrong width");
  }

  const PathEnsemble* ens_;
  RegressionSpec spec_;
  StateMap state_;
};

}  // namespace rbsde
