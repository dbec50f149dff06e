#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rbsde/backends.hpp"
#include "rbsde/errors.hpp"
#include "rbsde/generator.hpp"
#include "rbsde/obstacle.hpp"

namespace rbsde {
namespace detail {

/// Optional per-step history of a backward pass. Entries are indexed
/// relative to the solve window: y[i - s_idx], etc.
struct BackwardRecord {
  std::vector<std::vector<double>> y;
  std::vector<std::vector<std::vector<double>>> z;  // [step][comp]
  std::vector<std::vector<double>> dk;
};

/// Explicit backward scheme over [s_idx, t_idx], shared by the plain and
/// reflected solvers and by the restarted operator evaluations:
///
///   zw_c     = E[Y_{i+1} dW_c | .]
///   Z_i      = zw / dt
///   Yhat_i   = E[Y_{i+1} | .]
///   Ytilde_i = Yhat_i + g(t_i, Yhat_i, Z_i) dt
///   Y_i      = max(Ytilde_i, S_i)   and   dK_i = Y_i - Ytilde_i
///
/// With no floor the max is skipped, which makes the reflected solve with
/// the no-floor sentinel bitwise identical to the plain solve.
///
/// Discrete comparison (and everything downstream of it) needs the step
/// map to be monotone in the children, which holds when
/// lip_z * sqrt(dt) <= 1; see the README.
template <class Backend>
std::vector<double> backward_solve(const Backend& bk, const Generator& gen,
                                   const Obstacle& floor,
                                   std::vector<double> values, int t_idx,
                                   int s_idx, BackwardRecord* rec = nullptr) {
  const TimeGrid& grid = bk.grid();
  if (s_idx < 0 || t_idx > grid.steps() || s_idx > t_idx)
    throw ParameterError("backward_solve: bad step window");
  if (values.size() != bk.width(t_idx))
    throw ParameterError("backward_solve: terminal values have wrong width");
  if (gen.zdim() != bk.brownian_dim())
    throw ParameterError("backward_solve: generator z-dimension " +
                         std::to_string(gen.zdim()) +
                         " does not match the backend");

  const int d = bk.brownian_dim();
  const double dt = grid.dt();
  const int span = t_idx - s_idx;

  if (!floor.is_none()) {
    const auto s_vals =
        bk.eval_state_values(t_idx, floor.state(), floor.fn());
    for (std::size_t j = 0; j < values.size(); ++j)
      if (values[j] < s_vals[j])
        throw ParameterError(
            "backward_solve: terminal condition below the floor at step " +
            std::to_string(t_idx) + ", index " + std::to_string(j));
  }

  if (rec) {
    rec->y.assign(span + 1, {});
    rec->z.assign(span, {});
    rec->dk.assign(span, {});
    rec->y[span] = values;
  }

  std::vector<double> yhat;
  std::vector<std::vector<double>> zw;
  std::vector<double> zbuf(d);

  for (int i = t_idx - 1; i >= s_idx; --i) {
    bk.step_moments(i, values, yhat, zw);
    const double t = grid.t(i);
    const std::size_t w = bk.width(i);

    std::vector<double> floor_vals;
    if (!floor.is_none())
      floor_vals = bk.eval_state_values(i, floor.state(), floor.fn());

    std::vector<double> next(w), dk;
    std::vector<std::vector<double>> zrec;
    if (rec) {
      zrec.assign(d, std::vector<double>(w));
      dk.assign(w, 0.0);
    }
    bool finite = true;
    for (std::size_t j = 0; j < w; ++j) {
      for (int c = 0; c < d; ++c) {
        zbuf[c] = zw[c][j] / dt;
        if (rec) zrec[c][j] = zbuf[c];
      }
      const double ytilde = yhat[j] + gen(t, yhat[j], zbuf) * dt;
      double yv = ytilde;
      if (!floor.is_none()) {
        yv = std::max(ytilde, floor_vals[j]);
        if (rec) dk[j] = yv - ytilde;
      }
      next[j] = yv;
      finite = finite && std::isfinite(yv);
    }
    if (!finite)
      throw NumericalError("backward recursion overflowed at step " +
                           std::to_string(i));
    if (rec) {
      rec->y[i - s_idx] = next;
      rec->z[i - s_idx] = std::move(zrec);
      rec->dk[i - s_idx] = std::move(dk);
    }
    values = std::move(next);
  }
  return values;
}

}  // namespace detail
}  // namespace rbsde
