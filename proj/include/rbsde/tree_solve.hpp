#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rbsde/backends.hpp"
#include "rbsde/errors.hpp"
#include "rbsde/generator.hpp"
#include "rbsde/lattice.hpp"
#include "rbsde/obstacle.hpp"

namespace rbsde {

/// Hard cap for exhaustive path enumeration: 2^20 leaves.
inline constexpr int kMaxExhaustiveSteps = 20;

/// Backward recursion over the full (non-recombining) binary path tree.
///
/// The claim is an arbitrary functional of the path up to step t_idx, so
/// F_t-measurable payoffs that are not node functions (the ones a
/// recombining sweep cannot represent) are handled exactly. The returned
/// vector holds one value per path prefix of length s_idx; bit b of a
/// prefix is the (b+1)-th up/down move.
///
/// The per-node arithmetic is shared with the recombining solver, so for
/// node-functional claims the two agree bit for bit.
inline std::vector<double> exhaustive_path_solve(
    const Lattice& lat, const Generator& gen, const Obstacle& floor,
    const std::function<double(const LatticePathCtx&)>& claim, int t_idx,
    int s_idx) {
  const TimeGrid& grid = lat.grid();
  if (s_idx < 0 || s_idx > t_idx || t_idx > grid.steps())
    throw ParameterError("exhaustive_path_solve: bad step window");
  if (t_idx > kMaxExhaustiveSteps)
    throw ParameterError("exhaustive_path_solve: limited to 2^20 paths");
  if (gen.zdim() != 1)
    throw ParameterError("exhaustive_path_solve: one Brownian dimension");

  const double dt = grid.dt();
  const double sdt = grid.sqrt_dt();

  std::vector<double> values(std::size_t{1} << t_idx);
  for (std::uint64_t p = 0; p < values.size(); ++p)
    values[p] = claim(LatticePathCtx{&lat, p, t_idx});

  const int floor_dim = floor.is_none() ? 0 : floor.state().dim_for(1);
  std::vector<double> fstate(floor_dim);

  for (int i = t_idx - 1; i >= s_idx; --i) {
    const double t = grid.t(i);
    const std::uint64_t half = std::uint64_t{1} << i;
    std::vector<double> next(half);
    for (std::uint64_t p = 0; p < half; ++p) {
      const double up = values[p + half];
      const double dn = values[p];
      const double zw = detail::child_weighted(up, dn, sdt);
      const double z = zw / dt;
      const double yhat = detail::child_mean(up, dn);
      const double ytilde =
          yhat + gen(t, yhat, std::span<const double>(&z, 1)) * dt;
      double yv = ytilde;
      if (!floor.is_none()) {
        const double w = lat.node(i, static_cast<int>(std::popcount(p)));
        floor.state().eval(t, std::span<const double>(&w, 1), fstate);
        yv = std::max(ytilde, floor.value(t, fstate));
      }
      next[p] = yv;
    }
    values = std::move(next);
  }
  return values;
}

}  // namespace rbsde
