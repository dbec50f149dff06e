#pragma once

#include <vector>

#include "rbsde/errors.hpp"
#include "rbsde/step_values.hpp"
#include "rbsde/time_grid.hpp"

namespace rbsde {

/// Full backward solution (Y, Z, K) on [0, T].
///
/// y[i]      value process at step i, i = 0..N
/// z[i][c]   component c of the Z estimate at step i, i = 0..N-1
/// dk[i]     reflection increment applied at step i, i = 0..N-1
///           (identically zero for unreflected solves)
///
/// K is recorded through its increments: on an ensemble the cumulative
/// process is the pathwise prefix sum; on a recombining lattice the
/// cumulative K of a reflected solve is path dependent and has no node
/// representation, so only the increments (which are node functions) are
/// stored. K_0 = 0 and K_N = sum of all increments, pathwise.
struct SolutionTriple {
  BackendKind kind = BackendKind::lattice;
  double horizon = 0.0;
  int steps = 0;
  std::vector<StepValues> y;
  std::vector<std::vector<StepValues>> z;
  std::vector<StepValues> dk;

  /// Cumulative K per step. Exact on ensembles (pathwise sums). On a
  /// lattice it exists only when no reflection ever bound (then it is
  /// identically zero); otherwise the request is rejected.
  std::vector<StepValues> cumulative_k() const {
    std::vector<StepValues> out;
    out.reserve(steps + 1);
    if (kind == BackendKind::ensemble) {
      std::vector<double> acc(y.front().v.size(), 0.0);
      out.push_back(StepValues{kind, 0, acc});
      for (int i = 0; i < steps; ++i) {
        for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += dk[i].v[m];
        out.push_back(StepValues{kind, i + 1, acc});
      }
      return out;
    }
    for (int i = 0; i < steps; ++i)
      for (double x : dk[i].v)
        if (x != 0.0)
          throw ParameterError(
              "cumulative_k: path dependent on a recombining lattice once "
              "reflection binds; use the increments");
    for (int i = 0; i <= steps; ++i)
      out.push_back(StepValues{kind, i, std::vector<double>(y[i].v.size(), 0.0)});
    return out;
  }
};

}  // namespace rbsde
