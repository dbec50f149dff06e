#pragma once

#include <string>
#include <vector>

#include "rbsde/errors.hpp"

namespace rbsde {

enum class BackendKind { lattice, ensemble };

inline const char* to_string(BackendKind k) {
  return k == BackendKind::lattice ? "lattice" : "ensemble";
}

/// One cross-section of a process: the values attached to every node of a
/// lattice step, or to every path of an ensemble at a step. Width must match
/// the owning backend (step+1 nodes on a lattice, path count on an ensemble);
/// backends validate on use.
struct StepValues {
  BackendKind kind = BackendKind::lattice;
  int step = 0;
  std::vector<double> v;
};

inline void require_width(const StepValues& sv, BackendKind kind, int step,
                          std::size_t width, const char* where) {
  if (sv.kind != kind)
    throw ParameterError(std::string(where) + ": backend kind mismatch");
  if (sv.step != step)
    throw ParameterError(std::string(where) + ": step index mismatch (have " +
                         std::to_string(sv.step) + ", want " +
                         std::to_string(step) + ")");
  if (sv.v.size() != width)
    throw ParameterError(std::string(where) + ": width mismatch at step " +
                         std::to_string(step));
}

}  // namespace rbsde
