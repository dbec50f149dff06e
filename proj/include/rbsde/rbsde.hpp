#pragma once

#include "rbsde/axioms.hpp"
#include "rbsde/backends.hpp"
#include "rbsde/brownian.hpp"
#include "rbsde/bsde.hpp"
#include "rbsde/claims.hpp"
#include "rbsde/config.hpp"
#include "rbsde/csv.hpp"
#include "rbsde/dynamic_operator.hpp"
#include "rbsde/errors.hpp"
#include "rbsde/extension.hpp"
#include "rbsde/generator.hpp"
#include "rbsde/lattice.hpp"
#include "rbsde/obstacle.hpp"
#include "rbsde/oracles.hpp"
#include "rbsde/rbsde_solver.hpp"
#include "rbsde/regression.hpp"
#include "rbsde/solution.hpp"
#include "rbsde/solver_core.hpp"
#include "rbsde/state_map.hpp"
#include "rbsde/step_values.hpp"
#include "rbsde/time_grid.hpp"
#include "rbsde/tree_solve.hpp"
#include "rbsde/trials.hpp"
