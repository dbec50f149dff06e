#pragma once

#include <string>
#include <vector>

#include "rbsde/oracles.hpp"

namespace testutil {

/// Frozen reference values, generated by an independent implementation
/// (see fixtures/gen_oracles.py).
inline double oracle(const std::string& name, const std::string& params) {
  static const std::vector<rbsde::OracleFixture> fx =
      rbsde::read_oracle_fixtures(std::string(RBSDE_FIXTURE_DIR) +
                                  "/oracles.csv");
  return rbsde::fixture_value(fx, name, params);
}

}  // namespace testutil
