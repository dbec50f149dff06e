#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rbsde/bsde.hpp"
#include "rbsde/tree_solve.hpp"

namespace rbsde {

/// Closed form of the linear-driver equation with terminal B_T:
/// y_t = w + mu (T - t), z = 1. Reproduced exactly by the discrete scheme,
/// which makes it a sharp fixture.
inline double closed_form_linear(double mu, double t, double w, double horizon) {
  return w + mu * (horizon - t);
}

/// Brute-force value at the root: enumerate all 2^N equiprobable paths of
/// the binomial approximation and run the backward recursion on the full
/// tree. Independent of the recombining sweep in how values are aggregated,
/// but shares its per-node arithmetic, so node-functional claims must agree
/// bit for bit.
inline double exhaustive_expectation(const Lattice& lat,
                                     const TerminalClaim& claim,
                                     const Generator& gen,
                                     const Obstacle& floor = Obstacle::none()) {
  const int n = lat.grid().steps();
  const int sd = claim.state.dim_for(1);
  auto path_claim = [&](const LatticePathCtx& p) {
    const double w = p.w(n);
    std::vector<double> state(sd);
    claim.state.eval(lat.grid().horizon(), std::span<const double>(&w, 1),
                     state);
    return claim.payoff(state);
  };
  return exhaustive_path_solve(lat, gen, floor, path_claim, n, 0)[0];
}

/// Cox-Ross-Rubinstein binomial American put. The reference the reflected
/// pricing runs are graded against.
inline double binomial_american_put(double spot, double strike, double rate,
                                    double sigma, double horizon, int steps) {
  if (steps < 1) throw ParameterError("binomial_american_put: steps >= 1");
  if (!(sigma > 0.0)) throw ParameterError("binomial_american_put: sigma > 0");
  if (spot < 0.0 || strike < 0.0)
    throw ParameterError("binomial_american_put: negative spot or strike");
  if (!(horizon > 0.0)) throw ParameterError("binomial_american_put: horizon > 0");
  const double dt = horizon / steps;
  const double up = std::exp(sigma * std::sqrt(dt));
  const double dn = 1.0 / up;
  const double grow = std::exp(rate * dt);
  const double p = (grow - dn) / (up - dn);
  if (!(p > 0.0) || !(p < 1.0))
    throw ParameterError(
        "binomial_american_put: degenerate risk-neutral probability");
  const double disc = std::exp(-rate * dt);

  std::vector<double> v(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    const double s = spot * std::pow(up, 2 * j - steps);
    v[j] = std::max(strike - s, 0.0);
  }
  for (int i = steps - 1; i >= 0; --i) {
    for (int j = 0; j <= i; ++j) {
      const double cont = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
      const double s = spot * std::pow(up, 2 * j - i);
      v[j] = std::max(cont, std::max(strike - s, 0.0));
    }
  }
  return v[0];
}

// ---- frozen fixtures ----

struct OracleFixture {
  std::string oracle;
  std::string params;
  double value = 0.0;
};

/// Reads a fixture CSV of rows (oracle, params, value).
inline std::vector<OracleFixture> read_oracle_fixtures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open fixture file " + path);
  std::vector<OracleFixture> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream row(line);
    OracleFixture fx;
    std::string value;
    if (!std::getline(row, fx.oracle, ',') ||
        !std::getline(row, fx.params, ',') || !std::getline(row, value))
      throw ParameterError("malformed fixture row: " + line);
    fx.value = std::stod(value);
    out.push_back(std::move(fx));
  }
  return out;
}

inline double fixture_value(const std::vector<OracleFixture>& fixtures,
                            const std::string& oracle,
                            const std::string& params) {
  for (const auto& fx : fixtures)
    if (fx.oracle == oracle && fx.params == params) return fx.value;
  throw ParameterError("no fixture for " + oracle + " / " + params);
}

}  // namespace rbsde
