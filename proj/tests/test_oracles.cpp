#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rbsde/rbsde.hpp"
#include "test_util.hpp"

using namespace rbsde;

TEST_CASE("binomial pricer agrees with the frozen independent values") {
  CHECK(binomial_american_put(100, 100, 0.05, 0.2, 1.0, 500) ==
        Catch::Approx(testutil::oracle("crr_american_put",
                                       "s100_k100_r0.05_v0.2_T1_n500"))
            .margin(1e-10));
  CHECK(binomial_american_put(100, 100, 0.05, 0.2, 1.0, 8) ==
        Catch::Approx(testutil::oracle("crr_american_put",
                                       "s100_k100_r0.05_v0.2_T1_n8"))
            .margin(1e-12));
  CHECK_THROWS_AS(binomial_american_put(100, 100, 0.05, 0.2, 1.0, 0),
                  ParameterError);
  CHECK_THROWS_AS(binomial_american_put(100, 100, 0.05, -0.2, 1.0, 8),
                  ParameterError);
}

TEST_CASE("exhaustive path enumeration matches the recombining sweep") {
  TimeGrid g(1.0, 6);
  const Lattice lat = build_lattice(g);
  LatticeBackend bk(lat);
  for (const auto& claim : {claim_abs_bt(), claim_bt_squared()}) {
    const auto fast = solve_bsde(bk, claim, Generator::emu(1.0));
    const double slow =
        exhaustive_expectation(lat, claim, Generator::emu(1.0));
    CHECK(slow == fast.y[0].v[0]);  // same per-node arithmetic, so bitwise
  }
  // and with a floor
  const auto refl = solve_rbsde(bk, claim_abs_bt(), Generator::neg_emu(1.0),
                                Obstacle::zero());
  const double slow = exhaustive_expectation(lat, claim_abs_bt(),
                                             Generator::neg_emu(1.0),
                                             Obstacle::zero());
  CHECK(slow == refl.y[0].v[0]);
}

TEST_CASE("lattice european put converges to black-scholes") {
  const double bs =
      testutil::oracle("black_scholes_put", "s100_k100_r0.05_v0.2_T1");
  AmericanParams p;
  // binomial error oscillates in N, so grade each grid on its own
  for (int n : {128, 512, 2048}) {
    TimeGrid g(1.0, n);
    const Lattice lat = build_lattice(g);
    LatticeBackend bk(lat, StateMap::gbm(p.spot, p.rate, p.sigma));
    const auto sol = solve_bsde(bk, claim_put(p.spot, p.strike, p.rate, p.sigma),
                                Generator::discount(p.rate));
    INFO("N = " << n);
    CHECK(std::abs(sol.y[0].v[0] - bs) / bs < 2e-3);
  }
}

TEST_CASE("fixture reader validates its input") {
  CHECK_THROWS_AS(read_oracle_fixtures("/nonexistent/oracles.csv"),
                  ParameterError);
  const std::string path = "bad_fixture_test.csv";
  {
    std::ofstream out(path);
    out << "oracle,params,value\nonly_two,fields\n";
  }
  CHECK_THROWS_AS(read_oracle_fixtures(path), ParameterError);
  std::remove(path.c_str());

  const auto fx = read_oracle_fixtures(std::string(RBSDE_FIXTURE_DIR) +
                                       "/oracles.csv");
  CHECK(fx.size() >= 8);
  CHECK_THROWS_AS(fixture_value(fx, "no_such_oracle", "x"), ParameterError);
}
