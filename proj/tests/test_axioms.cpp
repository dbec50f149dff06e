#include <catch_amalgamated.hpp>

#include <map>

#include "rbsde/rbsde.hpp"

using namespace rbsde;

namespace {

const std::vector<AxiomId> kAll = {AxiomId::D1, AxiomId::D2,  AxiomId::D3,
                                   AxiomId::D4, AxiomId::H1,  AxiomId::H2,
                                   AxiomId::SANDWICH, AxiomId::MIX};

struct LatticeWorld {
  TimeGrid grid{1.0, 8};
  Lattice lat = build_lattice(grid);
  LatticeBackend bk{lat};
};

}  // namespace

TEST_CASE("axiom ids round-trip through their names") {
  for (AxiomId id : kAll) {
    const auto back = parse_axiom_id(to_string(id));
    REQUIRE(back.has_value());
    CHECK(*back == id);
  }
  CHECK_FALSE(parse_axiom_id("D9").has_value());
}

TEST_CASE("full battery passes on the lattice for the reference drivers") {
  LatticeWorld w;
  TrialConfig tc;
  tc.trials = 4;
  for (const auto& gen :
       {Generator::zero(), Generator::linear({1.0}), Generator::emu(1.0)}) {
    DynamicOperator<LatticeBackend> op(w.bk, gen, Obstacle::none());
    const auto reports = run_axiom_battery(op, kAll, tc, {});
    REQUIRE(reports.size() == kAll.size() * tc.trials);
    for (const auto& r : reports) {
      INFO(to_string(r.id) << " trial " << &r - reports.data() << ": "
                           << r.note);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("structural axioms are exact, not just small, on the lattice") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::zero());
  TrialConfig tc;
  tc.trials = 4;
  const auto reports = run_axiom_battery(
      op, {AxiomId::D2, AxiomId::D3, AxiomId::D4, AxiomId::MIX}, tc, {});
  for (const auto& r : reports) {
    INFO(to_string(r.id) << ": " << r.note);
    CHECK(r.pass);
    CHECK(r.violation == 0.0);
  }
}

TEST_CASE("reflected operator on a floor passes the battery") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::zero());
  TrialConfig tc;
  tc.trials = 3;
  const auto reports = run_axiom_battery(op, kAll, tc, {});
  for (const auto& r : reports) {
    INFO(to_string(r.id) << ": " << r.note);
    CHECK(r.pass);
  }
}

TEST_CASE("battery passes statistically on a path ensemble") {
  TimeGrid grid(1.0, 8);
  const PathEnsemble ens = simulate_paths(grid, 1, 20000, 31, 0);
  EnsembleBackend bk(ens);
  TrialConfig tc;
  tc.trials = 3;
  for (const auto& floor : {Obstacle::none(), Obstacle::zero()}) {
    DynamicOperator<EnsembleBackend> op(bk, Generator::emu(1.0), floor);
    const auto reports = run_axiom_battery(op, kAll, tc, {});
    for (const auto& r : reports) {
      INFO(to_string(r.id) << " [" << to_string(r.backend) << "]: " << r.note);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("zeta-shifted family inherits the battery") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> base(w.bk, Generator::emu(1.0),
                                       Obstacle::zero());
  const auto zeta = map_claim(claim_bt_squared(), "ZETA",
                              [](double v) { return v + 0.25; });
  const auto op = zeta_shift(base, zeta);
  TrialConfig tc;
  tc.trials = 3;
  const auto reports = run_axiom_battery(op, kAll, tc, {});
  for (const auto& r : reports) {
    INFO(to_string(r.id) << ": " << r.note);
    CHECK(r.pass);
  }
}

TEST_CASE("under-declaring the z slope is caught as a domination failure") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::none());
  TrialConfig tc;
  tc.trials = 4;
  tc.declared_mu = 0.25;  // true slope is 1.0
  const auto reports = run_axiom_battery(op, {AxiomId::H1}, tc, {});
  bool any_fail = false;
  for (const auto& r : reports) {
    any_fail = any_fail || (!r.pass && r.violation > 1e-3);
  }
  CHECK(any_fail);
}

TEST_CASE("report rows serialize with stable precision") {
  AxiomReport r;
  r.id = AxiomId::H2;
  r.backend = BackendKind::lattice;
  r.violation = 1.0 / 3.0;
  r.tolerance = 1e-10;
  r.pass = false;
  r.witness_step = 3;
  r.witness_index = 7;
  CHECK(AxiomReport::csv_header() ==
        "axiom,backend,violation,tolerance,pass,witness_step,witness_index");
  CHECK(r.csv_row() == "H2,lattice,0.33333333333333331,1e-10,0,3,7");
}

TEST_CASE("worst_by_axiom collapses trials and keeps failures") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::none());
  TrialConfig tc;
  tc.trials = 3;
  const auto reports =
      run_axiom_battery(op, {AxiomId::D2, AxiomId::H1}, tc, {});
  const auto collapsed = worst_by_axiom(reports);
  REQUIRE(collapsed.size() == 2);
  std::map<AxiomId, int> seen;
  for (const auto& r : collapsed) {
    ++seen[r.id];
    CHECK(r.pass);
  }
  CHECK(seen[AxiomId::D2] == 1);
  CHECK(seen[AxiomId::H1] == 1);
}

TEST_CASE("battery rejects degenerate requests") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::none());
  CHECK_THROWS_AS(run_axiom_battery(op, {}, {}, {}), ParameterError);
  TrialConfig none;
  none.trials = 0;
  CHECK_THROWS_AS(run_axiom_battery(op, {AxiomId::D1}, none, {}),
                  ParameterError);
}
