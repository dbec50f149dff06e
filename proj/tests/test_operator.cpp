#include <catch_amalgamated.hpp>

#include <cmath>

#include "rbsde/rbsde.hpp"

using namespace rbsde;

namespace {

struct LatticeWorld {
  TimeGrid grid{1.0, 8};
  Lattice lat = build_lattice(grid);
  LatticeBackend bk{lat};
};

struct EnsembleWorld {
  TimeGrid grid{1.0, 8};
  PathEnsemble ens = simulate_paths(grid, 1, 20000, 23, 0);
  EnsembleBackend bk{ens};
};

template <class Backend>
StepValues poly_section(const Backend& bk, int step, double a, double b,
                        double c) {
  const auto w = [&](std::size_t j) {
    if constexpr (std::is_same_v<Backend, LatticeBackend>)
      return bk.lattice().node(step, static_cast<int>(j));
    else
      return bk.paths().position(static_cast<int>(j), step)[0];
  };
  std::vector<double> v(bk.width(step));
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = w(j);
    v[j] = a + b * x + c * x * x;
  }
  return bk.wrap(step, std::move(v));
}

}  // namespace

TEST_CASE("operator is the identity at the evaluation time") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::none());
  const auto claim = poly_section(w.bk, 5, 0.4, 1.0, 0.3);
  const auto out = op.evaluate(5, 5, claim);
  for (std::size_t j = 0; j < claim.v.size(); ++j)
    CHECK(out.v[j] == claim.v[j]);
}

TEST_CASE("constants ride through untouched") {
  LatticeWorld lw;
  EnsembleWorld ew;
  const auto run = [](const auto& bk, double tol) {
    DynamicOperator<std::decay_t<decltype(bk)>> op(bk, Generator::emu(1.0),
                                                   Obstacle::none());
    const int n = bk.grid().steps();
    for (double c : {0.0, 1.0, -2.5}) {
      const auto out =
          op.evaluate(2, n, bk.wrap(n, std::vector<double>(bk.width(n), c)));
      for (double v : out.v) CHECK(v == Catch::Approx(c).margin(tol));
    }
  };
  run(lw.bk, 0.0);    // exact on the lattice
  run(ew.bk, 1e-12);  // intercept column is unpenalized, so exact up to fp
}

TEST_CASE("restarted evaluations compose exactly") {
  LatticeWorld w;
  for (const auto& floor : {Obstacle::none(), Obstacle::zero()}) {
    DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0), floor);
    const auto claim = poly_section(w.bk, 8, 1.2, 0.5, 0.4);
    const auto direct = op.evaluate(2, 8, claim);
    const auto nested = op.evaluate(2, 5, op.evaluate(5, 8, claim));
    for (std::size_t j = 0; j < direct.v.size(); ++j)
      CHECK(nested.v[j] == direct.v[j]);  // bitwise: same suffix sweep
  }
}

TEST_CASE("comparison holds nodewise when mu sqrt(dt) <= 1") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::none());
  const auto lo = poly_section(w.bk, 8, 0.5, 1.0, 0.2);
  auto hi = lo;
  for (std::size_t j = 0; j < hi.v.size(); ++j)
    hi.v[j] += 0.1 * (1.0 + std::sin(double(j)));
  const auto elo = op.evaluate(0, 8, lo);
  const auto ehi = op.evaluate(0, 8, hi);
  CHECK(ehi.v[0] >= elo.v[0]);
}

TEST_CASE("floored operator output dominates the floor") {
  LatticeWorld w;
  const auto floor = Obstacle::constant(0.25);
  DynamicOperator<LatticeBackend> op(w.bk, Generator::neg_emu(1.0), floor);
  // claim hugging the floor: reflection must keep every step above it
  const auto claim =
      w.bk.wrap(8, std::vector<double>(w.bk.width(8), 0.25 + 0.01));
  for (int s = 0; s < 8; ++s) {
    const auto out = op.evaluate(s, 8, claim);
    const auto fl = op.floor_values(s);
    for (std::size_t j = 0; j < out.v.size(); ++j)
      CHECK(out.v[j] >= fl[j] - 1e-15);
  }
}

TEST_CASE("operator rejects claims below the floor or off the grid") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::emu(1.0),
                                     Obstacle::zero());
  CHECK_THROWS_AS(
      op.evaluate(0, 8, w.bk.wrap(8, std::vector<double>(9, -1.0))),
      ParameterError);
  CHECK_THROWS_AS(
      op.evaluate(5, 3, w.bk.wrap(3, std::vector<double>(4, 1.0))),
      ParameterError);
  // width mismatch between the claim and its step
  CHECK_THROWS_AS(
      op.evaluate(0, 8, w.bk.wrap(4, std::vector<double>(5, 1.0))),
      ParameterError);
}

TEST_CASE("path functionals are evaluated per prefix on the lattice") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> op(w.bk, Generator::zero(),
                                     Obstacle::none());
  // the terminal node value as a path claim: must agree with the node solve
  auto pc = [&](const LatticePathCtx& p) {
    return std::abs(p.w(8));
  };
  const auto pv = op.evaluate_path_values(0, 8, pc);
  REQUIRE(pv.size() == 1);
  const auto nv = op.evaluate(
      0, 8, w.bk.wrap(8, detail::terminal_values(w.bk, claim_abs_bt())));
  CHECK(pv[0] == Catch::Approx(nv.v[0]).margin(1e-14));
}

TEST_CASE("zeta shift keeps conformance while translating the floor") {
  LatticeWorld w;
  DynamicOperator<LatticeBackend> base(w.bk, Generator::emu(1.0),
                                       Obstacle::zero());
  // zeta: a positive terminal profile solved backwards as the moving floor
  const auto zeta_claim = map_claim(claim_bt_squared(), "ZETA",
                                    [](double v) { return v + 0.5; });
  ZetaShifted<DynamicOperator<LatticeBackend>> op(base, zeta_claim);

  // identity and composition survive the conjugation
  const auto claim = poly_section(w.bk, 8, 2.0, 0.3, 0.1);
  const auto at_t = op.evaluate(8, 8, claim);
  for (std::size_t j = 0; j < claim.v.size(); ++j)
    CHECK(at_t.v[j] == Catch::Approx(claim.v[j]).margin(1e-12));
  const auto direct = op.evaluate(1, 8, claim);
  const auto nested = op.evaluate(1, 4, op.evaluate(4, 8, claim));
  for (std::size_t j = 0; j < direct.v.size(); ++j)
    CHECK(nested.v[j] == Catch::Approx(direct.v[j]).margin(1e-11));

  // its domain floor is zero by construction
  for (int s = 0; s <= 8; ++s)
    for (double v : op.floor_values(s)) CHECK(v == 0.0);
}

TEST_CASE("dominating mu reflects the generator") {
  CHECK(Generator::emu(1.5).dominating_mu() == 1.5);
  CHECK(Generator::zero().dominating_mu() == 0.0);
  CHECK(Generator::linear({0.6, 0.8}).dominating_mu() ==
        Catch::Approx(1.0).margin(1e-15));
  CHECK(Generator::emu(2.0, 3).zdim() == 3);
  CHECK_THROWS_AS(Generator::emu(-1.0), ParameterError);
  CHECK_THROWS_AS(Generator::linear({}), ParameterError);
}
