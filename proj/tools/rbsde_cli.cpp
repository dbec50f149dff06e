// Command-line front end: reads a key=value config, runs one experiment,
// writes a CSV artifact. Reruns with identical config and seed produce
// byte-identical output.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbsde/rbsde.hpp"

namespace {

using namespace rbsde;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

/// Owns every object a run needs; backends alias grid/lattice/ensemble, so
/// the whole bundle lives on the heap for the duration of a command.
struct Setup {
  TimeGrid grid{1.0, 1};
  std::optional<Lattice> lat;
  std::optional<PathEnsemble> ens;
  std::optional<LatticeBackend> lbk;
  std::optional<EnsembleBackend> ebk;
  Generator gen = Generator::zero();
  TerminalClaim claim = claim_bt();
  Obstacle floor = Obstacle::none();
  bool is_lattice = true;

  template <class F>
  auto with_backend(F&& f) const {
    return is_lattice ? f(*lbk) : f(*ebk);
  }
};

Generator build_generator(const Config& cfg) {
  const std::string name = cfg.required("generator");
  if (name == "zero") return Generator::zero();
  if (name == "emu") return Generator::emu(cfg.num("mu", 1.0));
  if (name == "neg_emu") return Generator::neg_emu(cfg.num("mu", 1.0));
  if (name == "discount") return Generator::discount(cfg.num("rate", 0.05));
  if (name == "linear") {
    auto b = cfg.num_list("b");
    if (b.empty()) b = {1.0};
    return Generator::linear(b);
  }
  throw ParameterError("config: unknown generator '" + name + "'");
}

TerminalClaim build_claim(const Config& cfg) {
  const std::string name = cfg.required("claim");
  if (name == "bt") return claim_bt();
  if (name == "abs_bt") return claim_abs_bt();
  if (name == "bt_squared") return claim_bt_squared();
  if (name == "constant") return claim_constant(cfg.num("claim_value", 1.0));
  if (name == "put")
    return claim_put(cfg.num("spot", 100.0), cfg.num("strike", 100.0),
                     cfg.num("rate", 0.05), cfg.num("sigma", 0.2));
  if (name == "call")
    return claim_call(cfg.num("spot", 100.0), cfg.num("strike", 100.0),
                      cfg.num("rate", 0.05), cfg.num("sigma", 0.2));
  throw ParameterError("config: unknown claim '" + name + "'");
}

Obstacle build_floor(const Config& cfg) {
  const std::string name = cfg.str("floor", "none");
  if (name == "none") return Obstacle::none();
  if (name == "zero") return Obstacle::zero();
  if (name == "constant") return Obstacle::constant(cfg.num("floor_level", 0.0));
  if (name == "put")
    return Obstacle::put(cfg.num("spot", 100.0), cfg.num("strike", 100.0),
                         cfg.num("rate", 0.05), cfg.num("sigma", 0.2));
  throw ParameterError("config: unknown floor '" + name + "'");
}

StateMap build_features(const Config& cfg) {
  const std::string name = cfg.str("features", "identity");
  if (name == "identity") return {};
  if (name == "gbm")
    return StateMap::gbm(cfg.num("spot", 100.0), cfg.num("rate", 0.05),
                         cfg.num("sigma", 0.2));
  if (name == "put")
    return StateMap::put_features(cfg.num("spot", 100.0),
                                  cfg.num("strike", 100.0),
                                  cfg.num("rate", 0.05), cfg.num("sigma", 0.2));
  throw ParameterError("config: unknown features '" + name + "'");
}

std::unique_ptr<Setup> build_setup(const Config& cfg, int steps,
                                   std::optional<std::uint64_t> seed_override) {
  auto s = std::make_unique<Setup>();
  s->grid = TimeGrid(cfg.num("T", 1.0), steps);
  const std::string backend = cfg.str("backend", "lattice");
  s->gen = build_generator(cfg);
  s->claim = build_claim(cfg);
  s->floor = build_floor(cfg);
  const StateMap features = build_features(cfg);
  if (backend == "lattice") {
    s->is_lattice = true;
    s->lat.emplace(build_lattice(s->grid));
    s->lbk.emplace(*s->lat, features);
  } else if (backend == "ensemble") {
    s->is_lattice = false;
    const int m = cfg.integer("M", 10000);
    const int dim = cfg.integer("dim", 1);
    const std::uint64_t cfg_seed = cfg.seed("seed", 1);
    const std::uint64_t seed = seed_override ? *seed_override : cfg_seed;
    const std::uint64_t stream = cfg.seed("stream", 0);
    s->ens.emplace(simulate_paths(s->grid, dim, m, seed, stream));
    RegressionSpec spec;
    spec.degree = cfg.integer("degree", spec.degree);
    spec.ridge = cfg.num("ridge", spec.ridge);
    s->ebk.emplace(*s->ens, spec, features);
  } else {
    throw ParameterError("config: backend must be lattice or ensemble");
  }
  return s;
}

int steps_from(const Config& cfg) {
  const int n = cfg.integer("N", 8);
  if (n < 1) throw ParameterError("config: N must be >= 1");
  return n;
}

// ---------------------------------------------------------------- solve ---

int cmd_solve(const Config& cfg, const std::string& out,
              std::optional<std::uint64_t> seed_override) {
  auto s = build_setup(cfg, steps_from(cfg), seed_override);
  cfg.fail_on_unused();
  const auto sol = s->with_backend([&](const auto& bk) {
    return solve_rbsde(bk, s->claim, s->gen, s->floor);
  });
  CsvTable csv("step,mean_y,mean_abs_z,mean_k");
  const int n = s->grid.steps();
  double mean_k = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double my = s->with_backend(
        [&](const auto& bk) { return bk.mean(i, sol.y[i].v); });
    double mz = 0.0;
    if (i < n) {
      std::vector<double> znorm(sol.y[i].v.size(), 0.0);
      for (const auto& comp : sol.z[i])
        for (std::size_t j = 0; j < znorm.size(); ++j)
          znorm[j] += comp.v[j] * comp.v[j];
      for (auto& v : znorm) v = std::sqrt(v);
      mz = s->with_backend([&](const auto& bk) { return bk.mean(i, znorm); });
    }
    csv.row(i, my, mz, mean_k);
    if (i < n)
      mean_k += s->with_backend(
          [&](const auto& bk) { return bk.mean(i, sol.dk[i].v); });
  }
  write_text_file(out, csv.text());
  std::printf("solve: %s backend, N=%d, wrote %s\n",
              s->is_lattice ? "lattice" : "ensemble", n, out.c_str());
  return 0;
}

// --------------------------------------------------------- check-axioms ---

int cmd_check_axioms(const Config& cfg, const std::string& out,
                     std::optional<std::uint64_t> seed_override) {
  auto s = build_setup(cfg, steps_from(cfg), seed_override);
  const auto names = cfg.str_list("axioms");
  if (names.empty())
    throw ParameterError("config: check-axioms needs a non-empty axiom list");
  std::vector<AxiomId> which;
  for (const auto& name : names) {
    const auto id = parse_axiom_id(name);
    if (!id) throw ParameterError("config: unknown axiom '" + name + "'");
    which.push_back(*id);
  }
  TrialConfig tc;
  tc.trials = cfg.integer("trials", tc.trials);
  const std::uint64_t cfg_seed = cfg.seed("seed", tc.seed);
  tc.seed = seed_override ? *seed_override : cfg_seed;
  tc.declared_mu = cfg.num("declared_mu", tc.declared_mu);
  TolerancePolicy pol;
  pol.lattice_abs = cfg.num("lattice_tol", pol.lattice_abs);
  pol.se_mult = cfg.num("se_mult", pol.se_mult);
  cfg.fail_on_unused();

  const auto reports = s->with_backend([&](const auto& bk) {
    DynamicOperator<std::decay_t<decltype(bk)>> op(bk, s->gen, s->floor);
    return run_axiom_battery(op, which, tc, pol);
  });
  CsvTable csv(AxiomReport::csv_header());
  bool all_pass = true;
  for (const auto& r : reports) {
    csv.raw_row(r.csv_row());
    all_pass = all_pass && r.pass;
  }
  write_text_file(out, csv.text());
  std::printf("check-axioms: %zu reports, %s, wrote %s\n", reports.size(),
              all_pass ? "all pass" : "FAILURES", out.c_str());
  return all_pass ? 0 : kExitCheckFailed;
}

// -------------------------------------------------------- price-american ---

int cmd_price_american(const Config& cfg, const std::string& out,
                       std::optional<std::uint64_t> seed_override) {
  AmericanParams p;
  p.spot = cfg.num("spot", p.spot);
  p.strike = cfg.num("strike", p.strike);
  p.rate = cfg.num("rate", p.rate);
  p.sigma = cfg.num("sigma", p.sigma);
  const double horizon = cfg.num("T", 1.0);
  const int n = steps_from(cfg);
  const int oracle_steps = cfg.integer("oracle_steps", 500);
  const std::string backend = cfg.str("backend", "lattice");

  PricedAmerican priced;
  if (backend == "lattice") {
    TimeGrid grid(horizon, n);
    const Lattice lat = build_lattice(grid);
    cfg.fail_on_unused();
    priced = price_american(lat, p);
  } else if (backend == "ensemble") {
    TimeGrid grid(horizon, n);
    const int m = cfg.integer("M", 100000);
    const std::uint64_t cfg_seed = cfg.seed("seed", 1);
    const std::uint64_t seed = seed_override ? *seed_override : cfg_seed;
    const std::uint64_t stream = cfg.seed("stream", 0);
    RegressionSpec spec;
    spec.degree = cfg.integer("degree", spec.degree);
    spec.ridge = cfg.num("ridge", spec.ridge);
    cfg.fail_on_unused();
    const PathEnsemble ens = simulate_paths(grid, 1, m, seed, stream);
    priced = price_american(ens, spec, p);
  } else {
    throw ParameterError("config: backend must be lattice or ensemble");
  }

  const double oracle = binomial_american_put(p.spot, p.strike, p.rate,
                                              p.sigma, horizon, oracle_steps);
  const double rel = std::abs(priced.price - oracle) / oracle;
  CsvTable csv("price,oracle,rel_error");
  csv.row(priced.price, oracle, rel);
  write_text_file(out, csv.text());
  std::printf("american put: price=%.10g oracle=%.10g rel_error=%.6g\n",
              priced.price, oracle, rel);
  return 0;
}

// ------------------------------------------------------------ convergence ---

int cmd_convergence(const Config& cfg, const std::string& out,
                    std::optional<std::uint64_t> seed_override) {
  const auto raw = cfg.num_list("n_list");
  if (raw.size() < 2)
    throw ParameterError("config: convergence needs n_list with >= 2 entries");
  std::vector<int> ns;
  for (double v : raw) {
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v || n < 1)
      throw ParameterError("config: n_list entries must be positive integers");
    if (!ns.empty() && n <= ns.back())
      throw ParameterError("config: n_list must be increasing");
    ns.push_back(n);
  }

  std::vector<double> y0(ns.size());
  for (std::size_t k = 0; k < ns.size(); ++k) {
    auto s = build_setup(cfg, ns[k], seed_override);
    if (k + 1 == ns.size()) cfg.fail_on_unused();
    const auto sol = s->with_backend([&](const auto& bk) {
      return solve_rbsde(bk, s->claim, s->gen, s->floor);
    });
    y0[k] = sol.y[0].v[0];
  }

  // closed-form reference where one exists, otherwise the finest grid
  const std::string gname = cfg.str("generator", "");
  const std::string cname = cfg.str("claim", "");
  const std::string fname = cfg.str("floor", "none");
  double ref = y0.back();
  if (fname == "none" && gname == "zero" && cname == "bt_squared")
    ref = cfg.num("T", 1.0);
  else if (fname == "none" && gname == "zero" && cname == "bt")
    ref = 0.0;
  else if (fname == "none" && gname == "emu" && cname == "bt")
    ref = closed_form_linear(cfg.num("mu", 1.0), 0.0, 0.0, cfg.num("T", 1.0));

  CsvTable csv("N,y0,abs_error");
  for (std::size_t k = 0; k < ns.size(); ++k)
    csv.row(ns[k], y0[k], std::abs(y0[k] - ref));
  write_text_file(out, csv.text());
  std::printf("convergence: %zu grids, wrote %s\n", ns.size(), out.c_str());
  return 0;
}

// ----------------------------------------------------------------- extend ---

int cmd_extend(const Config& cfg, const std::string& out,
               std::optional<std::uint64_t> seed_override) {
  auto s = build_setup(cfg, steps_from(cfg), seed_override);
  const auto levels = cfg.num_list("levels");
  const int t_idx = cfg.integer("t_index", 0);
  const double stab_tol = cfg.num("stab_tol", 1e-10);
  cfg.fail_on_unused();
  const auto rep = s->with_backend([&](const auto& bk) {
    DynamicOperator<std::decay_t<decltype(bk)>> op(bk, s->gen, s->floor);
    return extend_operator(op, s->claim, t_idx, levels, stab_tol);
  });
  CsvTable csv("level,mean_y,diff_l2,bound,within");
  for (const auto& st : rep.stages) {
    const double my = s->with_backend(
        [&](const auto& bk) { return bk.mean(t_idx, st.y); });
    csv.row(st.level, my, st.diff_l2, st.bound, st.within);
  }
  write_text_file(out, csv.text());
  std::printf("extend: %zu levels, cauchy %s, stable from level %g, wrote %s\n",
              rep.stages.size(), rep.cauchy_pass ? "ok" : "VIOLATED",
              rep.stages[rep.stable_from].level, out.c_str());
  return rep.cauchy_pass ? 0 : kExitCheckFailed;
}

// ------------------------------------------------------------- doob-meyer ---

int cmd_doob_meyer(const Config& cfg, const std::string& out,
                   std::optional<std::uint64_t> seed_override) {
  auto s = build_setup(cfg, steps_from(cfg), seed_override);
  const int n = s->grid.steps();
  const int s_idx = cfg.integer("s_index", 0);
  const int t_idx = cfg.integer("t_index", n);
  const double tol = cfg.num("dm_tol", 1e-12);
  cfg.fail_on_unused();
  if (!s->is_lattice)
    throw ParameterError(
        "doob-meyer: verification needs exact conditional expectations; "
        "use the lattice backend");
  const double residual =
      doob_meyer_verify(*s->lbk, s->claim, s->gen, s->floor, s_idx, t_idx);
  const bool pass = residual <= tol;
  CsvTable csv("s_index,t_index,residual,tolerance,pass");
  csv.row(s_idx, t_idx, residual, tol, pass);
  write_text_file(out, csv.text());
  std::printf("doob-meyer: residual=%.6g tolerance=%.6g %s\n", residual, tol,
              pass ? "pass" : "FAIL");
  return pass ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floored nonlinear expectations: solves and conformance checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_value = 0;
  bool seed_given = false;

  struct Cmd {
    const char* name;
    const char* desc;
    const char* default_out;
    int (*fn)(const Config&, const std::string&,
              std::optional<std::uint64_t>);
  };
  const Cmd cmds[] = {
      {"solve", "backward solve, CSV of per-step means", "solve.csv",
       cmd_solve},
      {"check-axioms", "axiom conformance battery", "axioms.csv",
       cmd_check_axioms},
      {"price-american", "reflected-solve put price vs binomial oracle",
       "american.csv", cmd_price_american},
      {"convergence", "Y_0 across a grid-refinement schedule",
       "convergence.csv", cmd_convergence},
      {"extend", "truncation extension with Cauchy diagnostics", "extend.csv",
       cmd_extend},
      {"doob-meyer", "additive-martingale identity residual",
       "doob_meyer.csv", cmd_doob_meyer},
  };

  const Cmd* selected = nullptr;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.desc);
    sub->add_option("config", config_path, "key=value config file")
        ->required();
    sub->add_option("--out", out_override, "output CSV path");
    sub->add_option("--seed", seed_value, "override the config seed");
    sub->callback([&selected, &c]() { selected = &c; });
  }

  CLI11_PARSE(app, argc, argv);

  // --seed presence must be queried on the parsed subcommand
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed") > 0) seed_given = true;

  try {
    const Config cfg = Config::parse_file(config_path);
    // read the config's own "out" even when overridden, so it never
    // counts as a stray key
    const std::string cfg_out = cfg.str("out", selected->default_out);
    const std::string out = !out_override.empty() ? out_override : cfg_out;
    std::optional<std::uint64_t> seed_override;
    if (seed_given) seed_override = seed_value;
    return selected->fn(cfg, out, seed_override);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
}
