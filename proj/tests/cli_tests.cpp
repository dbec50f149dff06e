#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("rbsde_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(RBSDE_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("solve writes the per-step means schedule") {
  Scratch s;
  const auto cfg = s.file("solve.cfg",
                          "backend = lattice\nT = 1\nN = 8\n"
                          "generator = emu\nmu = 1\nclaim = abs_bt\n"
                          "floor = zero\n");
  const auto out = s.dir / "solve.csv";
  CHECK(run(("solve " + cfg.string() + " --out " + out.string())) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 10);  // header + steps 0..8
  CHECK(rows[0] == std::vector<std::string>{"step", "mean_y", "mean_abs_z",
                                            "mean_k"});
  CHECK(rows[1][0] == "0");
  CHECK(std::stod(rows[1][3]) == 0.0);          // K_0 = 0
  CHECK(std::stod(rows[9][1]) >= 0.0);          // floored value stays up
}

TEST_CASE("check-axioms emits one row per axiom and trial, all passing") {
  Scratch s;
  const auto cfg = s.file(
      "ax.cfg",
      "backend = lattice\nT = 1\nN = 8\ngenerator = emu\nmu = 1\n"
      "claim = abs_bt\naxioms = D1,D2,D3,D4,H1,H2,SANDWICH,MIX\n"
      "trials = 3\nseed = 9\n");
  const auto out = s.dir / "ax.csv";
  CHECK(run("check-axioms " + cfg.string() + " --out " + out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 1 + 8 * 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == 7);
    CHECK(rows[i][1] == "lattice");
    CHECK(rows[i][4] == "1");
  }
}

TEST_CASE("reruns with the same config are byte identical") {
  Scratch s;
  const auto cfg = s.file(
      "ax.cfg",
      "backend = ensemble\nT = 1\nN = 6\nM = 4000\ngenerator = emu\n"
      "mu = 1\nclaim = abs_bt\naxioms = D2,H1\ntrials = 2\nseed = 5\n");
  const auto out1 = s.dir / "a.csv";
  const auto out2 = s.dir / "b.csv";
  CHECK(run("check-axioms " + cfg.string() + " --out " + out1.string()) == 0);
  CHECK(run("check-axioms " + cfg.string() + " --out " + out2.string()) == 0);
  CHECK(slurp(out1) == slurp(out2));

  // a different seed must actually change the numbers
  const auto out3 = s.dir / "c.csv";
  CHECK(run("check-axioms " + cfg.string() + " --seed 77 --out " +
            out3.string()) == 0);
  CHECK(slurp(out1) != slurp(out3));
}

TEST_CASE("under-declared slope makes check-axioms fail with exit 1") {
  Scratch s;
  const auto cfg = s.file(
      "bad.cfg",
      "backend = lattice\nT = 1\nN = 8\ngenerator = emu\nmu = 1\n"
      "claim = abs_bt\naxioms = H1\ntrials = 4\nseed = 3\n"
      "declared_mu = 0.25\n");
  const auto out = s.dir / "bad.csv";
  CHECK(run("check-axioms " + cfg.string() + " --out " + out.string()) == 1);
  const auto rows = parse_csv(slurp(out));
  bool failed_row = false;
  for (std::size_t i = 1; i < rows.size(); ++i)
    failed_row = failed_row || rows[i][4] == "0";
  CHECK(failed_row);
}

TEST_CASE("price-american reports price, oracle and relative error") {
  Scratch s;
  const auto cfg = s.file("am.cfg",
                          "backend = lattice\nT = 1\nN = 200\nspot = 100\n"
                          "strike = 100\nrate = 0.05\nsigma = 0.2\n"
                          "oracle_steps = 500\n");
  const auto out = s.dir / "am.csv";
  CHECK(run("price-american " + cfg.string() + " --out " + out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"price", "oracle", "rel_error"});
  CHECK(std::stod(rows[1][2]) < 0.01);
}

TEST_CASE("convergence uses the closed form when one exists") {
  Scratch s;
  // linear closed form: every grid is exact
  const auto exact = s.file("cv1.cfg",
                            "backend = lattice\nT = 1\ngenerator = emu\n"
                            "mu = 1\nclaim = bt\nn_list = 4,8,16\n");
  const auto out1 = s.dir / "cv1.csv";
  CHECK(run("convergence " + exact.string() + " --out " + out1.string()) == 0);
  for (const auto& row : parse_csv(slurp(out1)))
    if (row[0] != "N") CHECK(std::stod(row[2]) < 1e-12);

  // no closed form: graded against the finest grid, so errors shrink to 0
  const auto self = s.file("cv2.cfg",
                           "backend = lattice\nT = 1\ngenerator = zero\n"
                           "claim = abs_bt\nn_list = 8,32,128\n");
  const auto out2 = s.dir / "cv2.csv";
  CHECK(run("convergence " + self.string() + " --out " + out2.string()) == 0);
  const auto rows = parse_csv(slurp(out2));
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[1][2]) > std::stod(rows[2][2]));
  CHECK(std::stod(rows[3][2]) == 0.0);

  const auto bad = s.file("cv3.cfg",
                          "backend = lattice\nT = 1\ngenerator = zero\n"
                          "claim = abs_bt\nn_list = 8\n");
  CHECK(run("convergence " + bad.string()) == 2);
}

TEST_CASE("extend writes the truncation ladder") {
  Scratch s;
  const auto cfg = s.file("ex.cfg",
                          "backend = lattice\nT = 1\nN = 8\ngenerator = emu\n"
                          "mu = 1\nclaim = bt\nlevels = 0,1,2,3,4\n"
                          "t_index = 0\n");
  const auto out = s.dir / "ex.csv";
  CHECK(run("extend " + cfg.string() + " --out " + out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"level", "mean_y", "diff_l2",
                                            "bound", "within"});
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i][4] == "1");
}

TEST_CASE("doob-meyer runs on the lattice and rejects ensembles") {
  Scratch s;
  const auto good = s.file("dm.cfg",
                           "backend = lattice\nT = 1\nN = 8\ngenerator = emu\n"
                           "mu = 1\nclaim = abs_bt\nfloor = zero\n"
                           "s_index = 0\nt_index = 8\n");
  const auto out = s.dir / "dm.csv";
  CHECK(run("doob-meyer " + good.string() + " --out " + out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][2]) <= 1e-12);

  const auto bad = s.file("dm2.cfg",
                          "backend = ensemble\nT = 1\nN = 8\nM = 1000\n"
                          "generator = emu\nmu = 1\nclaim = abs_bt\n"
                          "floor = zero\ns_index = 0\nt_index = 8\n");
  CHECK(run("doob-meyer " + bad.string()) == 2);
}

TEST_CASE("configuration mistakes exit with code 2") {
  Scratch s;
  CHECK(run("solve /nonexistent.cfg") == 2);

  const auto stray = s.file("stray.cfg",
                            "backend = lattice\nT = 1\nN = 8\n"
                            "generator = zero\nclaim = bt\nbogus_key = 1\n");
  CHECK(run("solve " + stray.string()) == 2);

  const auto no_axioms = s.file("noax.cfg",
                                "backend = lattice\nT = 1\nN = 8\n"
                                "generator = zero\nclaim = bt\ntrials = 2\n");
  CHECK(run("check-axioms " + no_axioms.string()) == 2);

  const auto bad_gen = s.file("gen.cfg",
                              "backend = lattice\nT = 1\nN = 8\n"
                              "generator = cubic\nclaim = bt\n");
  CHECK(run("solve " + bad_gen.string()) == 2);

  const auto bad_n = s.file("n.cfg",
                            "backend = lattice\nT = 1\nN = -3\n"
                            "generator = zero\nclaim = bt\n");
  CHECK(run("solve " + bad_n.string()) == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  Scratch s;
  // 3 paths cannot support a rank-checked degree-4 basis
  const auto cfg = s.file("rank.cfg",
                          "backend = ensemble\nT = 1\nN = 4\nM = 3\n"
                          "generator = zero\nclaim = bt\ndegree = 4\n"
                          "ridge = 0\nseed = 1\n");
  CHECK(run("solve " + cfg.string()) == 3);
}

TEST_CASE("shipped sample configs run clean") {
  Scratch s;
  const fs::path cfgs(RBSDE_CONFIG_DIR);
  for (const char* name :
       {"lattice_axioms.cfg", "solve_lattice.cfg", "convergence.cfg",
        "extend.cfg", "doob_meyer.cfg"}) {
    const std::string sub =
        std::string(name).find("axioms") != std::string::npos ? "check-axioms"
        : std::string(name).find("solve") != std::string::npos ? "solve"
        : std::string(name).find("conv") != std::string::npos ? "convergence"
        : std::string(name).find("extend") != std::string::npos
            ? "extend"
            : "doob-meyer";
    const auto out = s.dir / (std::string(name) + ".csv");
    INFO(name);
    CHECK(run(sub + " " + (cfgs / name).string() + " --out " + out.string()) ==
          0);
  }
}
