#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fplab/scenario.hpp"

using namespace fplab;
namespace fs = std::filesystem;

namespace {

ScenarioConfig parse_str(const std::string& text, bool strict = false) {
  std::istringstream in(text);
  return parse_config(in, strict, "<test>");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const ScenarioConfig cfg = parse_str("scenario = stabilization\n[params]\np = 3\n");
  CHECK(cfg.scenario == Scenario::Stabilization);
  CHECK(cfg.N == 64);
  CHECK(cfg.a == 0.0);
  CHECK(cfg.b == 1.0);
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.record_every == 10);
  CHECK(cfg.solver.tol_residual == 1e-10);
  CHECK(cfg.solver.max_iter == 20000);
  CHECK(cfg.solver.backtrack_factor == 0.5);
  CHECK(cfg.solver.prox_tol == 1e-14);
  CHECK(cfg.events.extinction_tol == 1e-12);
  CHECK(cfg.events.extinction_consecutive == 5);
  CHECK(cfg.events.blowup_threshold == 1e6);
  CHECK(cfg.params.m == 2.0);
  CHECK(cfg.params.p == 3.0);
  CHECK(cfg.warnings.empty());
}

TEST_CASE("unknown keys are rejected by name and line") {
  try {
    parse_str("scenario = custom\n[params]\nzz = 3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("params.zz") != std::string::npos);
    CHECK(e.line == 3);
  }
}

TEST_CASE("malformed numbers are rejected") {
  CHECK_THROWS_AS(parse_str("scenario = custom\n[grid]\nN = twelve\n"), ParseError);
  CHECK_THROWS_AS(parse_str("scenario = nonsense\n"), ParseError);
  CHECK_THROWS_AS(parse_str("scenario = custom\njunk line\n"), ParseError);
}

TEST_CASE("regime mismatches warn, and fail in strict mode") {
  const std::string blowup_bad =
      "scenario = blowup\n[params]\nm = 2\np = 3\nq = 1\n";
  const ScenarioConfig lax = parse_str(blowup_bad, false);
  CHECK_FALSE(lax.warnings.empty());
  CHECK_THROWS_AS(parse_str(blowup_bad, true), RegimeError);

  const std::string stab_bad =
      "scenario = stabilization\n[params]\nm = 2\np = 1.2\nq = 1\n";
  CHECK_THROWS_AS(parse_str(stab_bad, true), RegimeError);
  CHECK_FALSE(parse_str(stab_bad, false).warnings.empty());
}

TEST_CASE("custom run writes a deterministic series") {
  const fs::path d1 = fresh_dir("fplab_det_a");
  const fs::path d2 = fresh_dir("fplab_det_b");

  ScenarioConfig cfg = parse_str(
      "scenario = custom\n"
      "seed = 42\n"
      "[params]\nm = 2\np = 2\nq = 1\ns = 0.5\n"
      "[grid]\nN = 16\n"
      "[evolution]\ndt = 1e-3\nt_end = 0.05\nrecord_every = 5\n"
      "[initial]\npreset = bump\namp = 0.5\n"
      "[source]\nkind = power\n");

  cfg.out_dir = d1.string();
  const ExitReport r1 = run_scenario(cfg);
  cfg.out_dir = d2.string();
  const ExitReport r2 = run_scenario(cfg);
  CHECK(r1.code == kExitOk);
  CHECK(r2.code == kExitOk);

  const std::string s1 = slurp(d1 / "series.csv");
  const std::string s2 = slurp(d2 / "series.csv");
  CHECK(s1 == s2);
  CHECK(s1.substr(0, s1.find('\n')) ==
        "t,l1,l2,linf,seminorm_p,energy_E,Y,M_r,lqm1,iters,event");
  const std::string sum = slurp(d1 / "summary.txt");
  CHECK(sum.find("event = completed") != std::string::npos);
}

TEST_CASE("elliptic scenario solves and reports") {
  const fs::path dir = fresh_dir("fplab_elliptic");
  ScenarioConfig cfg = parse_str(
      "scenario = elliptic\n"
      "[params]\nm = 2\np = 2\ns = 0.5\n"
      "[grid]\nN = 16\n"
      "[elliptic]\nlambda = 0.1\n"
      "[rhs]\npreset = bump\namp = 1\n");
  cfg.out_dir = dir.string();
  const ExitReport rep = run_scenario(cfg);
  CHECK(rep.code == kExitOk);
  CHECK(fs::exists(dir / "solution.csv"));
  const std::string sum = slurp(dir / "summary.txt");
  CHECK(sum.find("converged = true") != std::string::npos);
}

TEST_CASE("steady-state scenario") {
  const fs::path dir = fresh_dir("fplab_steady");
  ScenarioConfig cfg = parse_str(
      "scenario = steady-state\n"
      "[params]\nm = 2\np = 3\nq = 1\ns = 0.5\n"
      "[grid]\nN = 24\n"
      "[solver]\ntol_residual = 1e-8\nmax_iter = 400000\n");
  cfg.out_dir = dir.string();
  const ExitReport rep = run_scenario(cfg);
  CHECK(rep.code == kExitOk);
  const std::string sum = slurp(dir / "summary.txt");
  CHECK(sum.find("trivial = false") != std::string::npos);
}

TEST_CASE("blow-up scenario exits with the dedicated code") {
  const fs::path dir = fresh_dir("fplab_blowup");
  ScenarioConfig cfg = parse_str(
      "scenario = blowup\n"
      "[params]\nm = 2\np = 2\nq = 4\ns = 0.5\n"
      "[grid]\nN = 16\n"
      "[evolution]\ndt = 1e-3\nt_end = 5\nrecord_every = 1\n"
      "[events]\nblowup_threshold = 1e3\n"
      "[initial]\npreset = dist_s\namp = 1\n"
      "[source]\nkind = power\n");

  // scale the profile until its energy is nonpositive
  const Grid1D grid = build_grid(cfg.a, cfg.b, cfg.N, cfg.params);
  const KernelMatrix K = build_kernel(grid);
  for (int k = 0; k < 60; ++k) {
    const Field v = make_field(cfg.initial, grid, cfg.params, cfg.solver);
    if (energy_E(v, cfg.params, K) <= 0.0) break;
    cfg.initial.amp *= 2.0;
  }

  cfg.out_dir = dir.string();
  const ExitReport rep = run_scenario(cfg);
  CHECK(rep.code == kExitBlowup);
  CHECK(rep.event == EventKind::Blowup);
  const std::string sum = slurp(dir / "summary.txt");
  CHECK(sum.find("event = blowup") != std::string::npos);
  CHECK(sum.find("Y_strictly_increasing = true") != std::string::npos);
}

TEST_CASE("contraction scenario reports a tiny gap") {
  const fs::path dir = fresh_dir("fplab_contr");
  ScenarioConfig cfg = parse_str(
      "scenario = contraction\n"
      "[params]\nm = 2\np = 3\nq = 1\ns = 0.5\n"
      "[grid]\nN = 16\n"
      "[evolution]\ndt = 1e-3\nt_end = 0.05\n"
      "[solver]\ntol_residual = 1e-12\n"
      "[initial]\npreset = bump\namp = 0.3\n"
      "[initial_b]\npreset = bump\namp = 0.6\n"
      "[source]\nkind = power\n");
  CHECK(cfg.has_initial_b);
  cfg.out_dir = dir.string();
  const ExitReport rep = run_scenario(cfg);
  CHECK(rep.code == kExitOk);
  CHECK(fs::exists(dir / "series_a.csv"));
  CHECK(fs::exists(dir / "series_b.csv"));

  const std::string sum = slurp(dir / "summary.txt");
  const auto pos = sum.find("max_contraction_gap = ");
  REQUIRE(pos != std::string::npos);
  const double gap = std::stod(sum.substr(pos + 22));
  CHECK(gap <= 1e-8);
}

TEST_CASE("table initial data round-trips") {
  const fs::path dir = fresh_dir("fplab_table");
  const fs::path table = dir / "v0.csv";
  {
    std::ofstream out(table);
    for (int i = 0; i < 16; ++i) out << 0.1 * i << "\n";
  }
  ScenarioConfig cfg = parse_str(
      "scenario = custom\n"
      "[params]\nm = 2\np = 2\n"
      "[grid]\nN = 16\n"
      "[evolution]\ndt = 1e-3\nt_end = 0.002\n"
      "[initial]\npreset = table\npath = " + table.string() + "\n" +
      "[source]\nkind = zero\n");
  const Grid1D grid = build_grid(cfg.a, cfg.b, cfg.N, cfg.params);
  const Field v = make_field(cfg.initial, grid, cfg.params, cfg.solver);
  for (int i = 0; i < 16; ++i) CHECK(v[i] == doctest::Approx(0.1 * i));
}
