#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fplab/scenario.hpp"

namespace fs = std::filesystem;
using namespace fplab;

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  bool strict = false;
  std::optional<std::int64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config, "configuration file")->required();
  cmd->add_option("--out", o.out, "output directory (overrides [output] dir)");
  cmd->add_flag("--strict", o.strict, "treat regime mismatches as errors");
  cmd->add_option("--seed", o.seed, "rng seed (overrides the config)");
}

int run_one(const CommonOpts& o, std::initializer_list<Scenario> allowed) {
  ScenarioConfig cfg = load_config(o.config, o.strict);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.seed = static_cast<std::uint64_t>(*o.seed);

  bool ok = false;
  for (Scenario s : allowed) ok = ok || cfg.scenario == s;
  if (!ok) {
    std::cerr << "error: config declares scenario '" << to_string(cfg.scenario)
              << "', which this subcommand does not run\n";
    return kExitConfig;
  }
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

  const ExitReport rep = run_scenario(cfg);
  std::cout << rep.message << "\n";
  std::cout << "series:  " << rep.series_path << "\n";
  std::cout << "summary: " << rep.summary_path << "\n";
  return rep.code;
}

int run_sweep(const CommonOpts& o) {
  std::ifstream in(o.config);
  if (!in) {
    std::cerr << "error: cannot open sweep manifest '" << o.config << "'\n";
    return kExitConfig;
  }
  const fs::path base = fs::path(o.config).parent_path();
  const fs::path out_base = o.out.empty() ? fs::path("out") : fs::path(o.out);

  std::vector<fs::path> configs;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = line;
    t.erase(0, t.find_first_not_of(" \t\r\n"));
    if (!t.empty()) t.erase(t.find_last_not_of(" \t\r\n") + 1);
    if (t.empty() || t[0] == '#') continue;
    fs::path p(t);
    configs.push_back(p.is_absolute() ? p : base / p);
  }
  if (configs.empty()) {
    std::cerr << "error: sweep manifest lists no configs\n";
    return kExitConfig;
  }

  // independent runs, one output directory per config
  std::vector<std::future<int>> futures;
  for (const fs::path& p : configs) {
    futures.push_back(std::async(std::launch::async, [&o, &out_base, p]() -> int {
      try {
        ScenarioConfig cfg = load_config(p.string(), o.strict);
        cfg.out_dir = (out_base / p.stem()).string();
        if (o.seed) cfg.seed = static_cast<std::uint64_t>(*o.seed);
        return run_scenario(cfg).code;
      } catch (const std::exception& e) {
        std::cerr << p.string() << ": " << e.what() << "\n";
        return kExitConfig;
      }
    }));
  }

  int worst = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const int code = futures[i].get();
    std::cout << configs[i].string() << " -> exit " << code << "\n";
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for the doubly nonlinear nonlocal "
               "parabolic equation d/dt beta(v) + (-Lap)^s_p v = h(t,x,v)"};
  app.require_subcommand(1);

  CommonOpts elliptic_o, steady_o, evolve_o, contraction_o, sweep_o;
  CLI::App* c_elliptic =
      app.add_subcommand("solve-elliptic", "solve the resolvent problem once");
  add_common(c_elliptic, elliptic_o);
  CLI::App* c_steady =
      app.add_subcommand("steady-state", "compute the positive stationary profile");
  add_common(c_steady, steady_o);
  CLI::App* c_evolve =
      app.add_subcommand("evolve", "run an evolution scenario to its event");
  add_common(c_evolve, evolve_o);
  CLI::App* c_contraction =
      app.add_subcommand("contraction", "run a trajectory pair and report the gap");
  add_common(c_contraction, contraction_o);
  CLI::App* c_sweep =
      app.add_subcommand("sweep", "run every config in a manifest concurrently");
  add_common(c_sweep, sweep_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_elliptic->parsed())
      return run_one(elliptic_o, {Scenario::Elliptic});
    if (c_steady->parsed())
      return run_one(steady_o, {Scenario::SteadyState});
    if (c_evolve->parsed())
      return run_one(evolve_o, {Scenario::Stabilization, Scenario::Extinction,
                                Scenario::Blowup, Scenario::Custom});
    if (c_contraction->parsed())
      return run_one(contraction_o, {Scenario::Contraction});
    if (c_sweep->parsed()) return run_sweep(sweep_o);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
