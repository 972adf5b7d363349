#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fplab/evolution.hpp"

namespace fplab {

enum class Scenario {
  Stabilization,
  Extinction,
  Blowup,
  Contraction,
  Elliptic,
  SteadyState,
  Custom,
};
const char* to_string(Scenario s);

// Field presets shared by initial data and elliptic right-hand sides.
struct FieldSpec {
  enum class Preset { Zero, Bump, DistS, ScaledSteady, Table };
  Preset preset = Preset::Bump;
  double center = 0.5;
  double width = 0.25;
  double amp = 1.0;    // bump amplitude, or the c in c d(x)^s
  double scale = 1.0;  // multiplier for scaled_steady
  std::string path;    // table file
};

struct SourceConfig {
  enum class Kind { Zero, Power, ForcedBump, Table };
  Kind kind = Kind::Power;
  double amp = 1.0;
  double center = 0.5;
  double width = 0.25;
  double t_on = 0.0;
  double t_off = std::numeric_limits<double>::infinity();
  std::optional<double> R;
  std::string path;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::Custom;
  ModelParams params;
  double a = 0.0;
  double b = 1.0;
  std::size_t N = 64;
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 10;
  EventConfig events;
  SolverConfig solver;
  FieldSpec initial;
  SourceConfig source;
  FieldSpec initial_b;   // second run of a contraction pair
  SourceConfig source_b;
  bool has_initial_b = false;
  bool has_source_b = false;
  double lambda = 0.1;  // elliptic scenario
  FieldSpec rhs;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool strict = false;
  std::vector<std::string> warnings;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& what, int line_) : std::runtime_error(what), line(line_) {}
};

struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_config(std::istream& in, bool strict,
                            const std::string& name = "<config>");
ScenarioConfig load_config(const std::string& path, bool strict = false);

// Exit codes of the scenario runner; blow-up and solver failure are
// distinct so regime sweeps can be scripted on codes alone.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;
inline constexpr int kExitSolverFailure = 4;
inline constexpr int kExitIo = 5;

struct ExitReport {
  int code = kExitOk;
  EventKind event = EventKind::Completed;
  std::string series_path;
  std::string summary_path;
  std::string message;
};

ExitReport run_scenario(const ScenarioConfig& cfg);

// CSV with header t,l1,l2,linf,seminorm_p,energy_E,Y,M_r,lqm1,iters,event,
// scientific notation with 16 significant digits.
void write_series_csv(const std::string& path, const Trajectory& traj);

Field make_field(const FieldSpec& spec, const Grid1D& grid, const ModelParams& params,
                 const SolverConfig& solver);
SourceSpec make_source(const SourceConfig& cfg, const ModelParams& params,
                       const Grid1D& grid);

}  // namespace fplab
