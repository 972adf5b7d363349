#include "fplab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace fplab {

namespace fs = std::filesystem;

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Stabilization: return "stabilization";
    case Scenario::Extinction: return "extinction";
    case Scenario::Blowup: return "blowup";
    case Scenario::Contraction: return "contraction";
    case Scenario::Elliptic: return "elliptic";
    case Scenario::SteadyState: return "steady-state";
    case Scenario::Custom: return "custom";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

struct RawConfig {
  std::string name;
  std::map<std::pair<std::string, std::string>, RawEntry> kv;

  const RawEntry* find(const std::string& sec, const std::string& key) const {
    auto it = kv.find({sec, key});
    return it == kv.end() ? nullptr : &it->second;
  }
  RawEntry* find(const std::string& sec, const std::string& key) {
    auto it = kv.find({sec, key});
    return it == kv.end() ? nullptr : &it->second;
  }
};

RawConfig read_raw(std::istream& in, const std::string& name) {
  RawConfig raw;
  raw.name = name;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError(name + ": malformed section header '" + t + "'", lineno);
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(name + ": expected key = value, got '" + t + "'", lineno);
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ParseError(name + ": empty key", lineno);
    auto [it, inserted] = raw.kv.insert({{section, key}, RawEntry{val, lineno}});
    if (!inserted)
      throw ParseError(name + ": duplicate key '" + section + "." + key + "'", lineno);
  }
  return raw;
}

std::string full_key(const std::string& sec, const std::string& key) {
  return sec.empty() ? key : sec + "." + key;
}

double get_double(RawConfig& raw, const std::string& sec, const std::string& key,
                  double fallback) {
  RawEntry* e = raw.find(sec, key);
  if (!e) return fallback;
  e->consumed = true;
  const std::string& v = e->value;
  if (v == "inf" || v == "+inf")
    return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ParseError(raw.name + ": invalid number '" + v + "' for " +
                         full_key(sec, key),
                     e->line);
  return x;
}

long long get_int(RawConfig& raw, const std::string& sec, const std::string& key,
                  long long fallback) {
  RawEntry* e = raw.find(sec, key);
  if (!e) return fallback;
  e->consumed = true;
  char* end = nullptr;
  const long long x = std::strtoll(e->value.c_str(), &end, 10);
  if (end == e->value.c_str() || *end != '\0')
    throw ParseError(raw.name + ": invalid integer '" + e->value + "' for " +
                         full_key(sec, key),
                     e->line);
  return x;
}

std::string get_string(RawConfig& raw, const std::string& sec, const std::string& key,
                       const std::string& fallback) {
  RawEntry* e = raw.find(sec, key);
  if (!e) return fallback;
  e->consumed = true;
  return e->value;
}

template <class T>
T get_enum(RawConfig& raw, const std::string& sec, const std::string& key,
           const std::vector<std::pair<std::string, T>>& table, T fallback) {
  RawEntry* e = raw.find(sec, key);
  if (!e) return fallback;
  e->consumed = true;
  for (const auto& [name, val] : table)
    if (e->value == name) return val;
  std::string expected;
  for (const auto& [name, val] : table)
    expected += (expected.empty() ? "" : ", ") + name;
  throw ParseError(raw.name + ": invalid value '" + e->value + "' for " +
                       full_key(sec, key) + " (expected one of: " + expected + ")",
                   e->line);
}

FieldSpec read_field_spec(RawConfig& raw, const std::string& sec, const FieldSpec& base) {
  FieldSpec f = base;
  f.preset = get_enum<FieldSpec::Preset>(
      raw, sec, "preset",
      {{"zero", FieldSpec::Preset::Zero},
       {"bump", FieldSpec::Preset::Bump},
       {"dist_s", FieldSpec::Preset::DistS},
       {"scaled_steady", FieldSpec::Preset::ScaledSteady},
       {"table", FieldSpec::Preset::Table}},
      base.preset);
  f.center = get_double(raw, sec, "center", base.center);
  f.width = get_double(raw, sec, "width", base.width);
  f.amp = get_double(raw, sec, "amp", base.amp);
  f.scale = get_double(raw, sec, "scale", base.scale);
  f.path = get_string(raw, sec, "path", base.path);
  return f;
}

SourceConfig read_source_spec(RawConfig& raw, const std::string& sec,
                              const SourceConfig& base) {
  SourceConfig s = base;
  s.kind = get_enum<SourceConfig::Kind>(
      raw, sec, "kind",
      {{"zero", SourceConfig::Kind::Zero},
       {"power", SourceConfig::Kind::Power},
       {"forced_bump", SourceConfig::Kind::ForcedBump},
       {"table", SourceConfig::Kind::Table}},
      base.kind);
  s.amp = get_double(raw, sec, "amp", base.amp);
  s.center = get_double(raw, sec, "center", base.center);
  s.width = get_double(raw, sec, "width", base.width);
  s.t_on = get_double(raw, sec, "t_on", base.t_on);
  s.t_off = get_double(raw, sec, "t_off", base.t_off);
  const double r = get_double(raw, sec, "R", s.R ? *s.R : -1.0);
  if (r > 0.0) s.R = r;
  s.path = get_string(raw, sec, "path", base.path);
  return s;
}

bool has_section(const RawConfig& raw, const std::string& sec) {
  for (const auto& [k, v] : raw.kv)
    if (k.first == sec) return true;
  return false;
}

void regime_check(ScenarioConfig& cfg) {
  const double thr = cfg.params.homogeneity_threshold();
  std::vector<std::string> issues;
  switch (cfg.scenario) {
    case Scenario::Stabilization:
    case Scenario::SteadyState:
      if (!(cfg.params.p > thr))
        issues.push_back("scenario requires the subhomogeneous regime p > q/m + 1");
      break;
    case Scenario::Extinction:
      if (!(cfg.params.p < thr))
        issues.push_back("extinction requires p < q/m + 1");
      if (!(cfg.params.q <= 1.0)) issues.push_back("extinction requires q <= 1");
      break;
    case Scenario::Blowup:
      if (!(cfg.params.p < thr)) issues.push_back("blow-up requires p < q/m + 1");
      if (!(cfg.params.q > 1.0)) issues.push_back("blow-up requires q > 1");
      break;
    default:
      break;
  }
  if (cfg.initial.preset == FieldSpec::Preset::ScaledSteady && !(cfg.params.p > thr))
    issues.push_back("scaled_steady initial data requires p > q/m + 1");

  for (const auto& msg : issues) {
    if (cfg.strict) throw RegimeError(msg);
    cfg.warnings.push_back(msg);
  }
}

}  // namespace

ScenarioConfig parse_config(std::istream& in, bool strict, const std::string& name) {
  RawConfig raw = read_raw(in, name);
  ScenarioConfig cfg;
  cfg.strict = strict;

  cfg.scenario = get_enum<Scenario>(
      raw, "", "scenario",
      {{"stabilization", Scenario::Stabilization},
       {"extinction", Scenario::Extinction},
       {"blowup", Scenario::Blowup},
       {"contraction", Scenario::Contraction},
       {"elliptic", Scenario::Elliptic},
       {"steady-state", Scenario::SteadyState},
       {"custom", Scenario::Custom}},
      Scenario::Custom);
  cfg.seed = static_cast<std::uint64_t>(get_int(raw, "", "seed", 0));

  cfg.params.m = get_double(raw, "params", "m", cfg.params.m);
  cfg.params.p = get_double(raw, "params", "p", cfg.params.p);
  cfg.params.q = get_double(raw, "params", "q", cfg.params.q);
  cfg.params.s = get_double(raw, "params", "s", cfg.params.s);
  cfg.params.C_h = get_double(raw, "params", "C_h", cfg.params.C_h);
  {
    const double r = get_double(raw, "params", "R", -1.0);
    if (r > 0.0) cfg.params.R = r;
  }

  cfg.a = get_double(raw, "grid", "a", cfg.a);
  cfg.b = get_double(raw, "grid", "b", cfg.b);
  cfg.N = static_cast<std::size_t>(get_int(raw, "grid", "N", static_cast<long long>(cfg.N)));

  cfg.dt = get_double(raw, "evolution", "dt", cfg.dt);
  cfg.t_end = get_double(raw, "evolution", "t_end", cfg.t_end);
  cfg.record_every =
      static_cast<int>(get_int(raw, "evolution", "record_every", cfg.record_every));

  cfg.events.extinction_tol =
      get_double(raw, "events", "extinction_tol", cfg.events.extinction_tol);
  cfg.events.extinction_consecutive = static_cast<int>(get_int(
      raw, "events", "extinction_consecutive", cfg.events.extinction_consecutive));
  cfg.events.blowup_threshold =
      get_double(raw, "events", "blowup_threshold", cfg.events.blowup_threshold);

  cfg.solver.tol_residual =
      get_double(raw, "solver", "tol_residual", cfg.solver.tol_residual);
  cfg.solver.max_iter =
      static_cast<int>(get_int(raw, "solver", "max_iter", cfg.solver.max_iter));
  cfg.solver.backtrack_factor =
      get_double(raw, "solver", "backtrack_factor", cfg.solver.backtrack_factor);
  cfg.solver.init_step = get_double(raw, "solver", "init_step", cfg.solver.init_step);
  cfg.solver.prox_tol = get_double(raw, "solver", "prox_tol", cfg.solver.prox_tol);
  cfg.solver.eps_reg = get_double(raw, "solver", "eps_reg", cfg.solver.eps_reg);

  cfg.initial = read_field_spec(raw, "initial", cfg.initial);
  cfg.source = read_source_spec(raw, "source", cfg.source);
  cfg.has_initial_b = has_section(raw, "initial_b");
  cfg.has_source_b = has_section(raw, "source_b");
  cfg.initial_b = read_field_spec(raw, "initial_b", cfg.initial);
  cfg.source_b = read_source_spec(raw, "source_b", cfg.source);

  cfg.lambda = get_double(raw, "elliptic", "lambda", cfg.lambda);
  cfg.rhs = read_field_spec(raw, "rhs", cfg.rhs);
  cfg.out_dir = get_string(raw, "output", "dir", cfg.out_dir);

  for (const auto& [k, e] : raw.kv) {
    if (!e.consumed)
      throw ParseError(
          raw.name + ": unknown key '" + full_key(k.first, k.second) + "'", e.line);
  }

  cfg.params.validate();
  if (!(cfg.b > cfg.a)) throw RegimeError("grid: b must exceed a");
  if (!(cfg.dt > 0.0) || !(cfg.t_end >= cfg.dt))
    throw RegimeError("evolution: need dt > 0 and t_end >= dt");
  regime_check(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
  return parse_config(in, strict, path);
}

namespace {

double bump_profile(double x, double center, double width) {
  const double r = (x - center) / width;
  const double r2 = r * r;
  return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

std::vector<double> load_table_column(const std::string& path, std::size_t expect) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table file '" + path + "'");
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find_last_of(',');
    const std::string tok = comma == std::string::npos ? t : trim(t.substr(comma + 1));
    vals.push_back(std::stod(tok));
  }
  if (vals.size() != expect)
    throw std::runtime_error("table file '" + path + "' has " +
                             std::to_string(vals.size()) + " rows, expected " +
                             std::to_string(expect));
  return vals;
}

struct SourceTable {
  std::vector<double> times;
  std::vector<std::vector<double>> rows;  // one field per time
};

SourceTable load_source_table(const std::string& path, std::size_t N) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open source table '" + path + "'");
  SourceTable tab;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(trim(tok)));
    if (row.size() != N + 1)
      throw std::runtime_error("source table '" + path + "' row has " +
                               std::to_string(row.size()) + " columns, expected " +
                               std::to_string(N + 1));
    tab.times.push_back(row.front());
    tab.rows.emplace_back(row.begin() + 1, row.end());
  }
  if (tab.times.empty())
    throw std::runtime_error("source table '" + path + "' is empty");
  if (!std::is_sorted(tab.times.begin(), tab.times.end()))
    throw std::runtime_error("source table '" + path + "' times must be increasing");
  return tab;
}

}  // namespace

Field make_field(const FieldSpec& spec, const Grid1D& grid, const ModelParams& params,
                 const SolverConfig& solver) {
  Field v(grid.N, 0.0);
  switch (spec.preset) {
    case FieldSpec::Preset::Zero:
      break;
    case FieldSpec::Preset::Bump:
      for (std::size_t i = 0; i < grid.N; ++i)
        v[i] = spec.amp * bump_profile(grid.nodes[i], spec.center, spec.width);
      break;
    case FieldSpec::Preset::DistS:
      for (std::size_t i = 0; i < grid.N; ++i)
        v[i] = spec.amp * std::pow(grid.dist[i], params.s);
      break;
    case FieldSpec::Preset::ScaledSteady: {
      const SteadyStateResult ss = solve_steady_state(params, grid, solver);
      if (!ss.converged)
        throw std::runtime_error("scaled_steady: stationary solve did not converge");
      for (std::size_t i = 0; i < grid.N; ++i) v[i] = spec.scale * ss.v[i];
      break;
    }
    case FieldSpec::Preset::Table: {
      const auto vals = load_table_column(spec.path, grid.N);
      std::copy(vals.begin(), vals.end(), v.begin());
      break;
    }
  }
  return v;
}

SourceSpec make_source(const SourceConfig& cfg, const ModelParams& params,
                       const Grid1D& grid) {
  SourceSpec s;
  switch (cfg.kind) {
    case SourceConfig::Kind::Zero:
      s = SourceSpec::zero();
      break;
    case SourceConfig::Kind::Power:
      s = SourceSpec::power(params.q, params.C_h);
      break;
    case SourceConfig::Kind::ForcedBump: {
      const double amp = cfg.amp, c = cfg.center, w = cfg.width;
      const double on = cfg.t_on, off = cfg.t_off;
      s = SourceSpec::forced(
          [amp, c, w, on, off](double t, double x) {
            return (t >= on && t <= off) ? amp * bump_profile(x, c, w) : 0.0;
          },
          std::abs(amp));
      s.q = params.q;
      break;
    }
    case SourceConfig::Kind::Table: {
      auto tab = std::make_shared<SourceTable>(load_source_table(cfg.path, grid.N));
      const double a = grid.a, h = grid.h_mesh;
      const std::size_t N = grid.N;
      double sup = 0.0;
      for (const auto& row : tab->rows)
        for (double x : row) sup = std::max(sup, std::abs(x));
      s = SourceSpec::forced(
          [tab, a, h, N](double t, double x) {
            std::size_t i = static_cast<std::size_t>(
                std::clamp((x - a) / h, 0.0, static_cast<double>(N - 1)));
            const auto& times = tab->times;
            if (t <= times.front()) return tab->rows.front()[i];
            if (t >= times.back()) return tab->rows.back()[i];
            const auto it = std::upper_bound(times.begin(), times.end(), t);
            const std::size_t k = static_cast<std::size_t>(it - times.begin());
            const double w1 = (t - times[k - 1]) / (times[k] - times[k - 1]);
            return (1.0 - w1) * tab->rows[k - 1][i] + w1 * tab->rows[k][i];
          },
          sup);
      s.q = params.q;
      break;
    }
  }
  if (cfg.R) s.R = cfg.R;
  if (!s.R && params.R) s.R = params.R;
  return s;
}

namespace {

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15e", x);
  return buf;
}

struct Summary {
  std::vector<std::pair<std::string, std::string>> kv;
  void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
  void add(const std::string& k, const char* v) { add(k, std::string(v)); }
  void add(const std::string& k, double v) { add(k, fmt(v)); }
  void add(const std::string& k, bool v) { add(k, v ? std::string("true") : std::string("false")); }
  void add(const std::string& k, int v) { add(k, std::to_string(v)); }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  }
};

void add_common(Summary& s, const ScenarioConfig& cfg) {
  s.add("scenario", to_string(cfg.scenario));
  s.add("m", cfg.params.m);
  s.add("p", cfg.params.p);
  s.add("q", cfg.params.q);
  s.add("s", cfg.params.s);
  s.add("C_h", cfg.params.C_h);
  s.add("subhomogeneous", cfg.params.subhomogeneous());
  s.add("superhomogeneous", cfg.params.superhomogeneous());
  s.add("N", static_cast<int>(cfg.N));
  s.add("a", cfg.a);
  s.add("b", cfg.b);
  s.add("seed", std::to_string(cfg.seed));
}

void write_solution_csv(const std::string& path, const Grid1D& grid, const Field& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "x,v\n";
  for (std::size_t i = 0; i < grid.N; ++i)
    out << fmt(grid.nodes[i]) << "," << fmt(v[i]) << "\n";
}

int exit_code_for(EventKind e) {
  switch (e) {
    case EventKind::Blowup: return kExitBlowup;
    case EventKind::SolverFailure: return kExitSolverFailure;
    default: return kExitOk;
  }
}

ExitReport run_elliptic(const ScenarioConfig& cfg, const Grid1D& grid) {
  const KernelMatrix K = build_kernel(grid);
  const Field rhs = make_field(cfg.rhs, grid, cfg.params, cfg.solver);
  const ResolventResult r =
      solve_resolvent(cfg.lambda, rhs, cfg.params, K, cfg.solver);

  const std::string sol_path = cfg.out_dir + "/solution.csv";
  const std::string sum_path = cfg.out_dir + "/summary.txt";
  write_solution_csv(sol_path, grid, r.v);

  Summary s;
  add_common(s, cfg);
  s.add("lambda", cfg.lambda);
  s.add("converged", r.converged);
  s.add("residual", r.residual);
  s.add("iterations", r.iterations);
  s.add("l1", l1_h(r.v, grid.h_mesh));
  s.add("l2", l2_h(r.v, grid.h_mesh));
  s.add("linf", linf(r.v));
  s.write(sum_path);

  ExitReport rep;
  rep.code = r.converged ? kExitOk : kExitSolverFailure;
  rep.event = r.converged ? EventKind::Completed : EventKind::SolverFailure;
  rep.series_path = sol_path;
  rep.summary_path = sum_path;
  rep.message = r.converged ? "resolvent solved" : "resolvent did not converge";
  return rep;
}

ExitReport run_steady(const ScenarioConfig& cfg, const Grid1D& grid) {
  const SteadyStateResult r = solve_steady_state(cfg.params, grid, cfg.solver);
  const KernelMatrix K = build_kernel(grid);

  const std::string sol_path = cfg.out_dir + "/solution.csv";
  const std::string sum_path = cfg.out_dir + "/summary.txt";
  write_solution_csv(sol_path, grid, r.v);

  double min_v = std::numeric_limits<double>::infinity();
  for (double x : r.v) min_v = std::min(min_v, x);

  Summary s;
  add_common(s, cfg);
  s.add("converged", r.converged);
  s.add("trivial", r.trivial);
  s.add("residual", r.residual);
  s.add("iterations", r.iterations);
  s.add("j_stat", r.j_stat);
  s.add("energy_E", energy_E(r.v, cfg.params, K));
  s.add("min_v", min_v);
  s.add("linf", linf(r.v));
  s.write(sum_path);

  ExitReport rep;
  const bool ok = r.converged && !r.trivial;
  rep.code = ok ? kExitOk : kExitSolverFailure;
  rep.event = ok ? EventKind::Completed : EventKind::SolverFailure;
  rep.series_path = sol_path;
  rep.summary_path = sum_path;
  rep.message = ok ? "stationary profile found" : "stationary solve failed";
  return rep;
}

ExitReport run_contraction(const ScenarioConfig& cfg, const Grid1D& grid) {
  EvolutionConfig e;
  e.dt = cfg.dt;
  e.t_end = cfg.t_end;
  e.events = cfg.events;
  e.solver = cfg.solver;
  e.record_every = 1;  // the gap needs every step

  e.v0 = make_field(cfg.initial, grid, cfg.params, cfg.solver);
  e.source = make_source(cfg.source, cfg.params, grid);
  const Trajectory ta = run(cfg.params, grid, e);

  e.v0 = make_field(cfg.initial_b, grid, cfg.params, cfg.solver);
  e.source = make_source(cfg.source_b, cfg.params, grid);
  const Trajectory tb = run(cfg.params, grid, e);

  const std::string sa = cfg.out_dir + "/series_a.csv";
  const std::string sb = cfg.out_dir + "/series_b.csv";
  const std::string sum_path = cfg.out_dir + "/summary.txt";
  write_series_csv(sa, ta);
  write_series_csv(sb, tb);

  const SourceSpec src_a = make_source(cfg.source, cfg.params, grid);
  const SourceSpec src_b = make_source(cfg.source_b, cfg.params, grid);

  double max_gap = -std::numeric_limits<double>::infinity();
  bool comparable = ta.times.size() == tb.times.size();
  if (comparable) {
    const auto gaps = contraction_gap(ta, tb, src_a, src_b);
    for (double g : gaps) max_gap = std::max(max_gap, g);
  }

  Summary s;
  add_common(s, cfg);
  s.add("event_a", to_string(ta.event));
  s.add("event_b", to_string(tb.event));
  s.add("comparable", comparable);
  s.add("max_contraction_gap", max_gap);
  s.write(sum_path);

  ExitReport rep;
  rep.code = std::max(exit_code_for(ta.event), exit_code_for(tb.event));
  rep.event = rep.code == exit_code_for(ta.event) ? ta.event : tb.event;
  rep.series_path = sa;
  rep.summary_path = sum_path;
  rep.message = "contraction pair finished, max gap " + fmt(max_gap);
  return rep;
}

ExitReport run_evolution_scenario(const ScenarioConfig& cfg, const Grid1D& grid) {
  const KernelMatrix K = build_kernel(grid);

  EvolutionConfig e;
  e.dt = cfg.dt;
  e.t_end = cfg.t_end;
  e.events = cfg.events;
  e.solver = cfg.solver;
  e.record_every = cfg.record_every;
  e.v0 = make_field(cfg.initial, grid, cfg.params, cfg.solver);
  e.source = make_source(cfg.source, cfg.params, grid);

  Field v_inf;
  double steady_residual = 0.0;
  if (cfg.scenario == Scenario::Stabilization) {
    const SteadyStateResult ss = solve_steady_state(cfg.params, grid, cfg.solver);
    v_inf = ss.v;
    steady_residual = ss.residual;
  }

  const Trajectory traj = run(cfg.params, grid, e);

  const std::string series_path = cfg.out_dir + "/series.csv";
  const std::string sum_path = cfg.out_dir + "/summary.txt";
  write_series_csv(series_path, traj);

  Summary s;
  add_common(s, cfg);
  s.add("dt", cfg.dt);
  s.add("t_end", cfg.t_end);
  s.add("record_every", cfg.record_every);
  s.add("event", to_string(traj.event));
  s.add("event_time", traj.event_time);
  s.add("t_star", t_star(linf(e.v0), cfg.params.C_h, cfg.params.q, cfg.params.m));
  s.add("final_l2", traj.series.back().l2);
  s.add("final_linf", traj.series.back().linf);
  s.add("certificate_eps", mild_certificate(traj).value());

  if (cfg.scenario == Scenario::Stabilization) {
    const Field& vT = traj.fields.back();
    Field diff(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) diff[i] = vT[i] - v_inf[i];
    const double denom = l2_h(v_inf, grid.h_mesh);
    s.add("steady_residual", steady_residual);
    s.add("dist_l2_rel_final", denom > 0 ? l2_h(diff, grid.h_mesh) / denom
                                         : std::numeric_limits<double>::quiet_NaN());
  }
  if (cfg.scenario == Scenario::Extinction) {
    const ExtinctionExponents ee = extinction_exponents(cfg.params, e.diagnostics_r);
    s.add("alpha", ee.alpha);
    s.add("gamma", ee.gamma);
    s.add("valid_extinction_regime", ee.valid_regime);
    s.add("measured_t0", traj.event == EventKind::Extinct
                             ? traj.event_time
                             : std::numeric_limits<double>::quiet_NaN());
    bool monotone = true;
    const auto [Y, Mr] = series_Y_and_Mr(traj, e.diagnostics_r);
    for (std::size_t k = 1; k < Mr.size(); ++k)
      monotone = monotone && Mr[k] <= Mr[k - 1] * (1.0 + 1e-9) + 1e-15;
    s.add("Mr_monotone_decreasing", monotone);
  }
  if (cfg.scenario == Scenario::Blowup) {
    s.add("nu", blowup_exponent(cfg.params));
    s.add("E_v0", energy_E(e.v0, cfg.params, K));
    const auto [Y, Mr] = series_Y_and_Mr(traj, e.diagnostics_r);
    bool increasing = true;
    for (std::size_t k = 1; k < Y.size(); ++k)
      increasing = increasing && Y[k] > Y[k - 1];
    s.add("Y_strictly_increasing", increasing);
  }
  s.write(sum_path);

  ExitReport rep;
  rep.code = exit_code_for(traj.event);
  rep.event = traj.event;
  rep.series_path = series_path;
  rep.summary_path = sum_path;
  rep.message = std::string("event: ") + to_string(traj.event);
  return rep;
}

}  // namespace

void write_series_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "t,l1,l2,linf,seminorm_p,energy_E,Y,M_r,lqm1,iters,event\n";
  char buf[512];
  for (std::size_t k = 0; k < traj.series.size(); ++k) {
    const DiagnosticsRecord& r = traj.series[k];
    const char* ev = (k + 1 == traj.series.size()) ? to_string(traj.event) : "none";
    std::snprintf(buf, sizeof buf,
                  "%.15e,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e,%d,%s\n",
                  r.t, r.l1, r.l2, r.linf, r.seminorm, r.E, r.Y, r.M_r, r.lqm1,
                  r.iters, ev);
    out << buf;
  }
}

ExitReport run_scenario(const ScenarioConfig& cfg) {
  cfg.params.validate();
  const Grid1D grid = build_grid(cfg.a, cfg.b, cfg.N, cfg.params);
  fs::create_directories(cfg.out_dir);

  switch (cfg.scenario) {
    case Scenario::Elliptic:
      return run_elliptic(cfg, grid);
    case Scenario::SteadyState:
      return run_steady(cfg, grid);
    case Scenario::Contraction:
      return run_contraction(cfg, grid);
    default:
      return run_evolution_scenario(cfg, grid);
  }
}

}  // namespace fplab
