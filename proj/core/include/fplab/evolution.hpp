#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fplab/diagnostics.hpp"
#include "fplab/elliptic.hpp"

namespace fplab {

// sgn(theta) min(|theta|, R)
double truncate_theta(double theta, double R);

// Right-hand side h(t,x,theta) as a preset plus growth metadata (C_h, q)
// for the bound |h| <= C_h (1 + |theta|^{q/m}).  When the truncation level
// R is set, the theta argument is clamped before evaluation.
struct SourceSpec {
  enum class Kind { Zero, Power, Forced, Custom };

  Kind kind = Kind::Zero;
  double C_h = 0.0;
  double q = 0.0;
  std::optional<double> R;
  std::function<double(double t, double x, double theta)> fn;

  double eval(double t, double x, double theta, double m) const;
  bool is_zero() const { return kind == Kind::Zero; }

  static SourceSpec zero();
  static SourceSpec power(double q, double C_h = 1.0);
  static SourceSpec forced(std::function<double(double, double)> f, double C_h);
  static SourceSpec custom(std::function<double(double, double, double)> f,
                           double C_h, double q);
};

struct EventConfig {
  double extinction_tol = 1e-12;  // on M_r
  int extinction_consecutive = 5;
  double blowup_threshold = 1e6;  // on ||v||_inf
};

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Field v0;
  SourceSpec source;
  EventConfig events;
  SolverConfig solver;
  int record_every = 1;
  double diagnostics_r = 1.0;  // r in M_r
};

enum class EventKind { Completed, Extinct, Blowup, SolverFailure };
const char* to_string(EventKind e);

struct Trajectory {
  Grid1D grid;
  ModelParams params;
  double dt = 0.0;
  int record_every = 1;
  std::vector<double> times;
  std::vector<Field> fields;
  std::vector<DiagnosticsRecord> series;
  // cumulative sum_k dt * max_i |h^k_i| up to each record
  std::vector<double> source_sup_integral;
  EventKind event = EventKind::Completed;
  double event_time = 0.0;
  // accumulated pieces of the approximate-solution certificate
  double source_error = 0.0;
  double residual_error = 0.0;
  double initial_gap = 0.0;
};

struct StepResult {
  Field v;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// One implicit step from time t to t + dt: solves the resolvent problem
//   beta(v) + dt (-Lap)^s_p v = dt h(t + dt/2, x, v_prev) + beta(v_prev)
// warm-started from v_prev.
StepResult step(const Field& v_prev, double t, const ModelParams& params,
                const Grid1D& grid, const KernelMatrix& K,
                const EvolutionConfig& cfg);

// Advances until t_end or an event fires.  Extinction is declared when M_r
// stays below extinction_tol on extinction_consecutive consecutive records
// after having been above it at least once; blow-up when ||v||_inf exceeds
// blowup_threshold (the reported time is the last stable step).
Trajectory run(const ModelParams& params, const Grid1D& grid,
               const EvolutionConfig& cfg);

// Life-time estimate sup_{sigma>0} (sigma^{1/m} - v0_sup^{1/m}) /
// (C_h (1 + sigma^{q/m})); +infinity when C_h = 0 or q < 1.
double t_star(double v0_sup, double C_h, double q, double m);

// Per-record defect of the trajectory contraction bound:
//   ||beta(u)-beta(v)||_1 - ||beta(u0)-beta(v0)||_1 - int ||f-g||_1.
// Requires both trajectories recorded at every step on the same grid.
std::vector<double> contraction_gap(const Trajectory& traj_u, const Trajectory& traj_v,
                                    const SourceSpec& src_u, const SourceSpec& src_v);

struct MildCertificate {
  double dt = 0.0;
  double source_error = 0.0;
  double residual_error = 0.0;
  double initial_gap = 0.0;
  double value() const {
    return std::max({dt, source_error + residual_error, initial_gap});
  }
};

// Certificate that the piecewise-constant beta(v) solves the abstract
// problem approximately: partition fineness, accumulated source-average
// error and accumulated solver residual.
MildCertificate mild_certificate(const Trajectory& traj);

// Y(t) = 1/(m+1) sum |v|^{1+1/m} h and M_r(t) = sum |v|^{r+1/m} h per record.
std::pair<std::vector<double>, std::vector<double>> series_Y_and_Mr(
    const Trajectory& traj, double r = 1.0);

// Per-step defect of the discrete energy identity (power source, r = 1):
//   1/(1+m) (sum |v^n|^{1+1/m} - sum |v^{n-1}|^{1+1/m}) h / dt
//   + weak_form(v^n, v^n) - sum |v^n|^{q/m+1} h.
// Requires record_every == 1.
std::vector<double> energy_identity_residuals(const Trajectory& traj);

}  // namespace fplab
