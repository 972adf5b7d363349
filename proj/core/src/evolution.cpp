#include "fplab/evolution.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fplab {

double truncate_theta(double theta, double R) {
  assert(R > 0.0);
  return std::copysign(std::min(std::abs(theta), R), theta);
}

double SourceSpec::eval(double t, double x, double theta, double m) const {
  if (kind == Kind::Zero) return 0.0;
  const double th = R ? truncate_theta(theta, *R) : theta;
  if (kind == Kind::Power) return signed_pow(th, q / m);
  return fn(t, x, th);
}

SourceSpec SourceSpec::zero() { return SourceSpec{}; }

SourceSpec SourceSpec::power(double q, double C_h) {
  SourceSpec s;
  s.kind = Kind::Power;
  s.q = q;
  s.C_h = C_h;
  return s;
}

SourceSpec SourceSpec::forced(std::function<double(double, double)> f, double C_h) {
  SourceSpec s;
  s.kind = Kind::Forced;
  s.C_h = C_h;
  s.q = 1.0;
  s.fn = [f = std::move(f)](double t, double x, double) { return f(t, x); };
  return s;
}

SourceSpec SourceSpec::custom(std::function<double(double, double, double)> f,
                              double C_h, double q) {
  SourceSpec s;
  s.kind = Kind::Custom;
  s.C_h = C_h;
  s.q = q;
  s.fn = std::move(f);
  return s;
}

const char* to_string(EventKind e) {
  switch (e) {
    case EventKind::Completed: return "completed";
    case EventKind::Extinct: return "extinct";
    case EventKind::Blowup: return "blowup";
    case EventKind::SolverFailure: return "solver-failure";
  }
  return "unknown";
}

namespace {

// Right-hand side of the implicit step at time level t -> t + dt:
//   f_i = dt h(t + dt/2, x_i, v_prev_i) + beta(v_prev_i)
// with the source frozen at the previous state (midpoint rule in time).
void assemble_rhs(const Field& v_prev, double t, double dt, const ModelParams& mp,
                  const Grid1D& grid, const SourceSpec& src, Field& f, Field& hvals) {
  const std::size_t N = grid.N;
  for (std::size_t i = 0; i < N; ++i) {
    hvals[i] = src.eval(t + 0.5 * dt, grid.nodes[i], v_prev[i], mp.m);
    f[i] = dt * hvals[i] + beta(v_prev[i], mp.m);
  }
}

}  // namespace

StepResult step(const Field& v_prev, double t, const ModelParams& params,
                const Grid1D& grid, const KernelMatrix& K,
                const EvolutionConfig& cfg) {
  if (v_prev.size() != grid.N)
    throw std::invalid_argument("step: field does not match the grid");
  if (!all_finite(v_prev)) throw std::invalid_argument("step: field must be finite");

  Field f(grid.N), hvals(grid.N);
  assemble_rhs(v_prev, t, cfg.dt, params, grid, cfg.source, f, hvals);
  ResolventResult r = solve_resolvent(cfg.dt, f, params, K, cfg.solver, &v_prev);
  return {std::move(r.v), r.residual, r.iterations, r.converged};
}

Trajectory run(const ModelParams& params, const Grid1D& grid,
               const EvolutionConfig& cfg) {
  params.validate();
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (!(cfg.t_end >= cfg.dt)) throw std::invalid_argument("run: t_end must be >= dt");
  if (cfg.v0.size() != grid.N)
    throw std::invalid_argument("run: v0 does not match the grid");
  if (!all_finite(cfg.v0)) throw std::invalid_argument("run: v0 must be finite");
  if (!(cfg.record_every >= 1))
    throw std::invalid_argument("run: record_every must be >= 1");

  const KernelMatrix K = build_kernel(grid);
  const std::size_t N = grid.N;
  const double dt = cfg.dt;
  const double measure = grid.b - grid.a;
  const long n_steps = std::max<long>(1, std::lround(cfg.t_end / dt));

  Trajectory traj;
  traj.grid = grid;
  traj.params = params;
  traj.dt = dt;
  traj.record_every = cfg.record_every;

  double srcsup_acc = 0.0;
  int iters_acc = 0;

  auto record = [&](double t, const Field& v, int iters) {
    traj.times.push_back(t);
    traj.fields.push_back(v);
    traj.series.push_back(
        compute_record(t, v, params, K, cfg.diagnostics_r, iters));
    traj.source_sup_integral.push_back(srcsup_acc);
  };

  Field v = cfg.v0;
  record(0.0, v, 0);

  bool armed = traj.series.front().M_r >= cfg.events.extinction_tol;
  int streak = 0;
  double extinct_t0 = 0.0;
  bool fired = false;

  Field f(N), hvals(N), hv_end(N);
  for (long n = 1; n <= n_steps; ++n) {
    const double t_prev = static_cast<double>(n - 1) * dt;
    const double t_now = static_cast<double>(n) * dt;

    assemble_rhs(v, t_prev, dt, params, grid, cfg.source, f, hvals);
    ResolventResult sol = solve_resolvent(dt, f, params, K, cfg.solver, &v);
    iters_acc += sol.iterations;

    if (!sol.converged) {
      traj.event = EventKind::SolverFailure;
      traj.event_time = t_now;
      record(t_now, sol.v, iters_acc);
      fired = true;
      break;
    }

    if (linf(sol.v) > cfg.events.blowup_threshold) {
      // report the last stable step and do not continue past the event
      traj.event = EventKind::Blowup;
      traj.event_time = t_prev;
      if (traj.times.back() != t_prev) record(t_prev, v, iters_acc);
      fired = true;
      break;
    }

    double hsup = 0.0, src_err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      hsup = std::max(hsup, std::abs(hvals[i]));
      src_err += std::abs(cfg.source.eval(t_prev, grid.nodes[i], v[i], params.m) -
                          hvals[i]);
      hv_end[i] = cfg.source.eval(t_now, grid.nodes[i], sol.v[i], params.m);
    }
    for (std::size_t i = 0; i < N; ++i) src_err += std::abs(hv_end[i] - hvals[i]);
    srcsup_acc += dt * hsup;
    traj.source_error += 0.5 * dt * src_err * grid.h_mesh;
    traj.residual_error += dt * sol.residual * measure;

    v = std::move(sol.v);

    if (n % cfg.record_every == 0 || n == n_steps) {
      record(t_now, v, iters_acc);
      iters_acc = 0;

      const DiagnosticsRecord& rec = traj.series.back();
      if (!armed && rec.M_r >= cfg.events.extinction_tol) armed = true;
      if (armed) {
        if (rec.M_r < cfg.events.extinction_tol) {
          if (streak == 0) extinct_t0 = rec.t;
          ++streak;
          if (streak >= cfg.events.extinction_consecutive) {
            traj.event = EventKind::Extinct;
            traj.event_time = extinct_t0;
            fired = true;
            break;
          }
        } else {
          streak = 0;
        }
      }
    }
  }

  if (!fired) {
    traj.event = EventKind::Completed;
    traj.event_time = static_cast<double>(n_steps) * dt;
  }
  return traj;
}

double t_star(double v0_sup, double C_h, double q, double m) {
  const double inf = std::numeric_limits<double>::infinity();
  if (!(C_h > 0.0)) return inf;
  if (q < 1.0) return inf;  // the supremum is unbounded for sublinear growth

  const double c0 = std::pow(std::max(v0_sup, 0.0), 1.0 / m);
  auto value = [&](double sigma) {
    return (std::pow(sigma, 1.0 / m) - c0) / (C_h * (1.0 + std::pow(sigma, q / m)));
  };

  // log-spaced scan, then golden-section refinement around the best point
  const int n = 4000;
  const double lo = std::log(1e-12), hi = std::log(1e30);
  double best = -inf;
  int best_k = 0;
  for (int k = 0; k <= n; ++k) {
    const double val = value(std::exp(lo + (hi - lo) * k / n));
    if (val > best) {
      best = val;
      best_k = k;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_k - 1) / n;
  double b = lo + (hi - lo) * std::min(n, best_k + 1) / n;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = value(std::exp(x1)), f2 = value(std::exp(x2));
  for (int k = 0; k < 300 && b - a > 1e-14; ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = value(std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = value(std::exp(x1));
    }
  }
  return std::max(best, std::max(f1, f2));
}

std::vector<double> contraction_gap(const Trajectory& tu, const Trajectory& tv,
                                    const SourceSpec& su, const SourceSpec& sv) {
  const Grid1D& grid = tu.grid;
  if (tv.grid.N != grid.N || tv.grid.a != grid.a || tv.grid.b != grid.b ||
      tu.dt != tv.dt || tu.times.size() != tv.times.size() ||
      tu.record_every != 1 || tv.record_every != 1 ||
      tu.params.m != tv.params.m)
    throw std::invalid_argument("contraction_gap: mismatched trajectories");
  for (std::size_t k = 0; k < tu.times.size(); ++k)
    if (tu.times[k] != tv.times[k])
      throw std::invalid_argument("contraction_gap: mismatched time stamps");

  const std::size_t N = grid.N;
  const double h = grid.h_mesh;
  const double m = tu.params.m;
  const double dt = tu.dt;

  auto beta_l1_diff = [&](const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      s += std::abs(beta(a[i], m) - beta(b[i], m));
    return s * h;
  };

  const double base = beta_l1_diff(tu.fields.front(), tv.fields.front());
  std::vector<double> gap(tu.times.size());
  gap[0] = 0.0;
  double acc = 0.0;
  for (std::size_t k = 1; k < tu.times.size(); ++k) {
    const double t_mid = tu.times[k - 1] + 0.5 * dt;
    double sd = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double fu = su.eval(t_mid, grid.nodes[i], tu.fields[k - 1][i], m);
      const double fv = sv.eval(t_mid, grid.nodes[i], tv.fields[k - 1][i], m);
      sd += std::abs(fu - fv);
    }
    acc += dt * sd * h;
    gap[k] = beta_l1_diff(tu.fields[k], tv.fields[k]) - base - acc;
  }
  return gap;
}

MildCertificate mild_certificate(const Trajectory& traj) {
  MildCertificate c;
  c.dt = traj.dt;
  c.source_error = traj.source_error;
  c.residual_error = traj.residual_error;
  c.initial_gap = traj.initial_gap;
  return c;
}

std::pair<std::vector<double>, std::vector<double>> series_Y_and_Mr(
    const Trajectory& traj, double r) {
  const double h = traj.grid.h_mesh;
  const double m = traj.params.m;
  std::vector<double> Y(traj.fields.size()), Mr(traj.fields.size());
  for (std::size_t k = 0; k < traj.fields.size(); ++k) {
    Y[k] = power_sum(traj.fields[k], 1.0 + 1.0 / m, h) / (m + 1.0);
    Mr[k] = power_sum(traj.fields[k], r + 1.0 / m, h);
  }
  return {std::move(Y), std::move(Mr)};
}

std::vector<double> energy_identity_residuals(const Trajectory& traj) {
  if (traj.record_every != 1)
    throw std::invalid_argument(
        "energy_identity_residuals: needs a trajectory recorded at every step");
  const KernelMatrix K = build_kernel(traj.grid);
  const double h = traj.grid.h_mesh;
  const double m = traj.params.m;
  const double qm1 = traj.params.q / traj.params.m + 1.0;

  std::vector<double> res;
  res.reserve(traj.fields.size() > 0 ? traj.fields.size() - 1 : 0);
  double M_prev = power_sum(traj.fields.front(), 1.0 + 1.0 / m, h);
  for (std::size_t k = 1; k < traj.fields.size(); ++k) {
    const Field& vk = traj.fields[k];
    const double M_k = power_sum(vk, 1.0 + 1.0 / m, h);
    const double dtk = traj.times[k] - traj.times[k - 1];
    const double r = (M_k - M_prev) / ((1.0 + m) * dtk) +
                     weak_form(vk, vk, K, traj.params.p) - power_sum(vk, qm1, h);
    res.push_back(r);
    M_prev = M_k;
  }
  return res;
}

}  // namespace fplab
