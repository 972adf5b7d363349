#pragma once

#include <optional>

#include "fplab/field.hpp"
#include "fplab/grid.hpp"
#include "fplab/nonlocal.hpp"

namespace fplab {

// beta(theta) = |theta|^{1/m-1} theta, strictly increasing and odd.
double beta(double theta, double m);
// Pointwise antiderivative G(theta) = m/(m+1) |theta|^{(m+1)/m}, G' = beta.
double beta_primitive(double theta, double m);

// Unique root of w * beta(x) + x - z = 0.  sign(x) = sign(z), |x| <= |z|;
// safeguarded Newton on the bracket [0, z].
double scalar_prox(double z, double w, double m, double tol = 1e-14);

struct SolverConfig {
  double tol_residual = 1e-10;    // scaled sup-norm of the optimality residual
  int max_iter = 20000;
  double backtrack_factor = 0.5;  // in (0,1)
  double init_step = 1.0;
  double prox_tol = 1e-14;        // scalar root tolerance
  double eps_reg = 0.0;           // kernel smoothing, off by default
};

// The resolvent problem: beta(v) + lambda (-Lap)^s_p v = f on the grid.
struct EllipticProblem {
  double lambda = 1.0;  // > 0
  Field rhs;
  ModelParams params;
  Grid1D grid;
};

struct ResolventResult {
  Field v;
  double residual = 0.0;  // final sup-norm of beta(v) + lambda op(v) - f
  int iterations = 0;
  bool converged = false;
};

// Minimizes  J(v) = sum_i G(v_i) h + (lambda/p) seminorm_p(v)^p - sum_i f_i v_i h
// by proximal descent with backtracking: gradient step on the smooth part,
// then componentwise scalar_prox for the G-term.  Stops when
// || beta(v) + lambda op(v) - f ||_inf <= tol_residual (1 + ||f||_inf).
ResolventResult solve_resolvent(double lambda, const Field& rhs,
                                const ModelParams& params, const KernelMatrix& K,
                                const SolverConfig& cfg,
                                const Field* v_init = nullptr);
ResolventResult solve_resolvent(const EllipticProblem& prob, const SolverConfig& cfg,
                                const Field* v_init = nullptr);

struct SteadyStateResult {
  Field v;
  double residual = 0.0;  // h * max_i |op(v)_i - sp(v_i, q/m)|
  int iterations = 0;
  bool converged = false;
  double j_stat = 0.0;
  bool trivial = false;  // seminorm below 1e-8, failed nontriviality
};

// Positive stationary profile: minimizes
//   J(v) = (1/p) seminorm_p(v)^p - m/(q+m) sum_i |v_i|^{q/m+1} h
// from the positive ray c d(x)^s.  Requires the subhomogeneous regime
// p > q/m + 1 (throws std::invalid_argument otherwise).
SteadyStateResult solve_steady_state(const ModelParams& params, const Grid1D& grid,
                                     const SolverConfig& cfg,
                                     const Field* v_init = nullptr);

// Test predicate: ordered residuals must give ordered solutions.  Returns
// true when (lhs_u <= lhs_v componentwise) implies (u <= v + tol).
bool check_comparison(const Field& u, const Field& v, const Field& lhs_u,
                      const Field& lhs_v, double tol = 1e-9);

// Discrete objective values, exposed for oracles and diagnostics.
double j_disc(const Field& v, double lambda, const Field& rhs,
              const ModelParams& params, const KernelMatrix& K);
double j_stat(const Field& v, const ModelParams& params, const KernelMatrix& K);

}  // namespace fplab
