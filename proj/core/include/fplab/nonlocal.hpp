#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fplab/field.hpp"
#include "fplab/grid.hpp"

namespace fplab {

// signed_pow(x, r) = |x|^{r-1} x, the odd power; 0 at 0.
double signed_pow(double x, double r);
// |x|^r with the same fast paths for the common exponents.
double abs_pow(double x, double r);

// Dense Gagliardo weights of the cell-centered collocation:
//   w_ij = h^2 / |x_i - x_j|^{1+sp}  (i != j),  w_ii = 0,
//   tail_terms_i = 2 h T_i.
// Midpoint quadrature on cell pairs with the diagonal excluded; first-order
// consistent for sp < 1 and degrading for sp >= 1.
struct KernelMatrix {
  std::size_t N = 0;
  double h_mesh = 0.0;
  std::vector<double> w;           // row-major N x N, symmetric
  std::vector<double> tail_terms;  // strictly positive

  double at(std::size_t i, std::size_t j) const { return w[i * N + j]; }
};

KernelMatrix build_kernel(const Grid1D& grid);

// ( sum_{i != j} |v_i - v_j|^p w_ij + sum_i |v_i|^p tail_i )^{1/p}.
// eps_reg > 0 replaces |X| by sqrt(X^2 + eps_reg^2) for solver robustness;
// it perturbs the energy and defaults to off.
double seminorm_p(const Field& v, const KernelMatrix& K, double p,
                  double eps_reg = 0.0);
// The p-th power of the seminorm without taking the root.
double seminorm_pow(const Field& v, const KernelMatrix& K, double p,
                    double eps_reg = 0.0);

// <(-Lap)^s_p u, phi> with the convention weak_form(u,u) = seminorm_p(u)^p.
double weak_form(const Field& u, const Field& phi, const KernelMatrix& K,
                 double p, double eps_reg = 0.0);

// Nodal residual g with weak_form(u,phi) = sum_i g_i phi_i h for all phi,
// i.e. g = (1/h) grad of (1/p) seminorm_p(u)^p.
Field op_apply(const Field& u, const KernelMatrix& K, double p,
               double eps_reg = 0.0);

// Scalar power inequalities for the odd map x -> |x|^{p-2} x.  Constants are
// calibrated by a dense angular scan (the two sides are (p-1)-homogeneous)
// before any sampling takes place.
struct InequalityConstants {
  double c1 = 0.0;  // upper constant of the difference bound
  double c2 = 0.0;  // lower constant of the monotonicity bound
  double c3 = 0.0;  // lower constant of the two-sided comparison
  double c4 = 0.0;  // upper constant of the two-sided comparison
};

InequalityConstants calibrate_inequality_constants(double p,
                                                   std::size_t angle_samples = 400000);

struct InequalityReport {
  InequalityConstants constants;
  std::size_t samples = 0;
  std::size_t violations = 0;
  // largest ratio margins per check, all <= 0 when the inequalities hold:
  double margin_diff = 0.0;        // ratio - c1
  double margin_monotone = 0.0;    // c2 - ratio
  double margin_lower = 0.0;       // c3 - ratio
  double margin_upper = 0.0;       // ratio - c4
  double max_margin = 0.0;
};

InequalityReport check_algebraic_inequalities(double p, std::size_t sample_count,
                                              std::uint64_t seed);

}  // namespace fplab
