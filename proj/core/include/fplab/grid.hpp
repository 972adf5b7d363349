#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace fplab {

// Scalar parameters of the equation  d/dt beta(v) + (-Lap)^s_p v = h(t,x,v)
// with beta(v) = |v|^{1/m-1} v on an interval with exterior-zero condition.
struct ModelParams {
  double m = 2.0;    // porous exponent, > 1
  double p = 2.0;    // p-Laplacian exponent, > 1
  double s = 0.5;    // fractional order, in (0,1)
  double q = 1.0;    // source growth exponent, > 0
  double C_h = 1.0;  // growth constant of the source bound, >= 0
  std::optional<double> R;  // source truncation level, > 0 when set

  double sp() const { return s * p; }
  double homogeneity_threshold() const { return q / m + 1.0; }
  bool subhomogeneous() const { return p > homogeneity_threshold(); }
  bool superhomogeneous() const { return p < homogeneity_threshold(); }

  // Throws std::invalid_argument when any bound above is violated.
  void validate() const;
};

// Uniform cell-centered mesh of (a,b).  tail[i] is the exact integral of
// the kernel |x_i - y|^{-(1+sp)} over R \ (a,b); it carries the exterior
// zero condition so only interior nodes are ever stored.
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  std::size_t N = 0;
  double h_mesh = 0.0;
  double s = 0.5;  // orders the tail weights were built with
  double p = 2.0;
  std::vector<double> nodes;  // x_i = a + (i + 1/2) h_mesh
  std::vector<double> tail;   // T_i > 0
  std::vector<double> dist;   // min(x_i - a, b - x_i)
};

// T(x) = ((x-a)^{-sp} + (b-x)^{-sp}) / sp, the exterior kernel integral.
// Throws std::domain_error when x lies outside (a,b).
double tail_weight(double a, double b, double x, double s, double p);

// Throws std::invalid_argument on b <= a or N < 2.
Grid1D build_grid(double a, double b, std::size_t N, const ModelParams& params);

}  // namespace fplab
