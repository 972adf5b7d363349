#pragma once

#include "fplab/field.hpp"
#include "fplab/grid.hpp"
#include "fplab/nonlocal.hpp"

namespace fplab {

// Per-time scalar functionals.  All L^r quantities use the quadrature
// sum_i |v_i|^r h; M_r and lqm1 are the powered norms, not their roots.
struct DiagnosticsRecord {
  double t = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double seminorm = 0.0;  // seminorm_p(v), the root
  double E = 0.0;
  double Y = 0.0;
  double M_r = 0.0;
  double lqm1 = 0.0;  // sum_i |v_i|^{q/m+1} h
  int iters = 0;      // inner solver iterations since the previous record
};

// E(v) = (1/p) seminorm_p(v)^p - m/(m+q) sum_i |v_i|^{q/m+1} h.
double energy_E(const Field& v, const ModelParams& params, const KernelMatrix& K);

DiagnosticsRecord compute_record(double t, const Field& v, const ModelParams& params,
                                 const KernelMatrix& K, double r = 1.0,
                                 int iters = 0);

struct ExtinctionExponents {
  double alpha = 0.0;  // m (p-1+r) / (rm+1)
  double gamma = 0.0;  // (rm+q) / (rm+1)
  bool valid_regime = false;  // alpha < gamma <= 1 with gamma = 1 allowed at q = 1
};

ExtinctionExponents extinction_exponents(const ModelParams& params, double r = 1.0);

// (M0^{1-alpha} - c_rate (1-alpha) t)^{1/(1-alpha)}, clamped to 0 once the
// base is nonpositive.  c_rate is the effective decay coefficient of
// M' <= -c_rate M^alpha.
double extinction_bound(double M0, double alpha, double c_rate, double t);
double predicted_extinction_time(double M0, double alpha, double c_rate);

// nu = (m+q)/(m+1); superlinear growth regime when nu > 1.
double blowup_exponent(const ModelParams& params);

}  // namespace fplab
