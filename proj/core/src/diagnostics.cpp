#include "fplab/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace fplab {

double energy_E(const Field& v, const ModelParams& params, const KernelMatrix& K) {
  const double lqm1 = power_sum(v, params.q / params.m + 1.0, K.h_mesh);
  return seminorm_pow(v, K, params.p) / params.p -
         params.m / (params.m + params.q) * lqm1;
}

DiagnosticsRecord compute_record(double t, const Field& v, const ModelParams& params,
                                 const KernelMatrix& K, double r, int iters) {
  const double h = K.h_mesh;
  DiagnosticsRecord rec;
  rec.t = t;
  rec.l1 = l1_h(v, h);
  rec.l2 = l2_h(v, h);
  rec.linf = linf(v);
  const double semp = seminorm_pow(v, K, params.p);
  rec.seminorm = std::pow(semp, 1.0 / params.p);
  rec.lqm1 = power_sum(v, params.q / params.m + 1.0, h);
  rec.E = semp / params.p - params.m / (params.m + params.q) * rec.lqm1;
  rec.Y = power_sum(v, 1.0 + 1.0 / params.m, h) / (params.m + 1.0);
  rec.M_r = power_sum(v, r + 1.0 / params.m, h);
  rec.iters = iters;
  return rec;
}

ExtinctionExponents extinction_exponents(const ModelParams& params, double r) {
  if (!(r >= 1.0))
    throw std::invalid_argument("extinction_exponents: r must be >= 1");
  ExtinctionExponents e;
  const double rm1 = r * params.m + 1.0;
  e.alpha = params.m * (params.p - 1.0 + r) / rm1;
  e.gamma = (r * params.m + params.q) / rm1;
  e.valid_regime = e.alpha < e.gamma && e.gamma <= 1.0;
  return e;
}

double extinction_bound(double M0, double alpha, double c_rate, double t) {
  if (!(alpha < 1.0)) throw std::invalid_argument("extinction_bound: alpha must be < 1");
  if (M0 <= 0.0) return 0.0;
  const double one_minus = 1.0 - alpha;
  const double base = std::pow(M0, one_minus) - c_rate * one_minus * t;
  if (base <= 0.0) return 0.0;
  return std::pow(base, 1.0 / one_minus);
}

double predicted_extinction_time(double M0, double alpha, double c_rate) {
  if (!(alpha < 1.0) || !(c_rate > 0.0))
    throw std::invalid_argument("predicted_extinction_time: needs alpha < 1, c_rate > 0");
  return std::pow(M0, 1.0 - alpha) / (c_rate * (1.0 - alpha));
}

double blowup_exponent(const ModelParams& params) {
  return (params.m + params.q) / (params.m + 1.0);
}

}  // namespace fplab
