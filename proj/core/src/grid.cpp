#include "fplab/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "fplab/field.hpp"

namespace fplab {

void ModelParams::validate() const {
  if (!(m > 1.0)) throw std::invalid_argument("ModelParams: m must be > 1");
  if (!(p > 1.0)) throw std::invalid_argument("ModelParams: p must be > 1");
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("ModelParams: s must lie in (0,1)");
  if (!(q > 0.0)) throw std::invalid_argument("ModelParams: q must be > 0");
  if (!(C_h >= 0.0)) throw std::invalid_argument("ModelParams: C_h must be >= 0");
  if (R && !(*R > 0.0)) throw std::invalid_argument("ModelParams: R must be > 0");
}

double tail_weight(double a, double b, double x, double s, double p) {
  const double sp = s * p;
  if (!(sp > 0.0)) throw std::domain_error("tail_weight: sp must be positive");
  if (!(x > a && x < b))
    throw std::domain_error("tail_weight: degenerate node outside (a,b)");
  return (std::pow(x - a, -sp) + std::pow(b - x, -sp)) / sp;
}

Grid1D build_grid(double a, double b, std::size_t N, const ModelParams& params) {
  if (!(b > a)) throw std::invalid_argument("build_grid: invalid bounds, b <= a");
  if (N < 2) throw std::invalid_argument("build_grid: invalid size, N < 2");
  params.validate();

  Grid1D g;
  g.a = a;
  g.b = b;
  g.N = N;
  g.h_mesh = (b - a) / static_cast<double>(N);
  g.s = params.s;
  g.p = params.p;
  g.nodes.resize(N);
  g.tail.resize(N);
  g.dist.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double x = a + (static_cast<double>(i) + 0.5) * g.h_mesh;
    g.nodes[i] = x;
    g.tail[i] = tail_weight(a, b, x, params.s, params.p);
    g.dist[i] = std::min(x - a, b - x);
  }
  return g;
}

double linf(const Field& v) {
  double m = 0.0;
  for (double x : v.values) m = std::max(m, std::abs(x));
  return m;
}

double l1_h(const Field& v, double h) {
  double s = 0.0;
  for (double x : v.values) s += std::abs(x);
  return s * h;
}

double l2_h(const Field& v, double h) {
  double s = 0.0;
  for (double x : v.values) s += x * x;
  return std::sqrt(s * h);
}

double power_sum(const Field& v, double r, double h) {
  double s = 0.0;
  for (double x : v.values) s += std::pow(std::abs(x), r);
  return s * h;
}

bool all_finite(const Field& v) {
  for (double x : v.values)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace fplab
