#include "fplab/nonlocal.hpp"

#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fplab {

double signed_pow(double x, double r) {
  if (x == 0.0) return 0.0;
  if (r == 1.0) return x;
  if (r == 2.0) return x * std::abs(x);
  if (r == 3.0) return x * x * x;
  if (r == 0.5) return std::copysign(std::sqrt(std::abs(x)), x);
  return std::copysign(std::pow(std::abs(x), r), x);
}

double abs_pow(double x, double r) {
  const double a = std::abs(x);
  if (r == 1.0) return a;
  if (r == 2.0) return a * a;
  if (r == 3.0) return a * a * a;
  if (r == 0.5) return std::sqrt(a);
  if (r == 1.5) return a * std::sqrt(a);
  return std::pow(a, r);
}

KernelMatrix build_kernel(const Grid1D& grid) {
  const std::size_t N = grid.N;
  const double sp = grid.s * grid.p;
  const double h = grid.h_mesh;

  KernelMatrix K;
  K.N = N;
  K.h_mesh = h;
  K.w.assign(N * N, 0.0);
  K.tail_terms.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      const double d = std::abs(grid.nodes[i] - grid.nodes[j]);
      const double wij = h * h / std::pow(d, 1.0 + sp);
      K.w[i * N + j] = wij;
      K.w[j * N + i] = wij;
    }
    K.tail_terms[i] = 2.0 * h * grid.tail[i];
  }
  return K;
}

namespace {

// |x|^p with the optional smoothing |x| -> sqrt(x^2 + eps^2)
inline double abs_pow_reg(double x, double p, double eps) {
  if (eps == 0.0) return abs_pow(x, p);
  return std::pow(std::sqrt(x * x + eps * eps), p);
}

// |x|^{r-1} x with the smoothing applied to the magnitude factor
inline double signed_pow_reg(double x, double r, double eps) {
  if (eps == 0.0) return signed_pow(x, r);
  return std::pow(std::sqrt(x * x + eps * eps), r - 1.0) * x;
}

}  // namespace

double seminorm_pow(const Field& v, const KernelMatrix& K, double p, double eps_reg) {
  const std::size_t N = K.N;
  assert(v.size() == N);
  double pair_acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double vi = v[i];
    const double* row = &K.w[i * N];
    for (std::size_t j = i + 1; j < N; ++j)
      pair_acc += abs_pow_reg(vi - v[j], p, eps_reg) * row[j];
  }
  double tail_acc = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    tail_acc += abs_pow_reg(v[i], p, eps_reg) * K.tail_terms[i];
  return 2.0 * pair_acc + tail_acc;
}

double seminorm_p(const Field& v, const KernelMatrix& K, double p, double eps_reg) {
  return std::pow(seminorm_pow(v, K, p, eps_reg), 1.0 / p);
}

double weak_form(const Field& u, const Field& phi, const KernelMatrix& K, double p,
                 double eps_reg) {
  const std::size_t N = K.N;
  assert(u.size() == N && phi.size() == N);
  const double pm1 = p - 1.0;
  double pair_acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double ui = u[i];
    const double pi = phi[i];
    const double* row = &K.w[i * N];
    for (std::size_t j = i + 1; j < N; ++j)
      pair_acc += signed_pow_reg(ui - u[j], pm1, eps_reg) * (pi - phi[j]) * row[j];
  }
  double tail_acc = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    tail_acc += signed_pow_reg(u[i], pm1, eps_reg) * phi[i] * K.tail_terms[i];
  return 2.0 * pair_acc + tail_acc;
}

Field op_apply(const Field& u, const KernelMatrix& K, double p, double eps_reg) {
  const std::size_t N = K.N;
  assert(u.size() == N);
  const double pm1 = p - 1.0;
  Field g(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double ui = u[i];
    const double* row = &K.w[i * N];
    for (std::size_t j = i + 1; j < N; ++j) {
      const double a = signed_pow_reg(ui - u[j], pm1, eps_reg) * row[j];
      g[i] += a;
      g[j] -= a;
    }
  }
  const double inv_h = 1.0 / K.h_mesh;
  for (std::size_t i = 0; i < N; ++i) {
    g[i] = (2.0 * g[i] + signed_pow_reg(u[i], pm1, eps_reg) * K.tail_terms[i]) * inv_h;
  }
  return g;
}

namespace {

// The three two-point inequalities, written as ratios of the bounded side
// to the bounding side so that the calibration is scale-free.
struct PairRatios {
  double diff = -1.0;      // <= c1
  double monotone = -1.0;  // >= c2
  double two_sided = -1.0; // in [c3, c4]
  bool valid = false;
};

PairRatios pair_ratios(double xi, double eta, double p) {
  PairRatios r;
  const double d = xi - eta;
  if (d == 0.0) return r;
  const double sum = std::abs(xi) + std::abs(eta);
  if (sum == 0.0) return r;
  const double A = signed_pow(xi, p - 1.0) - signed_pow(eta, p - 1.0);

  const double b_diff =
      (p >= 2.0) ? std::abs(d) * std::pow(sum, p - 2.0) : abs_pow(d, p - 1.0);
  const double b_mono =
      (p >= 2.0) ? abs_pow(d, p) : d * d / std::pow(sum, 2.0 - p);
  const double b_two = std::abs(d) * std::pow(sum, p - 2.0);
  if (!(b_diff > 0.0) || !(b_mono > 0.0) || !(b_two > 0.0)) return r;

  r.diff = std::abs(A) / b_diff;
  r.monotone = (A * d) / b_mono;
  r.two_sided = std::abs(A) / b_two;
  r.valid = true;
  return r;
}

}  // namespace

InequalityConstants calibrate_inequality_constants(double p, std::size_t angle_samples) {
  if (!(p > 1.0))
    throw std::invalid_argument("calibrate_inequality_constants: p must be > 1");

  double sup_diff = 0.0, inf_mono = 1e300, inf_two = 1e300, sup_two = 0.0;
  auto feed = [&](double theta) {
    const double xi = std::cos(theta);
    const double eta = std::sin(theta);
    const PairRatios r = pair_ratios(xi, eta, p);
    if (!r.valid) return;
    sup_diff = std::max(sup_diff, r.diff);
    inf_mono = std::min(inf_mono, r.monotone);
    inf_two = std::min(inf_two, r.two_sided);
    sup_two = std::max(sup_two, r.two_sided);
  };

  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t k = 0; k < angle_samples; ++k)
    feed(two_pi * (static_cast<double>(k) + 0.5) / static_cast<double>(angle_samples));

  // The extremal ratios can sit in the limits xi -> eta, xi -> -eta or on
  // the axes; approach those directions geometrically.  Offsets below
  // 1e-11 drown in rounding noise of the power differences.
  const double special[] = {0.0,           two_pi / 8.0,  two_pi / 4.0,
                            3 * two_pi / 8, two_pi / 2.0, 5 * two_pi / 8,
                            3 * two_pi / 4, 7 * two_pi / 8};
  for (double base : special) {
    double off = 1e-2;
    while (off >= 1e-11) {
      feed(base + off);
      feed(base - off);
      off *= 0.1;
    }
  }

  // Relax by a relative cushion: the constants need not be sharp, only
  // valid for every pair.
  const double cushion = 1e-6;
  InequalityConstants c;
  c.c1 = sup_diff * (1.0 + cushion);
  c.c2 = inf_mono * (1.0 - cushion);
  c.c3 = inf_two * (1.0 - cushion);
  c.c4 = sup_two * (1.0 + cushion);
  return c;
}

InequalityReport check_algebraic_inequalities(double p, std::size_t sample_count,
                                              std::uint64_t seed) {
  if (!(p > 1.0))
    throw std::invalid_argument("check_algebraic_inequalities: p must be > 1");

  InequalityReport rep;
  rep.constants = calibrate_inequality_constants(p);
  rep.samples = sample_count;
  rep.margin_diff = rep.margin_monotone = rep.margin_lower = rep.margin_upper = -1e300;

  std::mt19937_64 eng(seed);
  auto uniform = [&eng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  };

  for (std::size_t k = 0; k < sample_count; ++k) {
    const double xi = uniform(-10.0, 10.0);
    const double eta = uniform(-10.0, 10.0);
    const PairRatios r = pair_ratios(xi, eta, p);
    if (!r.valid) continue;  // degenerate pair, 0 <= 0 holds trivially
    const double m1 = r.diff - rep.constants.c1;
    const double m2 = rep.constants.c2 - r.monotone;
    const double m3 = rep.constants.c3 - r.two_sided;
    const double m4 = r.two_sided - rep.constants.c4;
    rep.margin_diff = std::max(rep.margin_diff, m1);
    rep.margin_monotone = std::max(rep.margin_monotone, m2);
    rep.margin_lower = std::max(rep.margin_lower, m3);
    rep.margin_upper = std::max(rep.margin_upper, m4);
    if (m1 > 0.0 || m2 > 0.0 || m3 > 0.0 || m4 > 0.0) ++rep.violations;
  }
  rep.max_margin = std::max({rep.margin_diff, rep.margin_monotone, rep.margin_lower,
                             rep.margin_upper});
  return rep;
}

}  // namespace fplab
