#pragma once

// Test-side oracles, independent of the library's kernel and solver paths:
// adaptive quadrature for the exterior kernel integral, brute-force
// Gagliardo double sums, dense grid searches.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>

#include "fplab/field.hpp"
#include "fplab/grid.hpp"

namespace oracles {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 48) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// integral of |x - y|^{-(1+sp)} over R \ (a,b) via the substitution
// y = x -+ e^u, which turns each half-line into a smooth exponential
inline double exterior_kernel_integral(double a, double b, double x, double sp) {
  auto g = [sp](double u) { return std::exp(-sp * u); };
  auto half = [&](double d) {
    const double u0 = std::log(d);
    const double span = 80.0 / sp;
    const double scale = std::exp(-sp * u0) / sp;  // ballpark for the tolerance only
    return adaptive_simpson(g, u0, u0 + span, 1e-13 * scale);
  };
  return half(x - a) + half(b - x);
}

inline double abs_pow_or(double x, double r) { return std::pow(std::abs(x), r); }
inline double signed_pow_or(double x, double r) {
  return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), r), x);
}

// direct double sum over ordered pairs plus the quadrature tail
inline double seminorm_pow_bruteforce(const fplab::Field& v, const fplab::Grid1D& g) {
  const double sp = g.s * g.p;
  const double p = g.p;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.N; ++i)
    for (std::size_t j = 0; j < g.N; ++j) {
      if (i == j) continue;
      acc += abs_pow_or(v[i] - v[j], p) * g.h_mesh * g.h_mesh /
             std::pow(std::abs(g.nodes[i] - g.nodes[j]), 1.0 + sp);
    }
  for (std::size_t i = 0; i < g.N; ++i)
    acc += abs_pow_or(v[i], p) * 2.0 * g.h_mesh *
           exterior_kernel_integral(g.a, g.b, g.nodes[i], sp);
  return acc;
}

inline double weak_form_bruteforce(const fplab::Field& u, const fplab::Field& phi,
                                   const fplab::Grid1D& g) {
  const double sp = g.s * g.p;
  const double pm1 = g.p - 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.N; ++i)
    for (std::size_t j = 0; j < g.N; ++j) {
      if (i == j) continue;
      acc += signed_pow_or(u[i] - u[j], pm1) * (phi[i] - phi[j]) * g.h_mesh *
             g.h_mesh / std::pow(std::abs(g.nodes[i] - g.nodes[j]), 1.0 + sp);
    }
  for (std::size_t i = 0; i < g.N; ++i)
    acc += signed_pow_or(u[i], pm1) * phi[i] * 2.0 * g.h_mesh *
           exterior_kernel_integral(g.a, g.b, g.nodes[i], sp);
  return acc;
}

// coarse grid scan with shrinking refinement around the best point
template <class F2>
inline std::pair<double, double> argmin_2d(F2&& J, double lo, double hi, int n,
                                           int refinements) {
  double cx = 0.5 * (lo + hi), cy = cx;
  double half = 0.5 * (hi - lo);
  double bx = cx, by = cy;
  for (int round = 0; round <= refinements; ++round) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double x = cx - half + 2.0 * half * i / n;
        const double y = cy - half + 2.0 * half * j / n;
        const double val = J(x, y);
        if (val < best) {
          best = val;
          bx = x;
          by = y;
        }
      }
    cx = bx;
    cy = by;
    half *= 2.5 / n;  // keep a couple of old cells around the winner
  }
  return {bx, by};
}

inline double t_star_scan(double v0_sup, double C_h, double q, double m,
                          double lo = 1e-6, double hi = 1e6, int n = 4000000) {
  const double c0 = std::pow(v0_sup, 1.0 / m);
  const double llo = std::log(lo), lhi = std::log(hi);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double sigma = std::exp(llo + (lhi - llo) * k / n);
    const double val =
        (std::pow(sigma, 1.0 / m) - c0) / (C_h * (1.0 + std::pow(sigma, q / m)));
    best = std::max(best, val);
  }
  return best;
}

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {  // splitmix64
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

inline fplab::Field random_field(std::size_t n, Rng& rng, double lo = -1.0,
                                 double hi = 1.0) {
  fplab::Field v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// shuffled ladder with small jitter: pairwise value gaps stay bounded away
// from zero, which keeps |v_i - v_j|^{p-2} tame for p < 2
inline fplab::Field spread_field(std::size_t n, Rng& rng) {
  fplab::Field v(n);
  const double gap = 2.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = -1.0 + gap * static_cast<double>(i);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(v.values[i], v.values[rng.index(i + 1)]);
  for (std::size_t i = 0; i < n; ++i) v[i] += rng.uniform(-0.2 * gap, 0.2 * gap);
  return v;
}

}  // namespace oracles
