#include <doctest.h>

#include <cmath>

#include "fplab/nonlocal.hpp"
#include "support/oracles.hpp"

using namespace fplab;

namespace {

struct Setup {
  Grid1D grid;
  KernelMatrix K;
};

Setup make(double a, double b, std::size_t N, double s, double p) {
  ModelParams mp;
  mp.s = s;
  mp.p = p;
  Setup st;
  st.grid = build_grid(a, b, N, mp);
  st.K = build_kernel(st.grid);
  return st;
}

}  // namespace

TEST_CASE("signed powers") {
  CHECK(signed_pow(0.0, 0.7) == 0.0);
  CHECK(signed_pow(4.0, 0.5) == doctest::Approx(2.0));
  CHECK(signed_pow(-4.0, 0.5) == doctest::Approx(-2.0));
  CHECK(signed_pow(-3.0, 2.0) == doctest::Approx(-9.0));
  CHECK(signed_pow(2.0, 3.0) == doctest::Approx(8.0));
  CHECK(abs_pow(-2.0, 1.5) == doctest::Approx(std::pow(2.0, 1.5)));
}

TEST_CASE("kernel symmetry and positivity") {
  const Setup st = make(0.0, 1.0, 16, 0.5, 2.0);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(st.K.at(i, i) == 0.0);
    CHECK(st.K.tail_terms[i] > 0.0);
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(st.K.at(i, j) == st.K.at(j, i));
      CHECK(st.K.at(i, j) >= 0.0);
    }
  }
}

TEST_CASE("seminorm of the zero field and evenness") {
  const Setup st = make(0.0, 1.0, 16, 0.5, 2.5);
  CHECK(seminorm_p(Field(16, 0.0), st.K, 2.5) == 0.0);

  oracles::Rng rng(11);
  const Field v = oracles::random_field(16, rng);
  Field neg(16);
  for (std::size_t i = 0; i < 16; ++i) neg[i] = -v[i];
  CHECK(seminorm_p(v, st.K, 2.5) ==
        doctest::Approx(seminorm_p(neg, st.K, 2.5)).epsilon(1e-15));
  CHECK(seminorm_p(v, st.K, 2.5) > 0.0);
}

TEST_CASE("unit spike on a two-cell grid") {
  // m anything, p = 2, s = 0.5 on (0,1): pair sum 2 w_01 = 2, tail of node 0
  // contributes (16/3), total 22/3
  const Setup st = make(0.0, 1.0, 2, 0.5, 2.0);
  Field v(2, 0.0);
  v[0] = 1.0;
  const double direct = seminorm_pow(v, st.K, 2.0);
  CHECK(direct == doctest::Approx(22.0 / 3.0).epsilon(1e-13));
  CHECK(seminorm_p(v, st.K, 2.0) ==
        doctest::Approx(std::sqrt(22.0 / 3.0)).epsilon(1e-13));
  // independent route: brute-force double sum with quadrature tails
  CHECK(oracles::seminorm_pow_bruteforce(v, st.grid) ==
        doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("seminorm homogeneity") {
  const Setup st = make(0.0, 1.0, 24, 0.4, 3.0);
  oracles::Rng rng(5);
  const Field v = oracles::random_field(24, rng);
  for (double t : {0.5, 2.0, 7.25}) {
    Field tv(24);
    for (std::size_t i = 0; i < 24; ++i) tv[i] = t * v[i];
    CHECK(seminorm_p(tv, st.K, 3.0) ==
          doctest::Approx(t * seminorm_p(v, st.K, 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("weak form identities") {
  const Setup st = make(0.0, 1.0, 16, 0.5, 3.0);
  oracles::Rng rng(17);
  const Field u = oracles::random_field(16, rng);
  const Field phi = oracles::random_field(16, rng);
  const Field psi = oracles::random_field(16, rng);

  CHECK(weak_form(Field(16, 0.0), phi, st.K, 3.0) == 0.0);
  CHECK(weak_form(u, u, st.K, 3.0) ==
        doctest::Approx(seminorm_pow(u, st.K, 3.0)).epsilon(1e-13));

  // linear in the test field
  Field combo(16);
  for (std::size_t i = 0; i < 16; ++i) combo[i] = 2.0 * phi[i] - 3.0 * psi[i];
  CHECK(weak_form(u, combo, st.K, 3.0) ==
        doctest::Approx(2.0 * weak_form(u, phi, st.K, 3.0) -
                        3.0 * weak_form(u, psi, st.K, 3.0))
            .epsilon(1e-12));

  // brute-force oracle on a random pair
  CHECK(weak_form(u, phi, st.K, 3.0) ==
        doctest::Approx(oracles::weak_form_bruteforce(u, phi, st.grid)).epsilon(1e-10));
}

TEST_CASE("constant fields only see the tail") {
  const Setup st = make(0.0, 1.0, 12, 0.5, 2.5);
  oracles::Rng rng(3);
  const Field phi = oracles::random_field(12, rng);
  const double c = 0.8;
  Field u(12, c);
  double expected = 0.0;
  for (std::size_t i = 0; i < 12; ++i)
    expected += std::pow(c, 1.5) * phi[i] * st.K.tail_terms[i];
  CHECK(weak_form(u, phi, st.K, 2.5) == doctest::Approx(expected).epsilon(1e-12));

  Field ones(12, 1.0);
  CHECK(weak_form(u, ones, st.K, 2.5) > 0.0);  // the exterior breaks translation invariance
}

TEST_CASE("op_apply basics") {
  const Setup st = make(0.0, 1.0, 20, 0.5, 3.0);
  oracles::Rng rng(23);
  const Field u = oracles::random_field(20, rng);

  const Field z = op_apply(Field(20, 0.0), st.K, 3.0);
  for (double g : z) CHECK(g == 0.0);

  Field neg(20);
  for (std::size_t i = 0; i < 20; ++i) neg[i] = -u[i];
  const Field gu = op_apply(u, st.K, 3.0);
  const Field gn = op_apply(neg, st.K, 3.0);
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(gn[i] == doctest::Approx(-gu[i]).epsilon(1e-14));

  // (p-1)-homogeneity at t = 2, p = 3
  Field tu(20);
  for (std::size_t i = 0; i < 20; ++i) tu[i] = 2.0 * u[i];
  const Field gt = op_apply(tu, st.K, 3.0);
  for (std::size_t i = 0; i < 20; ++i)
    CHECK(gt[i] == doctest::Approx(4.0 * gu[i]).epsilon(1e-12));

  // duality with the weak form
  const Field phi = oracles::random_field(20, rng);
  double dual = 0.0;
  for (std::size_t i = 0; i < 20; ++i) dual += gu[i] * phi[i] * st.K.h_mesh;
  CHECK(weak_form(u, phi, st.K, 3.0) == doctest::Approx(dual).epsilon(1e-12));
}

TEST_CASE("op_apply is the gradient of the energy") {
  for (double p : {1.5, 2.0, 3.0}) {
    const Setup st = make(0.0, 1.0, 24, 0.5, p);
    oracles::Rng rng(31);
    const Field u = (p < 2.0) ? oracles::spread_field(24, rng)
                              : oracles::random_field(24, rng);
    const Field g = op_apply(u, st.K, p);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 24; ++i) {
      const double eps = 1e-6 * (1.0 + std::abs(u[i]));
      Field up = u, dn = u;
      up[i] += eps;
      dn[i] -= eps;
      const double fd = (seminorm_pow(up, st.K, p) - seminorm_pow(dn, st.K, p)) /
                        (2.0 * eps * p * st.K.h_mesh);
      num += (fd - g[i]) * (fd - g[i]);
      den += g[i] * g[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-6);
  }
}

TEST_CASE("monotonicity of the nodal residual") {
  const Setup st = make(0.0, 1.0, 16, 0.6, 2.5);
  oracles::Rng rng(41);
  for (int k = 0; k < 50; ++k) {
    const Field u = oracles::random_field(16, rng);
    const Field v = oracles::random_field(16, rng);
    const Field gu = op_apply(u, st.K, 2.5);
    const Field gv = op_apply(v, st.K, 2.5);
    double pairing = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
      pairing += (gu[i] - gv[i]) * (u[i] - v[i]) * st.K.h_mesh;
    CHECK(pairing >= -1e-12);
  }
}

TEST_CASE("power inequalities hold with calibrated constants") {
  for (double p : {1.5, 3.0}) {
    const InequalityReport rep = check_algebraic_inequalities(p, 20000, 1234);
    CHECK(rep.violations == 0);
    CHECK(rep.max_margin <= 0.0);
    CHECK(rep.constants.c1 > 0.0);
    CHECK(rep.constants.c2 > 0.0);
    CHECK(rep.constants.c3 > 0.0);
    CHECK(rep.constants.c4 >= rep.constants.c3);
  }
}

TEST_CASE("p = 2 monotonicity bound is the exact identity") {
  oracles::Rng rng(77);
  for (int k = 0; k < 1000; ++k) {
    const double xi = rng.uniform(-10.0, 10.0);
    const double eta = rng.uniform(-10.0, 10.0);
    const double lhs = (signed_pow(xi, 1.0) - signed_pow(eta, 1.0)) * (xi - eta);
    const double rhs = (xi - eta) * (xi - eta);
    CHECK(lhs == rhs);  // c2 = 1 exactly
  }
  // degenerate pair reduces every inequality to 0 vs 0
  const double xi = 0.37;
  CHECK(signed_pow(xi, 2.3) - signed_pow(xi, 2.3) == 0.0);
}
