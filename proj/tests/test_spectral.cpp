#include <doctest.h>

#include <cmath>

#include "fracseg/spectral.hpp"

using namespace fracseg;

TEST_CASE("lambda_1 = s(1-s) at reference resolution") {
  for (double s : {0.3, 0.5, 0.75}) {
    const FracParam par = make_params(s);
    EigenSet set = solve_mixed_eigen(par, 2, 2048);
    CHECK(std::abs(set.lambda[0] - s * (1.0 - s)) <= 1e-6);
    // second eigenvalue of the mixed problem: (s+1)(2-s)
    CHECK(std::abs(set.lambda[1] - (s + 1.0) * (2.0 - s)) <= 2e-5);
  }
}

TEST_CASE("ground mode shape and sign structure") {
  const FracParam par = make_params(0.6);
  EigenSet set = solve_mixed_eigen(par, 3, 1025);  // odd count puts a node at pi/2
  const int n = set.rule.size();
  for (int j = 0; j < n; ++j) CHECK(set.psi[0][j] > 0.0);
  int flips = 0;
  for (int j = 1; j < n; ++j)
    if (set.psi[1][j] * set.psi[1][j - 1] < 0.0) ++flips;
  CHECK(flips == 1);

  // psi1(theta)/psi1(theta0) matches (cos(theta/2))^{2s} ratios
  const int mid = n / 2;
  CHECK(set.rule.nodes[mid] == doctest::Approx(M_PI / 2).epsilon(1e-14));
  const double want = cos_half_pow(set.rule.nodes[mid], par.s) /
                      cos_half_pow(set.rule.nodes[0], par.s);
  CHECK(set.psi[0][mid] / set.psi[0][0] == doctest::Approx(want).epsilon(1e-5));
  // and the ratio against the trace value at 0 tends to 2^{-s}
  const double ratio0 = set.psi[0][mid] / (set.psi[0][0] /
                        cos_half_pow(set.rule.nodes[0], par.s));
  CHECK(ratio0 == doctest::Approx(std::pow(2.0, -par.s)).epsilon(1e-5));
}

TEST_CASE("orthonormality and Rayleigh consistency") {
  const FracParam par = make_params(0.42);
  EigenSet set = solve_mixed_eigen(par, 4, 512);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l <= k; ++l) {
      const double ip = project_mode(set.psi[k], set.psi[l], set.rule);
      CHECK(std::abs(ip - (k == l ? 1.0 : 0.0)) <= 1e-8);
    }
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(set.rayleigh(k) - set.lambda[k]) <=
          1e-10 * std::max(1.0, set.lambda[k]));
}

TEST_CASE("project_mode closed-form integral") {
  // a = 0, mode = cos(theta/2): int_0^pi cos(theta/2) dtheta = 2
  const FracParam par = make_params(0.5);
  const ThetaRule rule = make_theta_rule(512, par.a);
  std::vector<double> ones(rule.size(), 1.0), mode(rule.size());
  for (int j = 0; j < rule.size(); ++j) mode[j] = cos_half_pow(rule.nodes[j], 0.5);
  CHECK(project_mode(ones, mode, rule) == doctest::Approx(2.0).epsilon(1e-6));
  std::vector<double> bad(rule.size() - 1, 1.0);
  CHECK_THROWS_AS(project_mode(bad, mode, rule), std::invalid_argument);
}

TEST_CASE("cone exponent: closed form, monotonicity, d > s") {
  const FracParam half = make_params(0.5);  // a = 0
  const double d = cone_exponent(M_PI / 8, half, 4096);
  CHECK(d == doctest::Approx(4.0).epsilon(2e-4));

  const FracParam par = make_params(0.75);
  double prev = 1e300;
  for (double eps : {0.10, 0.18, 0.30, 0.55, 0.75}) {
    const double dk = cone_exponent(eps, par, 1024);
    CHECK(dk < prev);
    prev = dk;
  }
  CHECK(cone_exponent(0.05, par, 1024) > par.s);
  CHECK_THROWS_AS(cone_exponent(1.0, par), std::domain_error);
}

TEST_CASE("poincare constant: closed form and h^-2 scaling") {
  const FracParam half = make_params(0.5);
  CHECK(poincare_constant(M_PI / 4, half, 4096) == doctest::Approx(16.0).epsilon(2e-4));

  const FracParam par = make_params(0.35);
  double prev = 0.0;
  double cmin = 1e300, cmax = 0.0;
  for (double h : {0.5, 0.35, 0.2, 0.1, 0.05}) {
    const double lam = poincare_constant(h, par, 2048);
    CHECK(lam > prev);  // increasing as h decreases
    prev = lam;
    cmin = std::min(cmin, lam * h * h);
    cmax = std::max(cmax, lam * h * h);
  }
  CHECK(cmin > 0.0);
  // the scaled constant stays within a modest band across h
  CHECK(cmax / cmin < 3.0);
  // and is stable under refinement
  const double c1 = poincare_constant(0.2, par, 2048) * 0.04;
  const double c2 = poincare_constant(0.2, par, 4096) * 0.04;
  CHECK(c1 == doctest::Approx(c2).epsilon(1e-3));
}

TEST_CASE("exact homogeneous pairs") {
  const FracParam par = make_params(0.6);
  GridPtr g = build_grid(-1.0, 1.0, 17, 65, par);  // node at t = 0, theta = pi/2
  FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  const int i0 = 8;
  CHECK(g->t_node(i0) == doctest::Approx(0.0).epsilon(1e-14));
  for (int i = 0; i < g->n_t(); ++i) {
    CHECK(pair.u.trace0(i) ==
          doctest::Approx(std::exp(par.s * g->t_node(i))).epsilon(1e-14));
    CHECK(pair.v.trace0(i) == 0.0);
    CHECK(pair.u.trace_pi(i) == 0.0);
  }
  const int jm = g->n_theta() / 2;
  CHECK(g->theta_node(jm) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(pair.u.interior(i0, jm) == doctest::Approx(std::pow(2.0, -par.s)).epsilon(1e-13));
  CHECK(pair.v.interior(i0, jm) == doctest::Approx(std::pow(2.0, -par.s)).epsilon(1e-13));

  const FracParam p75 = make_params(0.75);
  GridPtr g75 = build_grid(-1.0, 1.0, 17, 65, p75);
  FieldPair deg = exact_homogeneous_pair(p75, HomogeneousBranch::degenerate, g75);
  for (int i = 0; i < g75->n_t(); ++i)
    CHECK(deg.u.interior(i, 3) ==
          doctest::Approx(std::exp(0.5 * g75->t_node(i))).epsilon(1e-14));
  CHECK(deg.v.max_abs() == 0.0);
  CHECK_THROWS_AS(exact_homogeneous_pair(make_params(0.5), HomogeneousBranch::degenerate, g),
                  std::domain_error);
}
