#include <doctest.h>

#include <cmath>

#include "fracseg/kernels.hpp"
#include "oracles.hpp"

using namespace fracseg;

TEST_CASE("Poisson kernel values and normalization") {
  // n = 1, s = 1/2: the classical half-plane kernel (1/pi) y/(x^2+y^2)
  const KernelEval ev = make_kernel_eval(1, make_params(0.5));
  CHECK(poisson_kernel({0.0}, 1.0, ev) == doctest::Approx(1.0 / M_PI).epsilon(1e-13));
  CHECK(poisson_kernel({1.0}, 2.0, ev) ==
        doctest::Approx((1.0 / M_PI) * 2.0 / 5.0).epsilon(1e-13));
  CHECK_THROWS_AS(poisson_kernel({0.0}, 0.0, ev), std::domain_error);
  CHECK_THROWS_AS(poisson_kernel({0.0, 1.0}, 1.0, ev), std::invalid_argument);

  // unit mass at several heights, several exponents, and n = 2
  for (double s : {0.3, 0.5, 0.75}) {
    const KernelEval e1 = make_kernel_eval(1, make_params(s));
    for (double y : {0.5, 1.0, 2.0})
      CHECK(kernel_mass(y, e1) == doctest::Approx(1.0).epsilon(1e-8));
  }
  const KernelEval e2 = make_kernel_eval(2, make_params(0.4));
  CHECK(kernel_mass(1.0, e2) == doctest::Approx(1.0).epsilon(1e-8));

  // pointwise ratio identity P(x,y)/P(0,y) = (1+|x|^2/y^2)^{-(n+2s)/2}
  const KernelEval e3 = make_kernel_eval(1, make_params(0.7));
  for (double x : {0.3, 1.1, 4.0})
    for (double y : {0.6, 1.7}) {
      const double want = std::pow(1.0 + x * x / (y * y), -0.5 * (1.0 + 2.0 * 0.7));
      CHECK(poisson_kernel({x}, y, e3) / poisson_kernel({0.0}, y, e3) ==
            doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("Poisson extension: constants, indicator closed form, positivity") {
  // g = 1: extension approaches 1 once the window holds the kernel mass
  {
    const KernelEval ev = make_kernel_eval(1, make_params(0.75));
    const double X = 10000.0;
    const int n = 1000001;
    std::vector<double> g(n, 1.0);
    PoissonExtension ext(g, -X, X, ev);
    ext.require_tail_mass(-1.0, 1.0, 0.5, 1.0);
    for (double y : {0.5, 1.0})
      for (double x : {0.0, 0.7})
        CHECK(ext.value(x, y) == doctest::Approx(1.0).epsilon(2e-6));
  }
  // indicator of [-1,1] at (0,1), s = 1/2: (1/pi) int_{-1}^{1} dx/(x^2+1) = 1/2
  {
    const KernelEval ev = make_kernel_eval(1, make_params(0.5));
    std::vector<double> g(2001, 1.0);
    PoissonExtension ext(g, -1.0, 1.0, ev);
    CHECK(ext.value(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
    // nonnegate data gives a nonnegative extension
    for (double x : {-3.0, -0.4, 0.9, 2.5})
      for (double y : {0.2, 1.0, 3.0}) CHECK(ext.value(x, y) >= 0.0);
    // a window that misses kernel mass for far evaluation points is rejected
    CHECK_THROWS_AS(ext.require_tail_mass(-50.0, 50.0, 0.5, 1.0), std::runtime_error);
  }
  // negative data is rejected
  const KernelEval ev = make_kernel_eval(1, make_params(0.5));
  std::vector<double> bad(10, -1.0);
  CHECK_THROWS_AS(PoissonExtension(bad, -1.0, 1.0, ev), std::domain_error);
}

TEST_CASE("Phi solution of the kernel ODE") {
  for (double s : {0.3, 0.5, 0.75}) {
    const FracParam par = make_params(s);
    PhiSolution phi = solve_phi(par, 12.0);
    CHECK(phi.phi.front() < 1.0 + 1e-6);
    CHECK(phi.phi.back() < 1e-3);
    for (size_t k = 0; k + 1 < phi.phi.size(); ++k) {
      CHECK(phi.phi[k] > 0.0);
      CHECK(phi.phi[k + 1] < phi.phi[k]);
    }
  }
  // s = 1/2 has the closed form e^{-t}
  PhiSolution p5 = solve_phi(make_params(0.5), 12.0);
  for (double t : {0.5, 1.0, 2.0, 5.0})
    CHECK(p5.at(t) == doctest::Approx(std::exp(-t)).epsilon(1e-9));
  CHECK_THROWS_AS(solve_phi(make_params(0.5), 5.0), std::invalid_argument);

  // Fourier-integral oracle at n = 1
  for (double s : {0.3, 0.75}) {
    PhiSolution phi = solve_phi(make_params(s), 12.0);
    for (double z : {0.5, 1.0, 2.0})
      CHECK(phi.at(z) == doctest::Approx(oracle::phi_fourier(s, z)).epsilon(1e-5));
  }
}

TEST_CASE("hyperbolic distance") {
  CHECK(hyperbolic_distance(0.3, 1.2, 0.3, 1.2) == 0.0);
  CHECK(std::abs(hyperbolic_distance(0.0, 1.0, 0.0, std::exp(1.0)) - 1.0) <= 1e-12);
  // symmetry on scattered pairs
  const double pts[][4] = {{0, 1, 2, 3}, {-1, 0.2, 4, 0.01}, {2, 5, -3, 0.4}};
  for (auto& p : pts)
    CHECK(hyperbolic_distance(p[0], p[1], p[2], p[3]) ==
          doctest::Approx(hyperbolic_distance(p[2], p[3], p[0], p[1])).epsilon(1e-14));
  CHECK_THROWS_AS(hyperbolic_distance(0, -1, 0, 1), std::domain_error);
}

TEST_CASE("Harnack certificate: constants vanish for constants, stable otherwise") {
  const KernelEval ev = make_kernel_eval(1, make_params(0.75));
  // constant field via wide g = 1 window
  {
    std::vector<double> g(500001, 1.0);
    PoissonExtension ext(g, -10000.0, 10000.0, ev);
    HarnackOptions opt;
    opt.n_pairs = 10;
    opt.n_centers = 2;
    opt.n_ball_samples = 12;
    HarnackCertificate c = harnack_certificate(ext, Rect{-1, 1, 0.5, 1.0}, opt);
    CHECK(c.yau_sup <= 1e-4);
    CHECK(c.harnack_log_sup <= 1e-4);
    CHECK(c.cor22_sup_ratio == doctest::Approx(1.0).epsilon(1e-4));
  }
  // indicator extension: refinement-stable suprema
  {
    const KernelEval e5 = make_kernel_eval(1, make_params(0.5));
    std::vector<double> g1(2001, 1.0), g2(4001, 1.0);
    PoissonExtension x1(g1, -1.0, 1.0, e5), x2(g2, -1.0, 1.0, e5);
    HarnackOptions o1;
    HarnackOptions o2;
    o2.fd_step = 0.5 * o1.fd_step;
    HarnackCertificate c1 = harnack_certificate(x1, Rect{-1.5, 1.5, 0.3, 1.2}, o1);
    HarnackCertificate c2 = harnack_certificate(x2, Rect{-1.5, 1.5, 0.3, 1.2}, o2);
    CHECK(std::isfinite(c1.yau_sup));
    CHECK(std::abs(c1.yau_sup - c2.yau_sup) <= 0.1 * c2.yau_sup);
    CHECK(std::abs(c1.harnack_log_sup - c2.harnack_log_sup) <= 0.1 * c2.harnack_log_sup);
    CHECK(std::abs(c1.cor22_sup_ratio - c2.cor22_sup_ratio) <= 0.1 * c2.cor22_sup_ratio);
  }
}

TEST_CASE("appendix lemma checks") {
  for (double s : {0.5, 0.75}) {
    const AppendixReport rep = appendix_checks(make_params(s));
    CHECK(rep.a1_constant_ok);
    CHECK(rep.a1_quadratic_ok);
    CHECK(rep.a2_stable_ok);
    const double ratio = rep.a3_sup_m10 / rep.a3_sup_m100;
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
    CHECK(rep.pass());
  }
}
