#include "fracseg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace fracseg {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol, int max_depth) {
  if (lo == hi) return 0.0;
  const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, max_depth);
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton from the Chebyshev-like initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace {

// integral over [0,c] of theta^p * h(theta), c <= pi/2, via theta = tau^kappa
// with kappa = 2/(1+p); the transformed integrand is kappa * tau * h(tau^kappa).
double endpoint_piece(const std::function<double(double)>& h, double c, double p,
                      double tol) {
  const double kappa = 2.0 / (1.0 + p);
  const double tau_hi = std::pow(c, 1.0 / kappa);
  auto g = [&](double tau) {
    const double theta = std::pow(tau, kappa);
    return kappa * tau * h(theta);
  };
  return adaptive_simpson(g, 0.0, tau_hi, tol);
}

}  // namespace

double integral_sin_pow_weighted(const std::function<double(double)>& g, double lo,
                                 double hi, double p, double tol) {
  if (p <= -1.0) throw std::domain_error("integral_sin_pow: exponent <= -1 not integrable");
  if (lo < -1e-14 || hi > M_PI + 1e-14 || lo > hi)
    throw std::domain_error("integral_sin_pow: interval outside [0,pi]");
  lo = std::max(lo, 0.0);
  hi = std::min(hi, M_PI);
  if (lo >= hi) return 0.0;

  double total = 0.0;
  const double cut = 0.5;  // detach endpoint neighbourhoods
  double a = lo, b = hi;

  if (a < 1e-30 && p != 0.0) {
    const double c = std::min(b, cut);
    // (sin t)^p = t^p * (sin t / t)^p with a smooth second factor
    auto h = [&](double t) {
      const double ratio = (t == 0.0) ? 1.0 : std::sin(t) / t;
      return std::pow(ratio, p) * g(t);
    };
    total += endpoint_piece(h, c, p, tol);
    a = c;
  }
  if (b > M_PI - 1e-30 && p != 0.0 && a < b) {
    const double c = std::min(M_PI - a, cut);
    auto h = [&](double t) {  // t = pi - theta
      const double ratio = (t == 0.0) ? 1.0 : std::sin(t) / t;
      return std::pow(ratio, p) * g(M_PI - t);
    };
    total += endpoint_piece(h, c, p, tol);
    b = M_PI - c;
  }
  if (a < b) {
    auto f = [&](double t) { return std::pow(std::sin(t), p) * g(t); };
    total += adaptive_simpson(f, a, b, tol);
  }
  return total;
}

double integral_sin_pow(double lo, double hi, double p, double tol) {
  return integral_sin_pow_weighted([](double) { return 1.0; }, lo, hi, p, tol);
}

double total_sin_pow(double p) {
  if (p <= -1.0) throw std::domain_error("total_sin_pow: exponent <= -1 not integrable");
  return std::sqrt(M_PI) *
         std::exp(std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * p + 1.0));
}

}  // namespace fracseg
