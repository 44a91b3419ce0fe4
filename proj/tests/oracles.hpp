#pragma once

// Test-side oracles, kept independent of the library's quadrature paths.

#include <cmath>
#include <functional>

namespace oracle {

inline double composite_simpson(const std::function<double(double)>& f, double lo,
                                double hi, int n_panels) {
  double acc = 0.0;
  const double h = (hi - lo) / n_panels;
  for (int k = 0; k < n_panels; ++k) {
    const double a = lo + k * h, b = a + h;
    acc += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  return acc;
}

// integral of (sin theta)^p over [lo,hi] with geometric panels toward the
// singular endpoints 0 and pi
inline double sin_pow_integral(double lo, double hi, double p) {
  auto f = [p](double th) { return std::pow(std::sin(th), p); };
  double total = 0.0;
  auto graded = [&](double a, double b, bool toward_a) {
    // 60 geometrically shrinking panels toward the singular end, then the
    // analytic theta^p leading term for the last sliver
    const int m = 60;
    double ratio = std::pow(1e-12, 1.0 / m);
    double prev = toward_a ? b : a;
    double frac = 1.0;
    for (int k = 0; k < m; ++k) {
      frac = std::pow(ratio, k + 1);
      const double cut = toward_a ? a + (b - a) * frac : b - (b - a) * frac;
      if (toward_a)
        total += composite_simpson(f, cut, prev, 64), prev = cut;
      else
        total += composite_simpson(f, prev, cut, 64), prev = cut;
    }
    const double sliver = (b - a) * frac + (toward_a ? a : M_PI - b);
    total += std::pow(sliver, 1.0 + p) / (1.0 + p);
  };
  const double mid = 0.5 * M_PI;
  if (lo < mid && hi <= mid) {
    if (lo < 1e-12)
      graded(lo, hi, true);
    else
      total += composite_simpson(f, lo, hi, 4096);
    return total;
  }
  if (lo >= mid) {
    if (hi > M_PI - 1e-12)
      graded(lo, hi, false);
    else
      total += composite_simpson(f, lo, hi, 4096);
    return total;
  }
  return sin_pow_integral(lo, mid, p) + sin_pow_integral(mid, hi, p);
}

// normalized Fourier transform Phi(zeta) of (1+x^2)^{-(1+2s)/2} at n = 1:
// truncated oscillatory quadrature plus a two-term integration-by-parts tail
inline double phi_fourier(double s, double zeta) {
  const double p = 0.5 * (1.0 + 2.0 * s);
  auto f = [p](double x) { return std::pow(1.0 + x * x, -p); };
  auto fp = [p](double x) { return -2.0 * p * x * std::pow(1.0 + x * x, -p - 1.0); };
  const double X = 400.0;
  auto integrand = [&](double x) { return f(x) * std::cos(zeta * x); };
  double val = composite_simpson(integrand, 0.0, X, 120000);
  // int_X^inf f cos = -f(X) sin(zX)/z - f'(X) cos(zX)/z^2 - O(f''/z^2)
  val += -f(X) * std::sin(zeta * X) / zeta - fp(X) * std::cos(zeta * X) / (zeta * zeta);
  const double denom = composite_simpson(f, 0.0, X, 120000) + f(X) * X / (2.0 * p - 1.0);
  return val / denom;
}

}  // namespace oracle
