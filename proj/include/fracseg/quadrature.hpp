#pragma once

#include <functional>
#include <vector>

namespace fracseg {

// Adaptive Simpson on [lo,hi]. The integrand must be finite on the closed
// interval; singular endpoints are handled by the sin_pow helpers below.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol = 1e-12, int max_depth = 48);

// Gauss-Legendre rule on [-1,1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

// integral of (sin theta)^p over [lo,hi] in [0,pi], p in (-1,inf).
// Endpoint singularities (p<0) and fractional-power endpoints are removed by
// the substitution theta = tau^{2/(1+p)} before quadrature.
double integral_sin_pow(double lo, double hi, double p, double tol = 1e-13);

// integral of (sin theta)^p * g(theta) over [lo,hi] in [0,pi], same handling.
double integral_sin_pow_weighted(const std::function<double(double)>& g, double lo,
                                 double hi, double p, double tol = 1e-12);

// closed form of integral_0^pi (sin theta)^p dtheta = sqrt(pi)*G((p+1)/2)/G(p/2+1)
double total_sin_pow(double p);

}  // namespace fracseg
