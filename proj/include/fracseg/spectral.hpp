#pragma once

#include <span>
#include <vector>

#include "fracseg/field.hpp"
#include "fracseg/params.hpp"
#include "fracseg/theta_rule.hpp"

namespace fracseg {

enum class ThetaBC {
  mixed,      // zero weighted trace at 0, psi(pi) = 0
  dirichlet,  // psi = 0 at both ends of a subinterval
  cone        // Dirichlet on (-eps, eps) with the even weight |sin theta|^a
};

// Eigenpairs of -L_theta^a, orthonormal in the (sin theta)^a inner product.
struct EigenSet {
  std::vector<double> lambda;                // ascending
  std::vector<std::vector<double>> psi;      // sampled on rule.nodes
  ThetaRule rule;
  ThetaBC bc = ThetaBC::mixed;

  // weighted Rayleigh quotient of mode k recomputed from the stencil
  double rayleigh(int k) const;

 private:
  friend EigenSet solve_mixed_eigen(FracParam, int, int);
  std::vector<double> stiff_diag_, stiff_off_;  // kept for rayleigh()
};

// First n_modes eigenpairs of -L_theta^a psi = lambda psi on (0, pi) with
// d_theta^a psi(0) = 0 and psi(pi) = 0. lambda_1 -> s(1-s) under refinement.
EigenSet solve_mixed_eigen(FracParam par, int n_modes, int n_theta = 2048);

// Positive root d of d(d+a) = lambda_min(-eps, eps) with zero boundary data
// and the even weight |sin theta|^a.
double cone_exponent(double eps, FracParam par, int n_nodes = 2048);

// Smallest Rayleigh quotient on (pi-h, pi) with Dirichlet data; scales like
// c/h^2 as h -> 0.
double poincare_constant(double h, FracParam par, int n_nodes = 2048);

enum class HomogeneousBranch { segregated, degenerate };

// The exact homogeneous pairs: (r^s cos^{2s}(theta/2), r^s sin^{2s}(theta/2))
// or, for s > 1/2, (r^{2s-1}, 0).
FieldPair exact_homogeneous_pair(FracParam par, HomogeneousBranch branch, GridPtr grid);

// weighted inner product of two node arrays by the rule
double project_mode(std::span<const double> f, std::span<const double> mode,
                    const ThetaRule& rule);

// closed angular profiles
double cos_half_pow(double theta, double s);  // (cos(theta/2))^{2s}
double sin_half_pow(double theta, double s);  // (sin(theta/2))^{2s}

}  // namespace fracseg
