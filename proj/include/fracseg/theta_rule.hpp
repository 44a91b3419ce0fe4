#pragma once

#include <vector>

namespace fracseg {

// Quadrature rule for integral_0^pi f(theta) (sin theta)^a dtheta, exact for f
// polynomial in cos(theta) up to degree 2n-1 (Gauss-Jacobi in x = cos theta
// with ultraspherical exponent (a-1)/2). Nodes are symmetric about pi/2.
struct ThetaRule {
  std::vector<double> nodes;    // strictly increasing in (0,pi)
  std::vector<double> weights;  // positive
  double a = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
  double total_weight() const;
};

ThetaRule make_theta_rule(int n, double a);

// Symmetric tridiagonal eigen helper shared with the spectral module: first
// `n_pairs` eigenvalues (ascending) and, when requested, eigenvectors of
// tridiag(offdiag, diag, offdiag).
struct TridiagEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  // empty when not requested
};
TridiagEigen tridiag_smallest(const std::vector<double>& diag,
                              const std::vector<double>& offdiag, int n_pairs,
                              bool want_vectors);
std::vector<double> tridiag_all_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& offdiag);

}  // namespace fracseg
