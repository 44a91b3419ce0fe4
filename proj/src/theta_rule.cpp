#include "fracseg/theta_rule.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fracseg/quadrature.hpp"

namespace fracseg {

double ThetaRule::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

TridiagEigen tridiag_smallest(const std::vector<double>& diag,
                              const std::vector<double>& offdiag, int n_pairs,
                              bool want_vectors) {
  const int n = static_cast<int>(diag.size());
  if (n < 1 || static_cast<int>(offdiag.size()) != n - 1)
    throw std::invalid_argument("tridiag_smallest: size mismatch");
  n_pairs = std::min(n_pairs, n);
  std::vector<double> d(diag), e(offdiag);
  e.resize(n, 0.0);
  std::vector<double> w(n), z;
  std::vector<lapack_int> isuppz(2 * std::max(1, n_pairs));
  lapack_int m = 0;
  lapack_int info;
  if (want_vectors) {
    z.resize(static_cast<size_t>(n) * n_pairs);
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1,
                          n_pairs, 0.0, &m, w.data(), z.data(), n, isuppz.data());
  } else {
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', n, d.data(), e.data(), 0.0, 0.0, 1,
                          n_pairs, 0.0, &m, w.data(), nullptr, n, isuppz.data());
  }
  if (info != 0 || m < n_pairs)
    throw std::runtime_error("tridiag_smallest: eigensolver failed, info=" +
                             std::to_string(info) + " found=" + std::to_string(m));
  TridiagEigen out;
  out.values.assign(w.begin(), w.begin() + n_pairs);
  if (want_vectors) {
    out.vectors.resize(n_pairs);
    for (int k = 0; k < n_pairs; ++k)
      out.vectors[k].assign(z.begin() + static_cast<size_t>(k) * n,
                            z.begin() + static_cast<size_t>(k + 1) * n);
  }
  return out;
}

std::vector<double> tridiag_all_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& offdiag) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> d(diag), e(offdiag);
  e.resize(n, 0.0);
  std::vector<double> w(n);
  std::vector<lapack_int> isuppz(2 * n);
  lapack_int m = 0;
  lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'A', n, d.data(), e.data(), 0.0,
                                   0.0, 0, 0, 0.0, &m, w.data(), nullptr, n, isuppz.data());
  if (info != 0 || m != n)
    throw std::runtime_error("tridiag_all_eigenvalues: eigensolver failed");
  return w;
}

namespace {

// Monic Jacobi recurrence coefficients beta_k for alpha = beta = g (symmetric
// weight (1-x^2)^g on [-1,1]); the diagonal terms are all zero.
double jacobi_beta(int k, double g) {
  if (k == 1) return 1.0 / (2.0 * g + 3.0);
  const double s2 = 2.0 * g;  // alpha + beta
  const double num = 4.0 * k * (k + g) * (k + g) * (k + s2);
  const double den = (2.0 * k + s2) * (2.0 * k + s2) * (2.0 * k + s2 + 1.0) *
                     (2.0 * k + s2 - 1.0);
  return num / den;
}

}  // namespace

ThetaRule make_theta_rule(int n, double a) {
  if (n < 1) throw std::invalid_argument("make_theta_rule: n >= 1 required");
  if (!(a > -1.0 && a < 1.0))
    throw std::domain_error("make_theta_rule: weight exponent must lie in (-1,1)");

  const double g = 0.5 * (a - 1.0);
  const double mu0 = total_sin_pow(a);  // = 2^{2g+1} B(g+1,g+1)

  std::vector<double> diag(n, 0.0), off(n - 1);
  std::vector<double> beta(n);  // beta[k] for k = 1..n-1 used in recurrences
  for (int k = 1; k < n; ++k) {
    beta[k] = jacobi_beta(k, g);
    off[k - 1] = std::sqrt(beta[k]);
  }
  std::vector<double> x = tridiag_all_eigenvalues(diag, off);
  std::sort(x.begin(), x.end());

  // Enforce exact mirror symmetry of the node set.
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -v;
    x[n - 1 - i] = v;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  // Weights from the Christoffel function: w_j = 1 / sum_k p_k(x_j)^2 with
  // orthonormal p_k; equals the Gauss weight at a Gauss node.
  std::vector<double> wq(n);
  for (int j = 0; j < n; ++j) {
    const double xj = x[j];
    double pm = 0.0, pk = 1.0 / std::sqrt(mu0);
    double sum = pk * pk;
    for (int k = 1; k < n; ++k) {
      const double pn = (xj * pk - (k > 1 ? std::sqrt(beta[k - 1]) : 0.0) * pm) /
                        std::sqrt(beta[k]);
      pm = pk;
      pk = pn;
      sum += pk * pk;
    }
    wq[j] = 1.0 / sum;
  }
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (wq[i] + wq[n - 1 - i]);
    wq[i] = wq[n - 1 - i] = v;
  }

  ThetaRule rule;
  rule.a = a;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // x descending in theta: theta_j = acos(x_{n-1-j}) is increasing
  for (int j = 0; j < n; ++j) {
    rule.nodes[j] = std::acos(x[n - 1 - j]);
    rule.weights[j] = wq[n - 1 - j];
  }
  for (int i = 0; i < n / 2; ++i)  // acos round-off symmetrization
    rule.nodes[n - 1 - i] = M_PI - rule.nodes[i];
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5 * M_PI;
  return rule;
}

}  // namespace fracseg
