#include "fracseg/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "fracseg/la_operator.hpp"
#include "fracseg/quadrature.hpp"

namespace fracseg {

double cos_half_pow(double theta, double s) {
  if (theta >= M_PI) return 0.0;
  if (theta <= 0.0) return 1.0;
  return std::pow(std::cos(0.5 * theta), 2.0 * s);
}

double sin_half_pow(double theta, double s) {
  if (theta <= 0.0) return 0.0;
  if (theta >= M_PI) return 1.0;
  return std::pow(std::sin(0.5 * theta), 2.0 * s);
}

double project_mode(std::span<const double> f, std::span<const double> mode,
                    const ThetaRule& rule) {
  if (f.size() != mode.size() || static_cast<int>(f.size()) != rule.size())
    throw std::invalid_argument("project_mode: length mismatch");
  double acc = 0.0;
  for (int j = 0; j < rule.size(); ++j) acc += rule.weights[j] * f[j] * mode[j];
  return acc;
}

double EigenSet::rayleigh(int k) const {
  const auto& v = psi[k];
  const int n = rule.size();
  double num = stiff_diag_[0] * v[0] * v[0];
  for (int j = 1; j < n; ++j) {
    num += stiff_diag_[j] * v[j] * v[j];
    num += 2.0 * stiff_off_[j - 1] * v[j] * v[j - 1];
  }
  double den = 0.0;
  for (int j = 0; j < n; ++j) den += rule.weights[j] * v[j] * v[j];
  return num / den;
}

namespace {

struct Interval1D {
  std::vector<double> nodes;    // strictly increasing in the open interval
  std::vector<double> masses;   // cell masses of the weight
  std::vector<double> trans;    // n+1 face transmissibilities
};

// generalized eigenproblem K psi = lambda M psi -> symmetric tridiagonal
TridiagEigen interval_eigen(const Interval1D& iv, bool left_flux, bool right_flux,
                            int n_modes, bool want_vectors) {
  const int n = static_cast<int>(iv.nodes.size());
  std::vector<double> diag(n), off(n - 1);
  for (int j = 0; j < n; ++j) {
    double d = 0.0;
    if (j > 0 || left_flux) d += iv.trans[j];
    if (j < n - 1 || right_flux) d += iv.trans[j + 1];
    diag[j] = d / iv.masses[j];
  }
  for (int j = 0; j + 1 < n; ++j)
    off[j] = -iv.trans[j + 1] / std::sqrt(iv.masses[j] * iv.masses[j + 1]);
  TridiagEigen eig = tridiag_smallest(diag, off, n_modes, want_vectors);
  if (want_vectors) {
    for (auto& vec : eig.vectors)
      for (int j = 0; j < n; ++j) vec[j] /= std::sqrt(iv.masses[j]);
  }
  return eig;
}

}  // namespace

EigenSet solve_mixed_eigen(FracParam par, int n_modes, int n_theta) {
  if (n_modes < 1) throw std::invalid_argument("solve_mixed_eigen: n_modes >= 1");
  EigenSet set;
  set.bc = ThetaBC::mixed;
  set.rule = make_theta_rule(n_theta, par.a);
  const int n = n_theta;

  Interval1D iv;
  iv.nodes = set.rule.nodes;
  iv.masses = set.rule.weights;
  iv.trans.resize(n + 1);
  iv.trans[0] = 0.0;  // unused: zero weighted trace at theta = 0
  for (int j = 1; j < n; ++j)
    iv.trans[j] = theta_transmissibility(iv.nodes[j - 1], iv.nodes[j], par.a);
  iv.trans[n] = theta_transmissibility(iv.nodes[n - 1], M_PI, par.a);

  TridiagEigen eig = interval_eigen(iv, /*left_flux=*/false, /*right_flux=*/true,
                                    n_modes, /*want_vectors=*/true);
  set.lambda = eig.values;
  set.psi = std::move(eig.vectors);

  // normalize in the weighted L2 and fix the sign at theta -> 0
  for (auto& v : set.psi) {
    double nrm2 = 0.0;
    for (int j = 0; j < n; ++j) nrm2 += set.rule.weights[j] * v[j] * v[j];
    double scale = 1.0 / std::sqrt(nrm2);
    if (v[0] < 0.0) scale = -scale;
    for (double& x : v) x *= scale;
  }
  if (set.psi[0][0] <= 0.0)
    throw std::runtime_error("solve_mixed_eigen: ground mode not positive");
  for (int j = 0; j < n; ++j)
    if (set.psi[0][j] <= 0.0)
      throw std::runtime_error("solve_mixed_eigen: ground mode changes sign");

  set.stiff_diag_.resize(n);
  set.stiff_off_.resize(n - 1);
  for (int j = 0; j < n; ++j)
    set.stiff_diag_[j] = (j > 0 ? iv.trans[j] : 0.0) + iv.trans[j + 1];
  for (int j = 0; j + 1 < n; ++j) set.stiff_off_[j] = -iv.trans[j + 1];
  return set;
}

namespace {

// uniform Dirichlet-Dirichlet eigenvalue of -(w^a psi')'/w^a on (lo,hi) where
// the weight is |sin theta|^a (even across 0 for the cone problem)
double dirichlet_lambda_min(double lo, double hi, double a, int n_nodes) {
  const int n = n_nodes;
  const double h = (hi - lo) / (n + 1);
  Interval1D iv;
  iv.nodes.resize(n);
  for (int j = 0; j < n; ++j) iv.nodes[j] = lo + (j + 1) * h;
  auto wint = [&](double x0, double x1, double p) {
    // integral of |sin|^p over [x0,x1], splitting at 0 for the even weight
    if (x0 >= 0.0) return integral_sin_pow(x0, x1, p);
    if (x1 <= 0.0) return integral_sin_pow(-x1, -x0, p);
    return integral_sin_pow(0.0, -x0, p) + integral_sin_pow(0.0, x1, p);
  };
  iv.masses.resize(n);
  iv.trans.resize(n + 1);
  for (int j = 0; j < n; ++j)
    iv.masses[j] = wint(iv.nodes[j] - 0.5 * h, iv.nodes[j] + 0.5 * h, a);
  iv.trans[0] = 1.0 / wint(lo, iv.nodes[0], -a);
  for (int j = 1; j < n; ++j) iv.trans[j] = 1.0 / wint(iv.nodes[j - 1], iv.nodes[j], -a);
  iv.trans[n] = 1.0 / wint(iv.nodes[n - 1], hi, -a);
  TridiagEigen eig = interval_eigen(iv, true, true, 1, false);
  return eig.values[0];
}

}  // namespace

double cone_exponent(double eps, FracParam par, int n_nodes) {
  if (!(eps > 0.0 && eps < M_PI / 4.0))
    throw std::domain_error("cone_exponent: eps must lie in (0, pi/4)");
  const double lam = dirichlet_lambda_min(-eps, eps, par.a, n_nodes);
  const double a = par.a;
  return 0.5 * (-a + std::sqrt(a * a + 4.0 * lam));
}

double poincare_constant(double h, FracParam par, int n_nodes) {
  if (!(h > 0.0 && h < M_PI / 2.0))
    throw std::domain_error("poincare_constant: h must lie in (0, pi/2)");
  return dirichlet_lambda_min(M_PI - h, M_PI, par.a, n_nodes);
}

FieldPair exact_homogeneous_pair(FracParam par, HomogeneousBranch branch, GridPtr grid) {
  if (branch == HomogeneousBranch::degenerate && !(par.s > 0.5))
    throw std::domain_error("exact_homogeneous_pair: degenerate branch needs s > 1/2");
  FieldPair pair{LogPolarField(grid), LogPolarField(grid)};
  const double s = par.s;
  if (branch == HomogeneousBranch::segregated) {
    pair.u.sample([s](double t, double th) { return std::exp(s * t) * cos_half_pow(th, s); });
    // v is the exact column mirror of u so the pair is bitwise symmetric
    const auto& g = *grid;
    for (int i = 0; i < g.n_t(); ++i)
      for (int jj = 0; jj < g.n_cols(); ++jj)
        pair.v.at(i, jj) = pair.u.at(i, g.n_cols() - 1 - jj);
  } else {
    const double d = 2.0 * s - 1.0;
    pair.u.sample([d](double t, double) { return std::exp(d * t); });
    // v identically zero
  }
  return pair;
}

}  // namespace fracseg
