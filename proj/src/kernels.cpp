#include "fracseg/kernels.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "fracseg/grid.hpp"
#include "fracseg/la_operator.hpp"
#include "fracseg/quadrature.hpp"

namespace fracseg {

KernelEval make_kernel_eval(int n, FracParam par) {
  if (n < 1) throw std::invalid_argument("make_kernel_eval: n >= 1");
  // integral over R^n of (1+|x|^2)^{-(n+2s)/2} = pi^{n/2} G(s) / G((n+2s)/2)
  const double s = par.s;
  const double mass = std::pow(M_PI, 0.5 * n) *
                      std::exp(std::lgamma(s) - std::lgamma(0.5 * n + s));
  KernelEval ev;
  ev.n = n;
  ev.par = par;
  ev.norm = 1.0 / mass;
  return ev;
}

double poisson_kernel_radial(double rho, double y, const KernelEval& eval) {
  if (!(y > 0.0)) throw std::domain_error("poisson_kernel: y must be positive");
  const double s = eval.par.s;
  const double q = rho * rho + y * y;
  return eval.norm * std::pow(y, 2.0 * s) * std::pow(q, -0.5 * (eval.n + 2.0 * s));
}

double poisson_kernel(const std::vector<double>& x, double y, const KernelEval& eval) {
  if (static_cast<int>(x.size()) != eval.n)
    throw std::invalid_argument("poisson_kernel: point dimension mismatch");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return poisson_kernel_radial(std::sqrt(r2), y, eval);
}

double kernel_mass(double y, const KernelEval& eval, int n_quad) {
  if (!(y > 0.0)) throw std::domain_error("kernel_mass: y must be positive");
  // radial reduction; the tail rho > y maps to rho = y^2/u with an algebraic
  // u^{2s-1} factor that the power substitution u = tau^{1/s} removes
  const int n = eval.n;
  const double s = eval.par.s;
  const double omega = 2.0 * std::pow(M_PI, 0.5 * n) / std::exp(std::lgamma(0.5 * n));
  GaussLegendre gl = gauss_legendre(n_quad);
  double inner = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    const double rho = 0.5 * y * (gl.nodes[k] + 1.0);
    const double w = 0.5 * y * gl.weights[k];
    inner += w * std::pow(rho, n - 1) * poisson_kernel_radial(rho, y, eval);
  }
  // integral_y^inf rho^{n-1} P drho = norm y^n integral_0^y u^{2s-1} (y^2+u^2)^{-p} du
  const double p = 0.5 * (n + 2.0 * s);
  const double tau_hi = std::pow(y, s);
  double outer = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    const double tau = 0.5 * tau_hi * (gl.nodes[k] + 1.0);
    const double w = 0.5 * tau_hi * gl.weights[k];
    const double u = std::pow(tau, 1.0 / s);
    outer += w * (tau / s) * std::pow(y * y + u * u, -p);
  }
  outer *= eval.norm * std::pow(y, n);
  return omega * (inner + outer);
}

double kernel_mass_interval(double lo, double hi, double y, const KernelEval& eval,
                            int n_quad) {
  if (eval.n != 1) throw std::invalid_argument("kernel_mass_interval: n = 1 only");
  if (!(y > 0.0)) throw std::domain_error("kernel_mass_interval: y must be positive");
  // x = y tan(phi) maps the interval to a compact phi-range
  const double p0 = std::atan(lo / y), p1 = std::atan(hi / y);
  GaussLegendre gl = gauss_legendre(n_quad);
  double acc = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    const double phi = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * gl.nodes[k];
    const double w = 0.5 * (p1 - p0) * gl.weights[k];
    const double x = y * std::tan(phi);
    const double jac = y / std::pow(std::cos(phi), 2);
    acc += w * poisson_kernel_radial(std::abs(x), y, eval) * jac;
  }
  return acc;
}

PoissonExtension::PoissonExtension(std::vector<double> g, double x_lo, double x_hi,
                                   KernelEval eval)
    : g_(std::move(g)), x_lo_(x_lo), x_hi_(x_hi), eval_(eval) {
  if (eval_.n != 1) throw std::invalid_argument("PoissonExtension: n = 1 only");
  if (g_.size() < 2 || !(x_hi_ > x_lo_))
    throw std::invalid_argument("PoissonExtension: bad data window");
  for (double v : g_)
    if (v < 0.0) throw std::domain_error("PoissonExtension: data must be nonnegative");
  dx_ = (x_hi_ - x_lo_) / (g_.size() - 1);
}

void PoissonExtension::require_tail_mass(double x0, double x1, double y0,
                                         double y1) const {
  // the worst case over the rectangle is a corner at the lowest height
  double worst = 0.0;
  for (double x : {x0, x1}) {
    const double inside = kernel_mass_interval(x_lo_ - x, x_hi_ - x, y1, eval_);
    (void)y0;
    worst = std::max(worst, 1.0 - inside);
  }
  for (double x : {x0, x1}) {
    const double inside = kernel_mass_interval(x_lo_ - x, x_hi_ - x, y0, eval_);
    worst = std::max(worst, 1.0 - inside);
  }
  if (!(worst < 1e-6))
    throw std::runtime_error("PoissonExtension: kernel tail mass outside the data "
                             "window exceeds 1e-6");
}

double PoissonExtension::value(double x, double y) const {
  if (!(y > 0.0)) throw std::domain_error("PoissonExtension::value: y must be positive");
  double acc = 0.0;
  const int n = static_cast<int>(g_.size());
  for (int k = 0; k < n; ++k) {
    const double xi = x_lo_ + k * dx_;
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    acc += w * g_[k] * poisson_kernel_radial(std::abs(x - xi), y, eval_);
  }
  return acc * dx_;
}

std::vector<std::vector<double>> poisson_extend(const PoissonExtension& ext,
                                                const std::vector<double>& x_eval,
                                                const std::vector<double>& y_levels) {
  std::vector<std::vector<double>> out(y_levels.size(),
                                       std::vector<double>(x_eval.size()));
  for (size_t iy = 0; iy < y_levels.size(); ++iy)
    for (size_t ix = 0; ix < x_eval.size(); ++ix)
      out[iy][ix] = ext.value(x_eval[ix], y_levels[iy]);
  return out;
}

double PhiSolution::at(double tq) const {
  const int n = static_cast<int>(t.size());
  if (tq <= t.front()) return phi.front();
  if (tq >= t.back()) return phi.back();
  const double h = t[1] - t[0];
  int i1 = static_cast<int>(std::floor((tq - t[0]) / h));
  i1 = std::clamp(i1, 0, n - 2);
  const int i0 = std::clamp(i1 - 1, 0, n - 4);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    double l = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m == k) continue;
      l *= (tq - t[i0 + m]) / (t[i0 + k] - t[i0 + m]);
    }
    acc += l * phi[i0 + k];
  }
  return acc;
}

PhiSolution solve_phi(FracParam par, double T_max, double h_ode) {
  if (!(T_max >= 10.0)) throw std::invalid_argument("solve_phi: T_max >= 10 required");
  const double a = par.a;
  const double eps = 0.05;

  // Frobenius starts: regular branch 1 + sum c_k t^{2k}, singular branch
  // t^{1-a} (1 + sum d_k t^{2k})
  auto series = [&](double t, bool regular, double& val, double& der) {
    if (regular) {
      double ck = 1.0, v = 1.0, d = 0.0;
      for (int k = 0; k < 30; ++k) {
        ck /= (2.0 * k + 2.0) * (2.0 * k + 1.0 + a);
        const double p = 2.0 * (k + 1);
        v += ck * std::pow(t, p);
        d += ck * p * std::pow(t, p - 1.0);
        if (ck * std::pow(t, p) < 1e-19) break;
      }
      val = v;
      der = d;
    } else {
      double dk = 1.0, v = 1.0, d0 = 0.0;  // inner series and its derivative
      for (int k = 0; k < 30; ++k) {
        dk /= (2.0 * k + 2.0) * (2.0 * k + 3.0 - a);
        const double p = 2.0 * (k + 1);
        v += dk * std::pow(t, p);
        d0 += dk * p * std::pow(t, p - 1.0);
        if (dk * std::pow(t, p) < 1e-19) break;
      }
      const double tp = std::pow(t, 1.0 - a);
      val = tp * v;
      der = (1.0 - a) * std::pow(t, -a) * v + tp * d0;
    }
  };

  const int n_steps = static_cast<int>(std::ceil((T_max - eps) / h_ode));
  const double h = (T_max - eps) / n_steps;
  std::vector<double> ts(n_steps + 1);
  std::vector<double> R(n_steps + 1), Rp(n_steps + 1), S(n_steps + 1), Sp(n_steps + 1);
  series(eps, true, R[0], Rp[0]);
  series(eps, false, S[0], Sp[0]);
  ts[0] = eps;
  auto rhs = [&](double t, double y, double yp, double& dy, double& dyp) {
    dy = yp;
    dyp = y - (a / t) * yp;
  };
  for (int i = 0; i < n_steps; ++i) {
    const double t0 = eps + i * h;
    ts[i + 1] = t0 + h;
    for (auto pr : {std::pair<double*, double*>{&R[i], &Rp[i]},
                    std::pair<double*, double*>{&S[i], &Sp[i]}}) {
      double y = *pr.first, yp = *pr.second;
      double k1, k1p, k2, k2p, k3, k3p, k4, k4p;
      rhs(t0, y, yp, k1, k1p);
      rhs(t0 + 0.5 * h, y + 0.5 * h * k1, yp + 0.5 * h * k1p, k2, k2p);
      rhs(t0 + 0.5 * h, y + 0.5 * h * k2, yp + 0.5 * h * k2p, k3, k3p);
      rhs(t0 + h, y + h * k3, yp + h * k3p, k4, k4p);
      *(pr.first + 1) = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      *(pr.second + 1) = yp + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
  }
  // decaying combination: Phi ~ t^{-a/2} e^{-t} so Phi'/Phi -> -1 - a/(2t)
  const double rho = 1.0 + 0.5 * a / T_max;
  const double beta = -(Rp[n_steps] + rho * R[n_steps]) / (Sp[n_steps] + rho * S[n_steps]);

  PhiSolution sol;
  sol.a = a;
  sol.t = std::move(ts);
  sol.phi.resize(n_steps + 1);
  sol.dphi.resize(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) {
    sol.phi[i] = R[i] + beta * S[i];
    sol.dphi[i] = Rp[i] + beta * Sp[i];
  }
  for (size_t i = 0; i + 1 < sol.phi.size(); ++i) {
    if (!(sol.phi[i] > 0.0) || sol.phi[i + 1] >= sol.phi[i])
      throw std::runtime_error("solve_phi: matched solution is not positive decreasing");
  }
  return sol;
}

double hyperbolic_distance(double x1, double y1, double x2, double y2) {
  if (!(y1 > 0.0) || !(y2 > 0.0))
    throw std::domain_error("hyperbolic_distance: heights must be positive");
  const double q =
      ((x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2)) / (2.0 * y1 * y2);
  // arccosh(1+q) = log1p(q + sqrt(q (q + 2)))
  return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

HarnackCertificate harnack_certificate(const PoissonExtension& ext, Rect region,
                                       const HarnackOptions& opt) {
  HarnackCertificate cert;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> ux(region.x_lo, region.x_hi);
  std::uniform_real_distribution<double> uy(region.y_lo, region.y_hi);

  // Yau: sup of y |grad u| / u at sampled interior points
  for (int k = 0; k < opt.n_pairs; ++k) {
    const double x = ux(rng), y = uy(rng);
    const double h = opt.fd_step * std::min(1.0, y);
    const double u0 = ext.value(x, y);
    if (!(u0 > 0.0)) throw std::domain_error("harnack_certificate: field not positive");
    const double gx = (ext.value(x + h, y) - ext.value(x - h, y)) / (2.0 * h);
    const double gy = (ext.value(x, y + h) - ext.value(x, y - h)) / (2.0 * h);
    cert.yau_sup = std::max(cert.yau_sup, y * std::hypot(gx, gy) / u0);
  }
  // empirical Yau constant over pairs in the hyperbolic metric
  for (int k = 0; k < opt.n_pairs; ++k) {
    const double xa = ux(rng), ya = uy(rng), xb = ux(rng), yb = uy(rng);
    const double d = hyperbolic_distance(xa, ya, xb, yb);
    if (d < 1e-9) continue;
    const double lr = std::abs(std::log(ext.value(xb, yb) / ext.value(xa, ya)));
    cert.harnack_log_sup = std::max(cert.harnack_log_sup, lr / d);
  }
  // Corollary form: sup/inf over B_{y/2}(x,y) bounded across centers
  for (int c = 0; c < opt.n_centers; ++c) {
    const double x = ux(rng), y = uy(rng);
    double mx = 0.0, mn = 1e300;
    for (int k = 0; k < opt.n_ball_samples; ++k) {
      const double ang = 2.0 * M_PI * k / opt.n_ball_samples;
      const double rad = 0.5 * y * ((k % 3) + 1) / 3.0;
      const double px = x + rad * std::cos(ang), py = y + rad * std::sin(ang);
      const double v = ext.value(px, py);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    cert.cor22_sup_ratio = std::max(cert.cor22_sup_ratio, mx / mn);
  }
  return cert;
}

namespace {

// sphere mean r^{-n-a} int_{|z|=r} |y|^a u dS for n = 1 via the theta rule
double sphere_mean_n1(const ThetaRule& rule, double r,
                      const std::function<double(double, double)>& u_xy) {
  double acc = 0.0;
  for (int j = 0; j < rule.size(); ++j) {
    const double th = rule.nodes[j];
    const double x = r * std::cos(th), y = r * std::sin(th);
    acc += rule.weights[j] * (u_xy(x, y) + u_xy(x, -y));
  }
  return acc;
}

// linear trace-absorption solve for Lemma A.3: L_a v = 0 in the half disk,
// v = 1 on the arc, weighted trace equal to M v on the flat part
double a3_flat_sup(FracParam par, double M, int n_t, int n_theta) {
  GridPtr g = build_grid(-8.0, 0.0, n_t, n_theta, par);
  DiscreteOperator op(g, par.a, 0.0);
  const int cols = g->n_cols(), m = g->n_theta(), nt = g->n_t();
  auto id = [cols](int i, int jj) { return i * cols + jj; };
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nt * cols);
  for (int i = 0; i < nt; ++i) {
    if (i == nt - 1) {
      for (int jj = 0; jj < cols; ++jj) {
        trips.emplace_back(id(i, jj), id(i, jj), 1.0);
        b(id(i, jj)) = 1.0;
      }
      continue;
    }
    for (int j = 0; j < m; ++j) {
      const int jj = j + 1;
      const int r = id(i, jj);
      const double mass = op.t_mass(i) * g->theta_weight(j);
      double diag = 0.0;
      auto link = [&](int ci, int cjj, double w) {
        trips.emplace_back(r, id(ci, cjj), -w);
        diag += w;
      };
      link(i, jj - 1, op.t_mass(i) * op.theta_face(j) / mass);
      link(i, jj + 1, op.t_mass(i) * op.theta_face(j + 1) / mass);
      if (i > 0) link(i - 1, jj, g->theta_weight(j) * op.t_face(i - 1) / mass);
      link(i + 1, jj, g->theta_weight(j) * op.t_face(i) / mass);
      trips.emplace_back(r, r, diag);
    }
    const double c = std::exp((1.0 - par.a) * g->t_node(i)) * M;
    for (int side = 0; side < 2; ++side) {
      const int jb = (side == 0) ? 0 : cols - 1;
      const int jn = (side == 0) ? 1 : cols - 2;
      const double T = (side == 0) ? op.theta_face(0) : op.theta_face(m);
      const int r = id(i, jb);
      trips.emplace_back(r, id(i, jn), T);
      trips.emplace_back(r, id(i, jb), -T - c);
    }
  }
  Eigen::SparseMatrix<double> A(nt * cols, nt * cols);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("appendix_checks: A.3 factorization failed");
  Eigen::VectorXd sol = lu.solve(b);
  double sup = 0.0;
  for (int i = 0; i < nt; ++i) {
    if (g->t_node(i) > -std::log(2.0) + 1e-12) continue;  // flat part up to r = 1/2
    sup = std::max(sup, std::max(sol(id(i, 0)), sol(id(i, cols - 1))));
  }
  return sup;
}

}  // namespace

AppendixReport appendix_checks(FracParam par) {
  AppendixReport rep;
  const ThetaRule rule = make_theta_rule(256, par.a);

  // A.1: sphere means of L_a-subharmonic test fields are nondecreasing
  auto mean_of = [&](const std::function<double(double, double)>& u, double r) {
    return sphere_mean_n1(rule, r, u);
  };
  auto u_const = [](double, double) { return 1.0; };
  auto u_quad = [](double x, double y) { return x * x + y * y; };
  rep.a1_constant_ok = true;
  rep.a1_quadratic_ok = true;
  double prev_c = mean_of(u_const, 0.25), prev_q = mean_of(u_quad, 0.25);
  for (int k = 1; k <= 32; ++k) {
    const double r = 0.25 + (2.0 - 0.25) * k / 32.0;
    const double mc = mean_of(u_const, r), mq = mean_of(u_quad, r);
    if (mc < prev_c - 1e-12 * std::abs(prev_c)) rep.a1_constant_ok = false;
    if (mq <= prev_q) rep.a1_quadratic_ok = false;
    prev_c = mc;
    prev_q = mq;
  }

  // A.2: measured sup-bound constant for u = |z|^2, stable under refinement
  auto a2_constant = [&](int n_rad) {
    const double r = 1.5;
    const double sup_half = 0.25 * r * r;
    double acc = 0.0;
    const double dr = r / n_rad;
    for (int k = 0; k < n_rad; ++k) {
      const double rho = (k + 0.5) * dr;
      // slice integral of |y|^a u^2 over the full circle of radius rho
      const double slice = 2.0 * rule.total_weight() * std::pow(rho, 4.0);
      acc += std::pow(rho, 1.0 + par.a) * slice * dr;
    }
    const double mean = std::pow(r, -2.0 - par.a) * acc;
    return sup_half / std::sqrt(mean);
  };
  rep.a2_constant_coarse = a2_constant(256);
  rep.a2_constant_fine = a2_constant(512);
  rep.a2_stable_ok = std::abs(rep.a2_constant_fine - rep.a2_constant_coarse) <=
                     0.1 * std::abs(rep.a2_constant_fine);

  // A.3: trace absorption scaling, sup on the flat part ~ 1/M
  rep.a3_sup_m10 = a3_flat_sup(par, 10.0, 161, 64);
  rep.a3_sup_m100 = a3_flat_sup(par, 100.0, 161, 64);
  rep.a3_sup_m1000 = a3_flat_sup(par, 1000.0, 161, 64);
  const double r1 = rep.a3_sup_m10 / rep.a3_sup_m100;
  const double r2 = rep.a3_sup_m100 / rep.a3_sup_m1000;
  rep.a3_scaling_ok = (r1 >= 5.0 && r1 <= 20.0) && (r2 >= 10.0 / 3.0 && r2 <= 30.0);

  std::string bad;
  if (!rep.a1_constant_ok || !rep.a1_quadratic_ok) bad += "A.1,";
  if (!rep.a2_stable_ok) bad += "A.2,";
  if (!rep.a3_scaling_ok) bad += "A.3,";
  if (!bad.empty()) bad.pop_back();
  rep.failing = bad;
  return rep;
}

}  // namespace fracseg
