#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracseg/params.hpp"

namespace fracseg {

// Poisson kernel P0(x,y) = norm * y^{2s} / (|x|^2 + y^2)^{(n+2s)/2} with the
// normalization fixed by unit mass in x at every height.
struct KernelEval {
  int n = 1;
  FracParam par;
  double norm = 1.0;
};

KernelEval make_kernel_eval(int n, FracParam par);

double poisson_kernel(const std::vector<double>& x, double y, const KernelEval& eval);
// radial form, rho = |x|
double poisson_kernel_radial(double rho, double y, const KernelEval& eval);
// integral of P0(.,y) over R^n by transformed quadrature (unit-mass oracle)
double kernel_mass(double y, const KernelEval& eval, int n_quad = 400);
// one-dimensional kernel mass over the x-interval [lo, hi] at height y (n=1)
double kernel_mass_interval(double lo, double hi, double y, const KernelEval& eval,
                            int n_quad = 400);

// Convolution extension of one-dimensional boundary data sampled uniformly
// on [x_lo, x_hi]. Evaluation is on-demand trapezoid quadrature.
class PoissonExtension {
 public:
  PoissonExtension(std::vector<double> g, double x_lo, double x_hi, KernelEval eval);
  // tail-mass guard: largest kernel mass outside the data window over the
  // rectangle [x0,x1] x [y0,y1]; construction data must keep it < 1e-6
  void require_tail_mass(double x0, double x1, double y0, double y1) const;
  double value(double x, double y) const;
  const KernelEval& eval() const { return eval_; }
  int sample_count() const { return static_cast<int>(g_.size()); }

 private:
  std::vector<double> g_;
  double x_lo_, x_hi_, dx_;
  KernelEval eval_;
};

// field samples at the data abscissae for each requested level
std::vector<std::vector<double>> poisson_extend(const PoissonExtension& ext,
                                                const std::vector<double>& x_eval,
                                                const std::vector<double>& y_levels);

// solution of Phi'' + (a/t) Phi' - Phi = 0, Phi(0) = 1, Phi(+inf) = 0
struct PhiSolution {
  std::vector<double> t;    // uniform on (0, T_max]
  std::vector<double> phi;
  std::vector<double> dphi;
  double a = 0.0;

  double at(double tq) const;  // cubic interpolation
};

PhiSolution solve_phi(FracParam par, double T_max, double h_ode = 5e-4);

double hyperbolic_distance(double x1, double y1, double x2, double y2);

struct HarnackOptions {
  int n_pairs = 300;
  int n_centers = 10;
  int n_ball_samples = 64;
  std::uint64_t seed = 2024;
  double fd_step = 2e-3;
};

struct HarnackCertificate {
  double yau_sup = 0.0;          // sup of y |grad u| / u
  double harnack_log_sup = 0.0;  // sup of log(u2/u1) / dist_H
  double cor22_sup_ratio = 0.0;  // sup over centers of sup/inf on B_{y/2}
};

struct Rect {
  double x_lo, x_hi, y_lo, y_hi;
};

HarnackCertificate harnack_certificate(const PoissonExtension& ext, Rect region,
                                       const HarnackOptions& opt);

struct AppendixReport {
  bool a1_constant_ok = false;
  bool a1_quadratic_ok = false;
  double a2_constant_coarse = 0.0;
  double a2_constant_fine = 0.0;
  bool a2_stable_ok = false;
  double a3_sup_m10 = 0.0;
  double a3_sup_m100 = 0.0;
  double a3_sup_m1000 = 0.0;
  bool a3_scaling_ok = false;
  std::string failing;  // comma list of violated lemmas, empty when clean

  bool pass() const { return failing.empty(); }
};

AppendixReport appendix_checks(FracParam par);

}  // namespace fracseg
