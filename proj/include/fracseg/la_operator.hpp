#pragma once

#include <iosfwd>
#include <vector>

#include "fracseg/field.hpp"

namespace fracseg {

// 1 / integral_{lo}^{hi} (sin theta)^{-a} dtheta, the exact flux
// transmissibility of the weight (sin theta)^a across [lo,hi]. Profiles of
// the form c + beta * integral (sin tau)^{-a} dtau are differenced exactly.
double theta_transmissibility(double theta_lo, double theta_hi, double a);

// Finite-volume form of w_tt + c w_t + L^a_theta w + q w on a LogPolarGrid,
// i.e. div(e^{ct} (sin theta)^a grad w) + q e^{ct}(sin theta)^a w in (t,theta).
// c = a, q = 0 gives the unscaled L_a; c = 1, q = s(1-s) the Emden-Fowler form.
class DiscreteOperator {
 public:
  DiscreteOperator(GridPtr grid, double t_exp, double zeroth);

  const LogPolarGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  double t_exponent() const { return t_exp_; }
  double zeroth_coeff() const { return q_; }

  // face transmissibilities: theta faces f = 0..n_theta (0 and n_theta touch
  // the trace rows), t faces i = 0..n_t-2 between nodes i and i+1
  double theta_face(int f) const { return T_theta_[f]; }
  double t_face(int i) const { return S_t_[i]; }
  double t_mass(int i) const { return W_t_[i]; }  // integral of e^{c t} over cell i
  // e^{c t} mass of cell i clipped to [-inf, t_cap]
  double t_mass_below(int i, double t_cap) const;

  // Interior residual (w_tt + c w_t + L_theta^a w + q w) per node, normalized
  // by cell measure. Rows i = 0 and n_t-1 and the trace columns are zero; the
  // solver owns the boundary conditions.
  LogPolarField apply(const LogPolarField& w) const;

  // Discrete weighted normal trace at theta = 0 (side = 0) or pi (side = 1),
  // oriented so that d_y^a u = e^{(a-1)t} * trace on both rays.
  std::vector<double> boundary_trace(const LogPolarField& w, int side) const;

  // signed flux across a theta face f at t-cell i, oriented in +theta
  double flux_theta(const LogPolarField& w, int i, int f) const;
  // signed flux across the t face between nodes i and i+1 at theta cell j
  double flux_t(const LogPolarField& w, int i, int j) const;

  // coordinate-format dump of the interior stencil (row col value)
  void dump_stencil(std::ostream& os) const;

 private:
  GridPtr grid_;
  double t_exp_, q_;
  std::vector<double> T_theta_;
  std::vector<double> S_t_;
  std::vector<double> W_t_;
};

}  // namespace fracseg
