#pragma once

#include <memory>
#include <vector>

#include "fracseg/params.hpp"
#include "fracseg/theta_rule.hpp"

namespace fracseg {

// Tensor grid in (t, theta), t = log r uniform, theta on the Gauss-Jacobi
// nodes of the (sin theta)^a weight plus first-class trace rows at 0 and pi.
// The volume measure is the Cartesian one: y^a dx dy = e^{(2+a)t}(sin
// theta)^a dt dtheta for n = 1.
class LogPolarGrid {
 public:
  LogPolarGrid(double t_min, double t_max, int n_t, int n_theta, FracParam par);

  const FracParam& params() const { return par_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double h_t() const { return h_t_; }
  int n_t() const { return n_t_; }
  int n_theta() const { return rule_.size(); }
  int n_cols() const { return rule_.size() + 2; }  // + trace columns
  double t_node(int i) const { return t_nodes_[i]; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }
  const ThetaRule& theta_rule() const { return rule_; }
  double theta_node(int j) const { return rule_.nodes[j]; }
  double theta_weight(int j) const { return rule_.weights[j]; }

  // t-cell around node i, clipped to the domain
  double cell_t_lo(int i) const;
  double cell_t_hi(int i) const;
  // integral of e^{c t} over [lo,hi] (closed form)
  static double exp_mass(double lo, double hi, double c);
  // volume of cell (i,j) under the y^a Cartesian measure
  double cell_volume(int i, int j) const { return cell_vol_t_[i] * rule_.weights[j]; }

  // nearest t index / radius helpers
  int t_index(double t) const;

 private:
  double t_min_, t_max_, h_t_;
  int n_t_;
  FracParam par_;
  ThetaRule rule_;
  std::vector<double> t_nodes_;
  std::vector<double> cell_vol_t_;  // integral of e^{(2+a)t} over each t-cell
};

using GridPtr = std::shared_ptr<const LogPolarGrid>;

GridPtr build_grid(double t_min, double t_max, int n_t, int n_theta, FracParam par);

}  // namespace fracseg
