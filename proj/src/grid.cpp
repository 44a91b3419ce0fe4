#include "fracseg/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fracseg {

LogPolarGrid::LogPolarGrid(double t_min, double t_max, int n_t, int n_theta,
                           FracParam par)
    : t_min_(t_min), t_max_(t_max), n_t_(n_t), par_(par) {
  if (!(t_min < t_max)) throw std::invalid_argument("grid: t_min < t_max required");
  if (n_t < 8 || n_theta < 8) throw std::invalid_argument("grid: counts must be >= 8");
  h_t_ = (t_max - t_min) / (n_t - 1);
  t_nodes_.resize(n_t);
  for (int i = 0; i < n_t; ++i) t_nodes_[i] = t_min + i * h_t_;
  t_nodes_.back() = t_max;
  rule_ = make_theta_rule(n_theta, par.a);
  cell_vol_t_.resize(n_t);
  for (int i = 0; i < n_t; ++i)
    cell_vol_t_[i] = exp_mass(cell_t_lo(i), cell_t_hi(i), 2.0 + par.a);
}

double LogPolarGrid::cell_t_lo(int i) const {
  return (i == 0) ? t_min_ : t_nodes_[i] - 0.5 * h_t_;
}

double LogPolarGrid::cell_t_hi(int i) const {
  return (i == n_t_ - 1) ? t_max_ : t_nodes_[i] + 0.5 * h_t_;
}

double LogPolarGrid::exp_mass(double lo, double hi, double c) {
  if (hi <= lo) return 0.0;
  if (c == 0.0) return hi - lo;
  // written to stay accurate when c*(hi-lo) is small
  return std::exp(c * lo) * std::expm1(c * (hi - lo)) / c;
}

int LogPolarGrid::t_index(double t) const {
  int i = static_cast<int>(std::lround((t - t_min_) / h_t_));
  if (i < 0) i = 0;
  if (i >= n_t_) i = n_t_ - 1;
  return i;
}

GridPtr build_grid(double t_min, double t_max, int n_t, int n_theta, FracParam par) {
  return std::make_shared<LogPolarGrid>(t_min, t_max, n_t, n_theta, par);
}

}  // namespace fracseg
