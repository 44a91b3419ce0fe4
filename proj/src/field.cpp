#include "fracseg/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracseg {

LogPolarField::LogPolarField(GridPtr grid, FieldKind kind)
    : grid_(std::move(grid)), kind_(kind) {
  cols_ = grid_->n_cols();
  values_.assign(static_cast<size_t>(grid_->n_t()) * cols_, 0.0);
}

bool LogPolarField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double LogPolarField::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double LogPolarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void LogPolarField::sample(const std::function<double(double, double)>& f) {
  const auto& g = *grid_;
  for (int i = 0; i < g.n_t(); ++i) {
    const double t = g.t_node(i);
    at(i, 0) = f(t, 0.0);
    for (int j = 0; j < g.n_theta(); ++j) interior(i, j) = f(t, g.theta_node(j));
    at(i, g.n_theta() + 1) = f(t, M_PI);
  }
}

double weighted_volume_integral(const LogPolarField& f, double r_lo, double r_hi) {
  const auto& g = f.grid();
  if (!(r_lo > 0.0) || !(r_hi > r_lo))
    throw std::domain_error("weighted_volume_integral: need 0 < r_lo < r_hi");
  const double t_lo = std::log(r_lo), t_hi = std::log(r_hi);
  const double eps = 1e-12 * (g.t_max() - g.t_min());
  if (t_lo < g.t_min() - eps || t_hi > g.t_max() + eps)
    throw std::domain_error("weighted_volume_integral: region outside grid");
  const double c = 2.0 + g.params().a;
  double total = 0.0;
  for (int i = 0; i < g.n_t(); ++i) {
    const double lo = std::max(g.cell_t_lo(i), t_lo);
    const double hi = std::min(g.cell_t_hi(i), t_hi);
    if (hi <= lo) continue;
    const double tmass = LogPolarGrid::exp_mass(lo, hi, c);
    double slice = 0.0;
    for (int j = 0; j < g.n_theta(); ++j) slice += g.theta_weight(j) * f.interior(i, j);
    total += tmass * slice;
  }
  return total;
}

}  // namespace fracseg
