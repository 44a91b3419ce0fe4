#include "fracseg/la_operator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fracseg/quadrature.hpp"

namespace fracseg {

double theta_transmissibility(double theta_lo, double theta_hi, double a) {
  if (std::abs(a) >= 1.0)
    throw std::domain_error("theta_transmissibility: |a| >= 1 not integrable");
  if (!(theta_lo >= 0.0 && theta_lo < theta_hi && theta_hi <= M_PI))
    throw std::domain_error("theta_transmissibility: bad interval");
  return 1.0 / integral_sin_pow(theta_lo, theta_hi, -a);
}

DiscreteOperator::DiscreteOperator(GridPtr grid, double t_exp, double zeroth)
    : grid_(std::move(grid)), t_exp_(t_exp), q_(zeroth) {
  const auto& g = *grid_;
  const double a = g.params().a;
  const int m = g.n_theta();
  T_theta_.resize(m + 1);
  T_theta_[0] = theta_transmissibility(0.0, g.theta_node(0), a);
  for (int j = 1; j < m; ++j)
    T_theta_[j] = theta_transmissibility(g.theta_node(j - 1), g.theta_node(j), a);
  T_theta_[m] = theta_transmissibility(g.theta_node(m - 1), M_PI, a);

  S_t_.resize(g.n_t() - 1);
  W_t_.resize(g.n_t());
  for (int i = 0; i + 1 < g.n_t(); ++i)
    S_t_[i] = 1.0 / LogPolarGrid::exp_mass(g.t_node(i), g.t_node(i + 1), -t_exp_);
  for (int i = 0; i < g.n_t(); ++i)
    W_t_[i] = LogPolarGrid::exp_mass(g.cell_t_lo(i), g.cell_t_hi(i), t_exp_);
}

double DiscreteOperator::t_mass_below(int i, double t_cap) const {
  const auto& g = *grid_;
  const double hi = std::min(g.cell_t_hi(i), t_cap);
  return LogPolarGrid::exp_mass(g.cell_t_lo(i), hi, t_exp_);
}

double DiscreteOperator::flux_theta(const LogPolarField& w, int i, int f) const {
  // value above face minus value below, times transmissibility and t-mass
  const int m = grid_->n_theta();
  const double below = (f == 0) ? w.at(i, 0) : w.interior(i, f - 1);
  const double above = (f == m) ? w.at(i, m + 1) : w.interior(i, f);
  return W_t_[i] * T_theta_[f] * (above - below);
}

double DiscreteOperator::flux_t(const LogPolarField& w, int i, int j) const {
  return grid_->theta_weight(j) * S_t_[i] * (w.interior(i + 1, j) - w.interior(i, j));
}

LogPolarField DiscreteOperator::apply(const LogPolarField& w) const {
  if (w.grid_ptr().get() != grid_.get())
    throw std::invalid_argument("DiscreteOperator::apply: field on a different grid");
  const auto& g = *grid_;
  LogPolarField res(grid_, w.kind());
  const int m = g.n_theta();
  for (int i = 1; i + 1 < g.n_t(); ++i) {
    for (int j = 0; j < m; ++j) {
      double acc = flux_theta(w, i, j + 1) - flux_theta(w, i, j);
      acc += flux_t(w, i, j) - flux_t(w, i - 1, j);
      const double mass = W_t_[i] * g.theta_weight(j);
      res.interior(i, j) = acc / mass + q_ * w.interior(i, j);
    }
  }
  return res;
}

std::vector<double> DiscreteOperator::boundary_trace(const LogPolarField& w,
                                                     int side) const {
  const auto& g = *grid_;
  const int m = g.n_theta();
  std::vector<double> tr(g.n_t());
  for (int i = 0; i < g.n_t(); ++i) {
    if (side == 0)
      tr[i] = T_theta_[0] * (w.interior(i, 0) - w.at(i, 0));
    else
      tr[i] = T_theta_[m] * (w.interior(i, m - 1) - w.at(i, m + 1));
  }
  return tr;
}

void DiscreteOperator::dump_stencil(std::ostream& os) const {
  const auto& g = *grid_;
  const int m = g.n_theta();
  const int cols = g.n_cols();
  auto id = [cols](int i, int jj) { return i * cols + jj; };
  for (int i = 1; i + 1 < g.n_t(); ++i) {
    for (int j = 0; j < m; ++j) {
      const int jj = j + 1;
      const double mass = W_t_[i] * g.theta_weight(j);
      const double tdn = W_t_[i] * T_theta_[j] / mass;
      const double tup = W_t_[i] * T_theta_[j + 1] / mass;
      const double sdn = g.theta_weight(j) * S_t_[i - 1] / mass;
      const double sup = g.theta_weight(j) * S_t_[i] / mass;
      os << id(i, jj) << ' ' << id(i, jj - 1) << ' ' << -tdn << '\n';
      os << id(i, jj) << ' ' << id(i, jj + 1) << ' ' << -tup << '\n';
      os << id(i, jj) << ' ' << id(i - 1, jj) << ' ' << -sdn << '\n';
      os << id(i, jj) << ' ' << id(i + 1, jj) << ' ' << -sup << '\n';
      os << id(i, jj) << ' ' << id(i, jj) << ' ' << tdn + tup + sdn + sup + q_ << '\n';
    }
  }
}

}  // namespace fracseg
