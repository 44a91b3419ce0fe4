#pragma once

#include <functional>
#include <vector>

#include "fracseg/grid.hpp"

namespace fracseg {

enum class FieldKind { unscaled, scaled };

// Scalar samples on a LogPolarGrid. Column 0 is the trace at theta=0, columns
// 1..n_theta the interior nodes, column n_theta+1 the trace at theta=pi.
class LogPolarField {
 public:
  LogPolarField() = default;
  explicit LogPolarField(GridPtr grid, FieldKind kind = FieldKind::unscaled);

  const LogPolarGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  FieldKind kind() const { return kind_; }

  double& at(int i, int jj) { return values_[static_cast<size_t>(i) * cols_ + jj]; }
  double at(int i, int jj) const { return values_[static_cast<size_t>(i) * cols_ + jj]; }
  // interior node access (j = 0..n_theta-1)
  double& interior(int i, int j) { return at(i, j + 1); }
  double interior(int i, int j) const { return at(i, j + 1); }
  double trace0(int i) const { return at(i, 0); }
  double trace_pi(int i) const { return at(i, grid_->n_theta() + 1); }

  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }
  int cols() const { return cols_; }

  bool all_finite() const;
  double min_value() const;
  double max_abs() const;

  // fill from f(t, theta); trace columns use theta = 0 and pi
  void sample(const std::function<double(double, double)>& f);

 private:
  GridPtr grid_;
  FieldKind kind_ = FieldKind::unscaled;
  int cols_ = 0;
  std::vector<double> values_;
};

struct FieldPair {
  LogPolarField u;
  LogPolarField v;
};

// integral of f against the Cartesian measure y^a dx dy over the annulus
// r in [r_lo, r_hi]; f is taken piecewise constant per cell.
double weighted_volume_integral(const LogPolarField& f, double r_lo, double r_hi);

}  // namespace fracseg
