#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fracseg/field.hpp"
#include "fracseg/params.hpp"

namespace fracseg {

enum class InitGuess { farfield_extension, perturbed, custom };

struct SolverConfig {
  double t_min = -6.0;
  double t_max = 4.0;
  int n_t = 401;
  int n_theta = 128;
  double damping = 1.0;       // initial Newton step fraction
  double tol = 1e-10;         // scaled residual tolerance (relative to field scale)
  int max_newton = 40;
  std::vector<double> t_max_schedule;  // strictly increasing, last entry = t_max
  InitGuess init = InitGuess::farfield_extension;
  double perturb_amp = 0.1;
  std::uint64_t seed = 1234;
  const FieldPair* custom_init = nullptr;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // accepted iterates, all stages
  double final_residual = 0.0;
  int positivity_violations = 0;
  std::vector<double> stage_t_max;
};

// Dirichlet data on the outer t-boundary: the leading blow-down profile
// e^{s t_max} (cos^{2s}(theta/2), sin^{2s}(theta/2)) over all columns
// including the trace entries. Pins the normalization b = 1 and T = 0.
std::pair<std::vector<double>, std::vector<double>> farfield_data(FracParam par,
                                                                  double t_max,
                                                                  const LogPolarGrid& g);

std::pair<FieldPair, SolveReport> solve_profile(FracParam par, const SolverConfig& cfg);

struct ResidualReport {
  double u_interior_sup = 0, u_interior_l2 = 0;
  double v_interior_sup = 0, v_interior_l2 = 0;
  double u_trace_defect_sup = 0, v_trace_defect_sup = 0;
};

// Interior and boundary-condition defects of a field pair against the
// discrete system (outer Dirichlet data taken from the pair itself).
ResidualReport residual_report(const FieldPair& pair, FracParam par);

}  // namespace fracseg
