#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracseg/io.hpp"
#include "fracseg/params.hpp"
#include "fracseg/solver.hpp"

namespace fracseg {

enum class Resolution { coarse, reference, fine };

Resolution resolution_from_string(const std::string& name);
std::string to_string(Resolution r);

// One configuration object wiring the CLI to the modules. Unset grid fields
// fall back to the resolution presets.
struct RunConfig {
  std::string mode = "suite";
  double s = 0.5;
  Resolution resolution = Resolution::reference;
  double t_min = -6.0;
  double t_max = 4.0;
  int n_t = 0;           // 0 -> preset
  int n_theta = 0;       // 0 -> preset
  int eigen_n_theta = 0; // 0 -> preset
  int n_modes = 6;
  double tol = 1e-10;
  int max_newton = 40;
  double damping = 1.0;
  std::vector<double> schedule;  // empty -> default continuation
  double fit_inner_frac = 0.3;
  double fit_outer_frac = 0.2;
  std::string out_dir = ".";
  std::uint64_t seed = 1234;

  static RunConfig from_kv(const KVConfig& kv);
  void validate() const;
  SolverConfig solver_config() const;
  int eigen_resolution() const;
  KVConfig resolved() const;  // every effective value, for reproducibility
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the full acceptance pipeline, printing one PASS/FAIL line per
// criterion to `log` as it completes.
std::vector<CriterionResult> run_acceptance(const RunConfig& cfg, std::ostream& log);

// CLI dispatch; returns 0 on success (validation failures throw
// std::invalid_argument / std::domain_error, numerical ones std::runtime_error)
int run_mode(const RunConfig& cfg, std::ostream& log);

}  // namespace fracseg
