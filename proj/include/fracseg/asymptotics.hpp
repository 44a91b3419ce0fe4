#pragma once

#include <vector>

#include "fracseg/field.hpp"
#include "fracseg/params.hpp"

namespace fracseg {

struct BlowdownScaling {
  double R = 1.0;
  double L = 1.0;      // circle normalization L(R)
  double kappa = 1.0;  // = L^2 R^{1-a}
};

// L(R) from the weighted (H-consistent) or unweighted circle integral at a
// grid radius; kappa_R = L^2 R^{1-a}.
BlowdownScaling blowdown_scaling(const FieldPair& pair, double R, bool weighted);

// view of the blow-down rescaling: t-shift by log R and division by L
FieldPair blowdown_rescale(const FieldPair& pair, const BlowdownScaling& sc);

struct EFResidual {
  double interior_sup = 0.0;
  double interior_l2 = 0.0;
  double bc_defect_sup = 0.0;
};

// Residual of the scaled equation u_tt + u_t + s(1-s)u + L^a_theta u = 0 on
// ubar = e^{-st} w, with the scaling-consistent boundary exponent e^{4st}.
EFResidual emden_fowler_residual(const FieldPair& pair, FracParam par);

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

// default window: drop the inner 30% (preasymptotic) and outer 20%
// (boundary-polluted) of the t-range
FitWindow default_fit_window(const LogPolarGrid& g, double inner_frac = 0.3,
                             double outer_frac = 0.2);

struct FitResult {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  int n = 0;
};

// least-squares slope of log(vals) against t over the window; nonpositive
// values inside the window are a fit error
FitResult fit_decay(const std::vector<double>& t, const std::vector<double>& vals,
                    FitWindow window);

struct ExpansionReport {
  double s = 0.0;
  double b_scale = 1.0;       // leading coefficient (u side)
  double b_scale_v = 1.0;     // v-side leading coefficient
  double a_coeff = 0.0;       // subleading coefficient of u
  double b_coeff = 0.0;       // subleading coefficient of v
  double stderr_a = 0.0, stderr_b = 0.0;
  double T = 0.0;             // symmetry center (b_coeff - a_coeff) / (2s)
  double rate_f = 0.0;        // fitted decay rate of |f(t) - a_coeff|
  double rate_envelope = 0.0; // fitted sup_theta decay rate of ubar - leading
  double slope_minority = 0.0;     // v trace at theta=0, expected -3s
  double slope_minority_dx = 0.0;  // d/dx of that trace, expected -(3s+1)
  double slope_majority = 0.0;     // u trace at theta=0, expected +s
  double fit_rms_u = 0.0, fit_rms_v = 0.0;
  FitWindow window;
};

ExpansionReport extract_expansion(const FieldPair& pair, FracParam par,
                                  bool subleading = true, FitWindow window = {});

struct AlignResult {
  double t0 = 0.0;
  double sup_mismatch = 0.0;
  int compared_nodes = 0;
};

// t0 = (a2 - a1)/s; pair1 shifted by t0 in x (log-polar interpolation) is
// compared against pair2 in the sup norm relative to the field scale.
// Requires matching s, leading coefficients within 1%, and a1+b1 = a2+b2
// within hyp_tol.
AlignResult align_translation(const ExpansionReport& rep1, const ExpansionReport& rep2,
                              const FieldPair& pair1, const FieldPair& pair2,
                              double hyp_tol = 0.02);

// cubic Lagrange interpolation of a field at (t, theta); theta in [0, pi]
double interp_field(const LogPolarField& w, double t, double theta);

// resample of u(x + dx, y); nodes whose preimage leaves the grid become NaN
FieldPair shift_x(const FieldPair& pair, double dx);

// ubar = e^{-s t} w view
LogPolarField scaled_view(const LogPolarField& w, double s);

}  // namespace fracseg
