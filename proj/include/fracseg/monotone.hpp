#pragma once

#include <vector>

#include "fracseg/field.hpp"
#include "fracseg/params.hpp"

namespace fracseg {

// Per-radius Almgren records at the grid radii r_k = e^{t_k}.
struct FrequencyTrace {
  std::vector<double> r;
  std::vector<double> E;
  std::vector<double> H;
  std::vector<double> N;
  std::vector<double> pohozaev;  // signed residual of the dilation identity
  std::vector<double> J;         // filled by acf_trace when requested
  FracParam par;
  double M_star = 0.0;
};

// E(r) = r^{-a} [ int_{B_r^+} y^a (|grad u|^2 + |grad v|^2) + int_{flat} u^2 v^2 ],
// H(r) = r^{-1-a} int_{arc} y^a (u^2 + v^2), N = E/H. Gradient energies use the
// transmissibility face form so the singular angular profiles are captured.
FrequencyTrace frequency_trace(const FieldPair& pair, FracParam par);

// Signed defect of the n=1 dilation identity at radius r (a grid radius).
double pohozaev_residual(const FieldPair& pair, FracParam par, double r);
// Same, relative to the magnitude of the identity's terms.
double pohozaev_residual_relative(const FieldPair& pair, FracParam par, double r);

// max over r1 < r2 of H(r2)/H(r1) - e^{d/(1-a)} (r2/r1)^{2d}; requires
// d >= sup N over the trace.
double doubling_check(const FrequencyTrace& trace, double d);

struct AcfResult {
  std::vector<double> r;
  std::vector<double> J;
  double b_est = 0.0;
  double C_s = 0.0;       // calibration constant from the exact pair
  double J_limit = 0.0;   // trailing-decade mean
  double M_star = 0.0;
};

// J(r) = r^{-4s} * prod_i int_{B_r^+} y^a |grad (w_i - M*)_+|^2 / |z|^a with
// the leading coefficient recovered as (lim J / C(s)^2)^{1/4}.
AcfResult acf_trace(const FieldPair& pair, FracParam par, double M_star);

// centered d(log H)/d(log r) at interior radii (first/last copied)
std::vector<double> log_h_slope(const FrequencyTrace& trace);

}  // namespace fracseg
