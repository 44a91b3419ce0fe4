#include "fracseg/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracseg/la_operator.hpp"
#include "fracseg/spectral.hpp"

namespace fracseg {

namespace {

// Cumulative weighted gradient energy V[k] = int over {t < t_k} of
// e^{c t} (sin theta)^a (w_t^2 + w_theta^2) dt dtheta in face form. The
// theta-face energies of cell k are clipped exactly at the slice t_k; a
// t-face energy enters once both of its endpoints lie below the slice.
std::vector<double> cumulative_energy(const LogPolarField& w, const DiscreteOperator& op) {
  const auto& g = op.grid();
  const int n_t = g.n_t(), m = g.n_theta();
  std::vector<double> theta_cell(n_t, 0.0);  // per unit e^{ct} t-mass
  for (int i = 0; i < n_t; ++i) {
    double acc = 0.0;
    for (int f = 0; f <= m; ++f) {
      const double below = (f == 0) ? w.at(i, 0) : w.interior(i, f - 1);
      const double above = (f == m) ? w.at(i, m + 1) : w.interior(i, f);
      const double d = above - below;
      acc += op.theta_face(f) * d * d;
    }
    theta_cell[i] = acc;
  }
  std::vector<double> V(n_t, 0.0);
  double below_sum = 0.0;
  for (int k = 0; k < n_t; ++k) {
    if (k > 0) {
      below_sum += theta_cell[k - 1] * op.t_mass(k - 1);
      double tfaces = 0.0;
      for (int j = 0; j < m; ++j) {
        const double d = w.interior(k, j) - w.interior(k - 1, j);
        tfaces += g.theta_weight(j) * op.t_face(k - 1) * d * d;
      }
      below_sum += tfaces;
    }
    V[k] = below_sum + theta_cell[k] * op.t_mass_below(k, g.t_node(k));
  }
  return V;
}

// cumulative integral over both boundary rays of (u v)^2 up to radius r_k:
// I[k] = sum_sides int_{t_min}^{t_k} (u^b v^b)^2 e^t dt by trapezoid
std::vector<double> cumulative_trace_product(const FieldPair& pair) {
  const auto& g = pair.u.grid();
  const int n_t = g.n_t(), m = g.n_theta();
  std::vector<double> I(n_t, 0.0);
  auto dens = [&](int i) {
    const double p0 = pair.u.at(i, 0) * pair.v.at(i, 0);
    const double p1 = pair.u.at(i, m + 1) * pair.v.at(i, m + 1);
    return (p0 * p0 + p1 * p1) * std::exp(g.t_node(i));
  };
  double prev = dens(0);
  for (int k = 1; k < n_t; ++k) {
    const double cur = dens(k);
    I[k] = I[k - 1] + 0.5 * g.h_t() * (prev + cur);
    prev = cur;
  }
  return I;
}

// slice integrals at row k: sq_t = int (sin)^a (w_t)^2 dtheta via centered
// t-differences, sq_theta = same for the angular derivative in face form
void slice_gradients(const LogPolarField& w, const DiscreteOperator& op, int k,
                     double& sq_t, double& sq_theta) {
  const auto& g = op.grid();
  const int n_t = g.n_t(), m = g.n_theta();
  sq_t = 0.0;
  sq_theta = 0.0;
  const double h = g.h_t();
  for (int j = 0; j < m; ++j) {
    double wt;
    if (k == 0)
      wt = (w.interior(1, j) - w.interior(0, j)) / h;
    else if (k == n_t - 1)
      wt = (w.interior(k, j) - w.interior(k - 1, j)) / h;
    else
      wt = (w.interior(k + 1, j) - w.interior(k - 1, j)) / (2.0 * h);
    sq_t += g.theta_weight(j) * wt * wt;
  }
  for (int f = 0; f <= m; ++f) {
    const double below = (f == 0) ? w.at(k, 0) : w.interior(k, f - 1);
    const double above = (f == m) ? w.at(k, m + 1) : w.interior(k, f);
    const double d = above - below;
    // T (dw)^2 approximates int (sin)^a w_theta^2 over the face gap
    sq_theta += op.theta_face(f) * d * d;
  }
}

void check_same_grid(const FieldPair& pair) {
  if (pair.u.grid_ptr().get() != pair.v.grid_ptr().get())
    throw std::invalid_argument("fields must share one grid");
}

}  // namespace

FrequencyTrace frequency_trace(const FieldPair& pair, FracParam par) {
  check_same_grid(pair);
  const auto& g = pair.u.grid();
  const int n_t = g.n_t(), m = g.n_theta();
  DiscreteOperator op(pair.u.grid_ptr(), par.a, 0.0);

  const std::vector<double> Vu = cumulative_energy(pair.u, op);
  const std::vector<double> Vv = cumulative_energy(pair.v, op);
  const std::vector<double> I = cumulative_trace_product(pair);

  FrequencyTrace tr;
  tr.par = par;
  tr.r.resize(n_t);
  tr.E.resize(n_t);
  tr.H.resize(n_t);
  tr.N.resize(n_t);
  tr.pohozaev.resize(n_t);

  const double scale2 = std::pow(std::max(pair.u.max_abs(), pair.v.max_abs()), 2);
  for (int k = 0; k < n_t; ++k) {
    const double t = g.t_node(k);
    tr.r[k] = std::exp(t);
    double h_slice = 0.0;
    for (int j = 0; j < m; ++j) {
      const double uu = pair.u.interior(k, j), vv = pair.v.interior(k, j);
      h_slice += g.theta_weight(j) * (uu * uu + vv * vv);
    }
    tr.H[k] = h_slice;
    tr.E[k] = std::exp(-par.a * t) * (Vu[k] + Vv[k] + I[k]);
    if (h_slice <= 1e-300 * std::max(scale2, 1.0)) {
      if (scale2 > 0.0)
        throw std::runtime_error("frequency_trace: H vanishes on a nontrivial radius");
      tr.N[k] = 0.0;
    } else {
      tr.N[k] = tr.E[k] / tr.H[k];
    }
  }
  // dilation identity on the annulus [r_min, r]: the sphere terms appear at
  // both circles, the volume and flat terms are the truncated cumulatives
  auto sphere_terms = [&](int k, double& G, double& Ps_term) {
    double ku, pu, kv, pv;
    slice_gradients(pair.u, op, k, ku, pu);
    slice_gradients(pair.v, op, k, kv, pv);
    const double p0 = pair.u.at(k, 0) * pair.v.at(k, 0);
    const double p1 = pair.u.at(k, m + 1) * pair.v.at(k, m + 1);
    G = std::exp(par.a * g.t_node(k)) * ((pu + pv) - (ku + kv));
    Ps_term = std::exp(g.t_node(k)) * (p0 * p0 + p1 * p1);
  };
  double G0, Ps0;
  sphere_terms(0, G0, Ps0);
  for (int k = 0; k < n_t; ++k) {
    double Gk, Psk;
    sphere_terms(k, Gk, Psk);
    tr.pohozaev[k] = par.a * (Vu[k] + Vv[k]) - (Gk - G0) - (Psk - Ps0) + I[k];
  }
  return tr;
}

namespace {

double pohozaev_parts(const FieldPair& pair, FracParam par, double r, double& scale) {
  check_same_grid(pair);
  const auto& g = pair.u.grid();
  const double t = std::log(r);
  const int k = g.t_index(t);
  if (std::abs(g.t_node(k) - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::domain_error("pohozaev_residual: r is not a grid radius");
  DiscreteOperator op(pair.u.grid_ptr(), par.a, 0.0);
  const std::vector<double> Vu = cumulative_energy(pair.u, op);
  const std::vector<double> Vv = cumulative_energy(pair.v, op);
  const std::vector<double> I = cumulative_trace_product(pair);
  const int m = g.n_theta();

  auto sphere_terms = [&](int kk, double& G, double& Ps_term) {
    double ku, pu, kv, pv;
    slice_gradients(pair.u, op, kk, ku, pu);
    slice_gradients(pair.v, op, kk, kv, pv);
    const double p0 = pair.u.at(kk, 0) * pair.v.at(kk, 0);
    const double p1 = pair.u.at(kk, m + 1) * pair.v.at(kk, m + 1);
    G = std::exp(par.a * g.t_node(kk)) * ((pu + pv) - (ku + kv));
    Ps_term = std::exp(g.t_node(kk)) * (p0 * p0 + p1 * p1);
  };
  double G0, Ps0, Gk, Psk;
  sphere_terms(0, G0, Ps0);
  sphere_terms(k, Gk, Psk);
  const double V = Vu[k] + Vv[k];
  const double res = par.a * V - (Gk - G0) - (Psk - Ps0) + I[k];
  scale = std::abs(par.a) * V + std::abs(Gk) + std::abs(G0) + Psk + Ps0 + I[k] + 1e-300;
  return res;
}

}  // namespace

double pohozaev_residual(const FieldPair& pair, FracParam par, double r) {
  double scale;
  return pohozaev_parts(pair, par, r, scale);
}

double pohozaev_residual_relative(const FieldPair& pair, FracParam par, double r) {
  double scale;
  const double res = pohozaev_parts(pair, par, r, scale);
  return res / scale;
}

double doubling_check(const FrequencyTrace& trace, double d) {
  const double nmax = *std::max_element(trace.N.begin(), trace.N.end());
  if (d < nmax - 1e-12)
    throw std::invalid_argument("doubling_check: d must dominate the frequency trace");
  const double slack = std::exp(d / (1.0 - trace.par.a));
  double worst = -1e300;
  const int n = static_cast<int>(trace.r.size());
  for (int k1 = 0; k1 < n; ++k1) {
    if (trace.H[k1] <= 0.0) continue;
    for (int k2 = k1; k2 < n; ++k2) {
      const double bound = slack * std::pow(trace.r[k2] / trace.r[k1], 2.0 * d);
      worst = std::max(worst, trace.H[k2] / trace.H[k1] - bound);
    }
  }
  return worst;
}

AcfResult acf_trace(const FieldPair& pair, FracParam par, double M_star) {
  check_same_grid(pair);
  const auto& g = pair.u.grid();
  const int n_t = g.n_t();

  // truncation must clear both traces near the inner boundary
  double inner_trace_max = 0.0;
  for (int i = 0; i < n_t && g.t_node(i) <= g.t_min() + 1.0; ++i) {
    inner_trace_max = std::max(inner_trace_max, pair.u.trace0(i));
    inner_trace_max = std::max(inner_trace_max, pair.u.trace_pi(i));
    inner_trace_max = std::max(inner_trace_max, pair.v.trace0(i));
    inner_trace_max = std::max(inner_trace_max, pair.v.trace_pi(i));
  }
  // M* = 0 disables truncation entirely (calibration mode); otherwise the
  // level must clear the traces near the inner boundary
  if (M_star > 0.0 && M_star < inner_trace_max)
    throw std::domain_error("acf_trace: M* below the trace values near t_min");

  GridPtr gp = pair.u.grid_ptr();
  auto truncate = [&](const LogPolarField& w) {
    LogPolarField out(gp, w.kind());
    for (size_t q = 0; q < w.raw().size(); ++q)
      out.raw()[q] = std::max(w.raw()[q] - M_star, 0.0);
    return out;
  };
  LogPolarField w1 = truncate(pair.u), w2 = truncate(pair.v);
  if (w1.max_abs() == 0.0 || w2.max_abs() == 0.0)
    throw std::domain_error("acf_trace: truncation level empties a field");

  DiscreteOperator op0(gp, 0.0, 0.0);  // weight (sin theta)^a only
  const std::vector<double> F1 = cumulative_energy(w1, op0);
  const std::vector<double> F2 = cumulative_energy(w2, op0);

  AcfResult out;
  out.M_star = M_star;
  out.r.resize(n_t);
  out.J.resize(n_t);
  for (int k = 0; k < n_t; ++k) {
    out.r[k] = std::exp(g.t_node(k));
    out.J[k] = std::exp(-4.0 * par.s * g.t_node(k)) * F1[k] * F2[k];
  }

  // calibration on the exact pair (b = 1) with the same machinery
  FieldPair exact = exact_homogeneous_pair(par, HomogeneousBranch::segregated, gp);
  const std::vector<double> Fex = cumulative_energy(exact.u, op0);

  const double span = g.t_max() - g.t_min();
  const double t_hi = g.t_max() - 0.2 * span;
  const double t_lo = std::max(g.t_min(), t_hi - std::log(10.0));
  double csum = 0.0, jsum = 0.0;
  int cnt = 0;
  for (int k = 0; k < n_t; ++k) {
    const double t = g.t_node(k);
    if (t < t_lo || t > t_hi) continue;
    csum += std::exp(-2.0 * par.s * t) * Fex[k];
    jsum += out.J[k];
    ++cnt;
  }
  if (cnt == 0) throw std::runtime_error("acf_trace: empty limit window");
  out.C_s = csum / cnt;
  out.J_limit = jsum / cnt;
  out.b_est = std::pow(out.J_limit / (out.C_s * out.C_s), 0.25);
  return out;
}

std::vector<double> log_h_slope(const FrequencyTrace& trace) {
  const int n = static_cast<int>(trace.r.size());
  std::vector<double> slope(n, 0.0);
  for (int k = 1; k + 1 < n; ++k) {
    const double dlogr = std::log(trace.r[k + 1]) - std::log(trace.r[k - 1]);
    slope[k] = (std::log(trace.H[k + 1]) - std::log(trace.H[k - 1])) / dlogr;
  }
  if (n >= 3) {
    slope[0] = slope[1];
    slope[n - 1] = slope[n - 2];
  }
  return slope;
}

}  // namespace fracseg
