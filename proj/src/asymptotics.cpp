#include "fracseg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracseg/la_operator.hpp"
#include "fracseg/spectral.hpp"

namespace fracseg {

namespace {

void check_same_grid(const FieldPair& pair) {
  if (pair.u.grid_ptr().get() != pair.v.grid_ptr().get())
    throw std::invalid_argument("fields must share one grid");
}

int radius_index(const LogPolarGrid& g, double R) {
  const double t = std::log(R);
  const int k = g.t_index(t);
  if (std::abs(g.t_node(k) - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::domain_error("R is not a grid radius");
  return k;
}

}  // namespace

LogPolarField scaled_view(const LogPolarField& w, double s) {
  LogPolarField out(w.grid_ptr(), FieldKind::scaled);
  const auto& g = w.grid();
  for (int i = 0; i < g.n_t(); ++i) {
    const double f = std::exp(-s * g.t_node(i));
    for (int jj = 0; jj < g.n_cols(); ++jj) out.at(i, jj) = f * w.at(i, jj);
  }
  return out;
}

BlowdownScaling blowdown_scaling(const FieldPair& pair, double R, bool weighted) {
  check_same_grid(pair);
  const auto& g = pair.u.grid();
  const int k = radius_index(g, R);
  double l2 = 0.0;
  if (weighted) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const double uu = pair.u.interior(k, j), vv = pair.v.interior(k, j);
      l2 += g.theta_weight(j) * (uu * uu + vv * vv);
    }
  } else {
    // trapezoid over the extended node set including the trace angles
    std::vector<double> th(g.n_theta() + 2), f(g.n_theta() + 2);
    th.front() = 0.0;
    th.back() = M_PI;
    for (int j = 0; j < g.n_theta(); ++j) th[j + 1] = g.theta_node(j);
    for (int jj = 0; jj < g.n_cols(); ++jj) {
      const double uu = pair.u.at(k, jj), vv = pair.v.at(k, jj);
      f[jj] = uu * uu + vv * vv;
    }
    for (size_t q = 0; q + 1 < th.size(); ++q)
      l2 += 0.5 * (th[q + 1] - th[q]) * (f[q] + f[q + 1]);
  }
  if (l2 <= 0.0) throw std::runtime_error("blowdown_scaling: degenerate circle integral");
  BlowdownScaling sc;
  sc.R = R;
  sc.L = std::sqrt(l2);
  sc.kappa = l2 * std::pow(R, 1.0 - g.params().a);
  return sc;
}

FieldPair blowdown_rescale(const FieldPair& pair, const BlowdownScaling& sc) {
  check_same_grid(pair);
  GridPtr oldg = pair.u.grid_ptr();
  const double shift = std::log(sc.R);
  GridPtr g = build_grid(oldg->t_min() - shift, oldg->t_max() - shift, oldg->n_t(),
                         oldg->n_theta(), oldg->params());
  FieldPair out{LogPolarField(g), LogPolarField(g)};
  for (int i = 0; i < g->n_t(); ++i)
    for (int jj = 0; jj < g->n_cols(); ++jj) {
      out.u.at(i, jj) = pair.u.at(i, jj) / sc.L;
      out.v.at(i, jj) = pair.v.at(i, jj) / sc.L;
    }
  return out;
}

EFResidual emden_fowler_residual(const FieldPair& pair, FracParam par) {
  check_same_grid(pair);
  GridPtr gp = pair.u.grid_ptr();
  const auto& g = *gp;
  const double s = par.s;
  LogPolarField ub = scaled_view(pair.u, s), vb = scaled_view(pair.v, s);
  DiscreteOperator op(gp, 1.0, s * (1.0 - s));
  EFResidual out;
  for (const LogPolarField* f : {&ub, &vb}) {
    LogPolarField r = op.apply(*f);
    double acc = 0.0;
    int n = 0;
    for (int i = 1; i + 1 < g.n_t(); ++i)
      for (int j = 0; j < g.n_theta(); ++j) {
        const double v = r.interior(i, j);
        out.interior_sup = std::max(out.interior_sup, std::abs(v));
        acc += v * v;
        ++n;
      }
    out.interior_l2 = std::max(out.interior_l2, std::sqrt(acc / std::max(n, 1)));
  }
  // boundary defect with the scaling-consistent exponent e^{4 s t}
  DiscreteOperator opa(gp, par.a, 0.0);
  const auto tru0 = opa.boundary_trace(ub, 0);
  const auto trupi = opa.boundary_trace(ub, 1);
  const auto trv0 = opa.boundary_trace(vb, 0);
  const auto trvpi = opa.boundary_trace(vb, 1);
  const int m = g.n_theta();
  for (int i = 0; i < g.n_t(); ++i) {
    const double c = std::exp(4.0 * s * g.t_node(i));
    const double du0 = tru0[i] - c * ub.at(i, 0) * vb.at(i, 0) * vb.at(i, 0);
    const double dupi = trupi[i] - c * ub.at(i, m + 1) * vb.at(i, m + 1) * vb.at(i, m + 1);
    const double dv0 = trv0[i] - c * vb.at(i, 0) * ub.at(i, 0) * ub.at(i, 0);
    const double dvpi = trvpi[i] - c * vb.at(i, m + 1) * ub.at(i, m + 1) * ub.at(i, m + 1);
    for (double d : {du0, dupi, dv0, dvpi})
      out.bc_defect_sup = std::max(out.bc_defect_sup, std::abs(d));
  }
  return out;
}

FitWindow default_fit_window(const LogPolarGrid& g, double inner_frac, double outer_frac) {
  const double span = g.t_max() - g.t_min();
  return FitWindow{g.t_min() + inner_frac * span, g.t_max() - outer_frac * span};
}

FitResult fit_decay(const std::vector<double>& t, const std::vector<double>& vals,
                    FitWindow window) {
  if (t.size() != vals.size()) throw std::invalid_argument("fit_decay: length mismatch");
  std::vector<double> xs, ys;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] < window.t_lo || t[k] > window.t_hi) continue;
    if (!(vals[k] > 0.0))
      throw std::runtime_error("fit_decay: nonpositive trace value inside the window");
    xs.push_back(t[k]);
    ys.push_back(std::log(vals[k]));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 3) throw std::runtime_error("fit_decay: window holds fewer than 3 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double det = n * sxx - sx * sx;
  FitResult fit;
  fit.n = n;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double rss = 0.0;
  for (int k = 0; k < n; ++k) {
    const double e = ys[k] - fit.intercept - fit.slope * xs[k];
    rss += e * e;
  }
  const double sigma2 = rss / std::max(n - 2, 1);
  fit.stderr_ = std::sqrt(sigma2 * n / det);
  return fit;
}

namespace {

// two-parameter fit y(t) = b + alpha e^{-t} over the window
struct TwoTermFit {
  double b = 0.0, alpha = 0.0;
  double stderr_b = 0.0, stderr_alpha = 0.0;
  double rms = 0.0;
};

TwoTermFit fit_two_term(const std::vector<double>& t, const std::vector<double>& y,
                        FitWindow w) {
  double s11 = 0, s1e = 0, see = 0, s1y = 0, sey = 0;
  int n = 0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] < w.t_lo || t[k] > w.t_hi) continue;
    const double e = std::exp(-t[k]);
    s11 += 1.0;
    s1e += e;
    see += e * e;
    s1y += y[k];
    sey += e * y[k];
    ++n;
  }
  if (n < 4) throw std::runtime_error("extract_expansion: window holds fewer than 4 rows");
  const double det = s11 * see - s1e * s1e;
  TwoTermFit fit;
  fit.b = (s1y * see - sey * s1e) / det;
  fit.alpha = (s11 * sey - s1e * s1y) / det;
  double rss = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] < w.t_lo || t[k] > w.t_hi) continue;
    const double e = std::exp(-t[k]);
    const double r = y[k] - fit.b - fit.alpha * e;
    rss += r * r;
  }
  const double sigma2 = rss / std::max(n - 2, 1);
  fit.stderr_b = std::sqrt(sigma2 * see / det);
  fit.stderr_alpha = std::sqrt(sigma2 * s11 / det);
  fit.rms = std::sqrt(rss / n);
  return fit;
}

// decay-rate fit of |vals| with a floor guard, tolerant of sign flips
double rate_of_decay(const std::vector<double>& t, const std::vector<double>& vals,
                     FitWindow w) {
  std::vector<double> xs, ys;
  double vmax = 0.0;
  for (size_t k = 0; k < vals.size(); ++k)
    if (t[k] >= w.t_lo && t[k] <= w.t_hi) vmax = std::max(vmax, std::abs(vals[k]));
  if (vmax == 0.0) return std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < vals.size(); ++k) {
    if (t[k] < w.t_lo || t[k] > w.t_hi) continue;
    const double av = std::abs(vals[k]);
    if (av < 1e-13 * vmax) continue;
    xs.push_back(t[k]);
    ys.push_back(av);
  }
  FitWindow full{-1e300, 1e300};
  return -fit_decay(xs, ys, full).slope;
}

}  // namespace

ExpansionReport extract_expansion(const FieldPair& pair, FracParam par, bool subleading,
                                  FitWindow window) {
  check_same_grid(pair);
  if (subleading && !(par.s > 0.25))
    throw std::domain_error("extract_expansion: subleading extraction requires s > 1/4");
  const auto& g = pair.u.grid();
  const int n_t = g.n_t(), m = g.n_theta();
  if (window.t_lo == 0.0 && window.t_hi == 0.0) window = default_fit_window(g);

  std::vector<double> psih(m), psihv(m);
  for (int j = 0; j < m; ++j) psih[j] = cos_half_pow(g.theta_node(j), par.s);
  for (int j = 0; j < m; ++j) psihv[j] = psih[m - 1 - j];  // exact mirror
  double norm = 0.0;
  for (int j = 0; j < m; ++j) norm += g.theta_weight(j) * psih[j] * psih[j];

  LogPolarField ub = scaled_view(pair.u, par.s), vb = scaled_view(pair.v, par.s);
  std::vector<double> ts(n_t), fu(n_t), fv(n_t);
  for (int i = 0; i < n_t; ++i) {
    ts[i] = g.t_node(i);
    double au = 0.0, av = 0.0;
    for (int j = 0; j < m; ++j) {
      au += g.theta_weight(j) * ub.interior(i, j) * psih[j];
      av += g.theta_weight(j) * vb.interior(i, j) * psihv[j];
    }
    fu[i] = au / norm;
    fv[i] = av / norm;
  }

  ExpansionReport rep;
  rep.s = par.s;
  rep.window = window;
  const TwoTermFit fitu = fit_two_term(ts, fu, window);
  const TwoTermFit fitv = fit_two_term(ts, fv, window);
  rep.b_scale = fitu.b;
  rep.b_scale_v = fitv.b;
  rep.a_coeff = fitu.alpha;
  rep.b_coeff = fitv.alpha;
  rep.stderr_a = fitu.stderr_alpha;
  rep.stderr_b = fitv.stderr_alpha;
  rep.fit_rms_u = fitu.rms;
  rep.fit_rms_v = fitv.rms;
  rep.T = (rep.b_coeff - rep.a_coeff) / (2.0 * par.s);

  // deviation diagnostics (f(t) and sup envelope)
  std::vector<double> fdev(n_t), env(n_t);
  for (int i = 0; i < n_t; ++i) {
    fdev[i] = std::exp(ts[i]) * (fu[i] - rep.b_scale) - rep.a_coeff;
    double e = 0.0;
    for (int j = 0; j < m; ++j)
      e = std::max(e, std::abs(ub.interior(i, j) - rep.b_scale * psih[j]));
    env[i] = e;
  }
  rep.rate_f = rate_of_decay(ts, fdev, window);
  FitWindow full{-1e300, 1e300};
  std::vector<double> env_w, ts_w;
  for (int i = 0; i < n_t; ++i)
    if (ts[i] >= window.t_lo && ts[i] <= window.t_hi) {
      ts_w.push_back(ts[i]);
      env_w.push_back(env[i]);
    }
  rep.rate_envelope = -fit_decay(ts_w, env_w, full).slope;

  // trace decay slopes; segregated-limit fields have identically zero
  // minority traces, reported as NaN rather than a fit error
  std::vector<double> minority(n_t), majority(n_t), minority_dx(n_t);
  for (int i = 0; i < n_t; ++i) {
    minority[i] = pair.v.trace0(i);
    majority[i] = pair.u.trace0(i);
  }
  for (int i = 0; i < n_t; ++i) {
    double d;
    if (i == 0)
      d = (minority[1] - minority[0]) / g.h_t();
    else if (i == n_t - 1)
      d = (minority[i] - minority[i - 1]) / g.h_t();
    else
      d = (minority[i + 1] - minority[i - 1]) / (2.0 * g.h_t());
    minority_dx[i] = std::abs(d) * std::exp(-ts[i]);
  }
  auto slope_or_nan = [&](const std::vector<double>& vals) {
    try {
      return fit_decay(ts, vals, window).slope;
    } catch (const std::runtime_error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  rep.slope_minority = slope_or_nan(minority);
  rep.slope_minority_dx = slope_or_nan(minority_dx);
  rep.slope_majority = slope_or_nan(majority);
  return rep;
}

double interp_field(const LogPolarField& w, double t, double theta) {
  const auto& g = w.grid();
  const int n_t = g.n_t(), m = g.n_theta();
  if (t < g.t_min() - 1e-12 || t > g.t_max() + 1e-12 || theta < -1e-12 ||
      theta > M_PI + 1e-12)
    return std::numeric_limits<double>::quiet_NaN();

  // t stencil (uniform)
  int i1 = static_cast<int>(std::floor((t - g.t_min()) / g.h_t()));
  i1 = std::clamp(i1, 0, n_t - 2);
  const int i0 = std::clamp(i1 - 1, 0, n_t - 4);

  // theta stencil over the extended angle set [0, nodes..., pi]
  auto angle = [&](int jj) {
    if (jj == 0) return 0.0;
    if (jj == m + 1) return M_PI;
    return g.theta_node(jj - 1);
  };
  int j1 = 0;
  while (j1 + 1 < m + 1 && angle(j1 + 1) <= theta) ++j1;
  int j0 = std::min(std::max(j1 - 1, 0), m + 2 - 4);

  double acc = 0.0;
  for (int ii = 0; ii < 4; ++ii) {
    // Lagrange in theta at row i0+ii
    double row = 0.0;
    for (int jj = 0; jj < 4; ++jj) {
      double l = 1.0;
      for (int kk = 0; kk < 4; ++kk) {
        if (kk == jj) continue;
        l *= (theta - angle(j0 + kk)) / (angle(j0 + jj) - angle(j0 + kk));
      }
      row += l * w.at(i0 + ii, j0 + jj);
    }
    double lt = 1.0;
    const double ti = g.t_node(i0 + ii);
    for (int kk = 0; kk < 4; ++kk) {
      if (kk == ii) continue;
      lt *= (t - g.t_node(i0 + kk)) / (ti - g.t_node(i0 + kk));
    }
    acc += lt * row;
  }
  return acc;
}

FieldPair shift_x(const FieldPair& pair, double dx) {
  check_same_grid(pair);
  GridPtr gp = pair.u.grid_ptr();
  const auto& g = *gp;
  FieldPair out{LogPolarField(gp, pair.u.kind()), LogPolarField(gp, pair.v.kind())};
  for (int i = 0; i < g.n_t(); ++i) {
    const double r = std::exp(g.t_node(i));
    for (int jj = 0; jj < g.n_cols(); ++jj) {
      const double theta = (jj == 0) ? 0.0
                           : (jj == g.n_theta() + 1) ? M_PI
                                                     : g.theta_node(jj - 1);
      const double x = r * std::cos(theta) + dx;
      const double y = r * std::sin(theta);
      const double rr = std::hypot(x, y);
      const double tt = std::log(rr);
      const double th = std::atan2(y, x);
      out.u.at(i, jj) = interp_field(pair.u, tt, th);
      out.v.at(i, jj) = interp_field(pair.v, tt, th);
    }
  }
  return out;
}

AlignResult align_translation(const ExpansionReport& rep1, const ExpansionReport& rep2,
                              const FieldPair& pair1, const FieldPair& pair2,
                              double hyp_tol) {
  if (std::abs(rep1.s - rep2.s) > 1e-12)
    throw std::invalid_argument("align_translation: exponents differ");
  if (std::abs(rep1.b_scale - rep2.b_scale) > 0.01 * std::abs(rep2.b_scale))
    throw std::invalid_argument("align_translation: leading coefficients differ by > 1%");
  const double sum1 = rep1.a_coeff + rep1.b_coeff;
  const double sum2 = rep2.a_coeff + rep2.b_coeff;
  if (std::abs(sum1 - sum2) > hyp_tol)
    throw std::invalid_argument(
        "align_translation: a+b invariants disagree beyond tolerance");

  AlignResult out;
  out.t0 = (rep2.a_coeff - rep1.a_coeff) / rep1.s;
  FieldPair shifted = shift_x(pair1, out.t0);
  const auto& g = pair2.u.grid();
  const double scale = std::max(pair2.u.max_abs(), pair2.v.max_abs());
  double worst = 0.0;
  int cnt = 0;
  for (int i = 0; i < g.n_t(); ++i)
    for (int jj = 0; jj < g.n_cols(); ++jj) {
      const double su = shifted.u.at(i, jj), sv = shifted.v.at(i, jj);
      if (!std::isfinite(su) || !std::isfinite(sv)) continue;
      worst = std::max(worst, std::abs(su - pair2.u.at(i, jj)));
      worst = std::max(worst, std::abs(sv - pair2.v.at(i, jj)));
      ++cnt;
    }
  out.sup_mismatch = worst / scale;
  out.compared_nodes = cnt;
  return out;
}

}  // namespace fracseg
