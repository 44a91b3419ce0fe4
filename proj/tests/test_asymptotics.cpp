#include <doctest.h>

#include <cmath>
#include <memory>

#include "fracseg/asymptotics.hpp"
#include "fracseg/solver.hpp"
#include "fracseg/spectral.hpp"

using namespace fracseg;

namespace {

FieldPair h1_normalized_pair(FracParam par, GridPtr g) {
  FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  const int k = g->t_index(0.0);
  double h1 = 0.0;
  for (int j = 0; j < g->n_theta(); ++j) {
    const double uu = pair.u.interior(k, j), vv = pair.v.interior(k, j);
    h1 += g->theta_weight(j) * (uu * uu + vv * vv);
  }
  const double c = 1.0 / std::sqrt(h1);
  for (double& v : pair.u.raw()) v *= c;
  for (double& v : pair.v.raw()) v *= c;
  return pair;
}

// synthetic field with leading coefficient 1 and known subleading c
FieldPair synthetic_pair(FracParam par, GridPtr g, double c) {
  FieldPair pair{LogPolarField(g), LogPolarField(g)};
  const double s = par.s;
  pair.u.sample([&](double t, double th) {
    return (std::exp(s * t) + c * std::exp((s - 1.0) * t)) * cos_half_pow(th, s);
  });
  pair.v.sample([&](double t, double th) {
    return (std::exp(s * t) + c * std::exp((s - 1.0) * t)) * sin_half_pow(th, s);
  });
  return pair;
}

const FieldPair& shared_coarse_profile(FracParam par) {
  static std::unique_ptr<FieldPair> cached;
  if (!cached) {
    SolverConfig sc;
    sc.t_min = -5.0;
    sc.t_max = 3.0;
    sc.n_t = 201;
    sc.n_theta = 64;
    sc.t_max_schedule = {1.0, 3.0};
    auto [pair, rep] = solve_profile(par, sc);
    cached = std::make_unique<FieldPair>(std::move(pair));
  }
  return *cached;
}

}  // namespace

TEST_CASE("blowdown scaling on the normalized exact pair") {
  const FracParam par = make_params(0.5);
  GridPtr g = build_grid(-4.0, 2.0, 241, 96, par);
  FieldPair pair = h1_normalized_pair(par, g);

  BlowdownScaling sc1 = blowdown_scaling(pair, 1.0, true);
  CHECK(sc1.L == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sc1.kappa == doctest::Approx(1.0).epsilon(1e-12));

  const double R = std::exp(1.0);
  BlowdownScaling sc = blowdown_scaling(pair, R, true);
  CHECK(sc.L == doctest::Approx(std::pow(R, par.s)).epsilon(1e-10));
  CHECK(sc.kappa == doctest::Approx(std::pow(R, 4.0 * par.s)).epsilon(1e-10));
  // kappa = L^2 R^{1-a} exactly by construction
  CHECK(sc.kappa == sc.L * sc.L * std::pow(R, 1.0 - par.a));

  FieldPair resc = blowdown_rescale(pair, sc);
  CHECK(resc.u.grid().t_min() == doctest::Approx(g->t_min() - 1.0));

  GridPtr gz = build_grid(-1.0, 1.0, 17, 16, par);
  FieldPair zero{LogPolarField(gz), LogPolarField(gz)};
  CHECK_THROWS_AS(blowdown_scaling(zero, 1.0, true), std::runtime_error);
}

TEST_CASE("kappa_R increases on the converged profile") {
  const FracParam par = make_params(0.5);
  const FieldPair& pair = shared_coarse_profile(par);
  const auto& g = pair.u.grid();
  double prev = 0.0;
  for (int k = g.t_index(-2.0); k <= g.t_index(2.0); k += 10) {
    BlowdownScaling sc = blowdown_scaling(pair, std::exp(g.t_node(k)), true);
    CHECK(sc.kappa > prev);
    prev = sc.kappa;
  }
}

TEST_CASE("Emden-Fowler residual distinguishes the modes") {
  const FracParam par = make_params(0.6);
  // exact pair: ubar is t-independent, interior residual shrinks under refinement
  double prev = 1e300;
  for (int lvl = 0; lvl < 2; ++lvl) {
    GridPtr g = build_grid(-1.0, 1.0, 41 * (1 << lvl), 48 * (1 << lvl), par);
    FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
    EFResidual res = emden_fowler_residual(pair, par);
    CHECK(res.interior_l2 < prev);
    prev = res.interior_l2;
  }

  // w = e^{st} psi_2 gives residual (s(1-s) - lambda_2) psi_2 exactly
  const int m = 48;
  EigenSet set = solve_mixed_eigen(par, 2, m);
  GridPtr g = build_grid(-1.0, 1.0, 41, m, par);
  FieldPair pair{LogPolarField(g), LogPolarField(g)};
  for (int i = 0; i < g->n_t(); ++i) {
    const double amp = std::exp(par.s * g->t_node(i));
    for (int j = 0; j < m; ++j) pair.u.interior(i, j) = amp * set.psi[1][j];
    pair.u.at(i, 0) = amp * set.psi[1][0];        // zero-flux trace value
    pair.u.at(i, m + 1) = 0.0;                    // Dirichlet end
  }
  EFResidual res = emden_fowler_residual(pair, par);
  double psi_sup = 0.0;
  for (double v : set.psi[1]) psi_sup = std::max(psi_sup, std::abs(v));
  const double expected = std::abs(par.s * (1.0 - par.s) - set.lambda[1]) * psi_sup;
  CHECK(res.interior_sup == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("fit_decay on synthetic log-linear data") {
  const FracParam par = make_params(0.4);
  GridPtr g = build_grid(-2.0, 3.0, 101, 16, par);
  std::vector<double> ts(g->n_t()), vals(g->n_t());
  for (int i = 0; i < g->n_t(); ++i) {
    ts[i] = g->t_node(i);
    vals[i] = std::exp(-3.0 * par.s * ts[i]);
  }
  FitResult fit = fit_decay(ts, vals, FitWindow{-1.0, 2.0});
  CHECK(fit.slope == doctest::Approx(-3.0 * par.s).epsilon(1e-12));
  CHECK(fit.stderr_ <= 1e-12);
  vals[50] = -1.0;
  CHECK_THROWS_AS(fit_decay(ts, vals, FitWindow{-1.0, 2.0}), std::runtime_error);
}

TEST_CASE("expansion extraction on synthetic and exact fields") {
  const FracParam par = make_params(0.5);
  GridPtr g = build_grid(-4.0, 3.0, 281, 96, par);

  // exact pair: no subleading content
  FieldPair exact = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  ExpansionReport r0 = extract_expansion(exact, par);
  CHECK(r0.b_scale == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(r0.a_coeff) <= 1e-10);
  CHECK(std::abs(r0.b_coeff) <= 1e-10);

  // synthetic subleading coefficient is recovered
  const double c = 0.31;
  FieldPair syn = synthetic_pair(par, g, c);
  ExpansionReport r1 = extract_expansion(syn, par);
  CHECK(r1.b_scale == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r1.a_coeff == doctest::Approx(c).epsilon(1e-8));
  CHECK(r1.b_coeff == doctest::Approx(c).epsilon(1e-8));
  CHECK(r1.T == doctest::Approx(0.0).epsilon(1e-9));

  // swap symmetry: mirrored swapped pair reports (b,a)
  FieldPair swapped{LogPolarField(g), LogPolarField(g)};
  for (int i = 0; i < g->n_t(); ++i)
    for (int jj = 0; jj < g->n_cols(); ++jj) {
      swapped.u.at(i, jj) = syn.v.at(i, g->n_cols() - 1 - jj);
      swapped.v.at(i, jj) = syn.u.at(i, g->n_cols() - 1 - jj);
    }
  ExpansionReport r2 = extract_expansion(swapped, par);
  CHECK(r2.a_coeff == r1.b_coeff);
  CHECK(r2.b_coeff == r1.a_coeff);

  // dilation t -> t + log(lambda), field / lambda^s divides the coefficient
  const double lam = std::exp(0.1);
  GridPtr g2 = build_grid(g->t_min() - 0.1, g->t_max() - 0.1, g->n_t(), g->n_theta(), par);
  FieldPair dil{LogPolarField(g2), LogPolarField(g2)};
  const double amp = std::pow(lam, -par.s);
  for (int i = 0; i < g->n_t(); ++i)
    for (int jj = 0; jj < g->n_cols(); ++jj) {
      dil.u.at(i, jj) = amp * syn.u.at(i, jj);
      dil.v.at(i, jj) = amp * syn.v.at(i, jj);
    }
  ExpansionReport r3 = extract_expansion(dil, par);
  CHECK(r3.a_coeff == doctest::Approx(c / lam).epsilon(1e-6));

  // hypothesis guard of the paper's range
  CHECK_THROWS_AS(extract_expansion(syn, make_params(0.2), true), std::domain_error);
}

TEST_CASE("align_translation identity and known shift") {
  const FracParam par = make_params(0.5);
  GridPtr g = build_grid(-4.0, 3.0, 281, 96, par);
  const double c = 0.2;
  FieldPair p1 = synthetic_pair(par, g, c);
  ExpansionReport r1 = extract_expansion(p1, par);

  AlignResult id = align_translation(r1, r1, p1, p1);
  CHECK(id.t0 == 0.0);
  CHECK(id.sup_mismatch <= 1e-12);

  // analytic x-translate by dx
  const double dx = 0.2;
  FieldPair p2{LogPolarField(g), LogPolarField(g)};
  auto prof_u = [&](double x, double y) {
    const double r = std::hypot(x, y), th = std::atan2(y, x);
    return (std::pow(r, par.s) + c * std::pow(r, par.s - 1.0)) * cos_half_pow(th, par.s);
  };
  auto prof_v = [&](double x, double y) {
    const double r = std::hypot(x, y), th = std::atan2(y, x);
    return (std::pow(r, par.s) + c * std::pow(r, par.s - 1.0)) * sin_half_pow(th, par.s);
  };
  p2.u.sample([&](double t, double th) {
    return prof_u(std::exp(t) * std::cos(th) + dx, std::exp(t) * std::sin(th));
  });
  p2.v.sample([&](double t, double th) {
    return prof_v(std::exp(t) * std::cos(th) + dx, std::exp(t) * std::sin(th));
  });
  ExpansionReport r2 = extract_expansion(p2, par);
  // translated expansion shifts the coefficients by +- s dx
  CHECK(r2.a_coeff - r1.a_coeff == doctest::Approx(par.s * dx).epsilon(0.02));
  CHECK(r1.b_coeff - r2.b_coeff == doctest::Approx(par.s * dx).epsilon(0.02));

  AlignResult al = align_translation(r1, r2, p1, p2);
  CHECK(al.t0 == doctest::Approx(dx).epsilon(0.02));
  CHECK(al.sup_mismatch <= 5e-4);

  // hypothesis error when the a+b invariants disagree
  ExpansionReport bad = r2;
  bad.a_coeff += 0.5;
  CHECK_THROWS_AS(align_translation(r1, bad, p1, p2), std::invalid_argument);
}

TEST_CASE("radial gradient bound exponent on the converged profile") {
  const FracParam par = make_params(0.5);
  const FieldPair& pair = shared_coarse_profile(par);
  const auto& g = pair.u.grid();
  // sup_theta |u_r| ~ r^{s-1}: fitted slope of e^{-t} sup|w_t| near the outer end
  std::vector<double> ts, vals;
  for (int i = 1; i + 1 < g.n_t(); ++i) {
    const double t = g.t_node(i);
    if (t < -1.0 || t > 2.4) continue;
    double sup = 0.0;
    for (int j = 0; j < g.n_theta(); ++j)
      sup = std::max(sup, std::abs(pair.u.interior(i + 1, j) - pair.u.interior(i - 1, j)) /
                              (2.0 * g.h_t()));
    ts.push_back(t);
    vals.push_back(sup * std::exp(-t));
  }
  FitResult fit = fit_decay(ts, vals, FitWindow{-1.0, 2.4});
  CHECK(fit.slope == doctest::Approx(par.s - 1.0).epsilon(0.35));
}
