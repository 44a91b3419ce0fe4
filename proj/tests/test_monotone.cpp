#include <doctest.h>

#include <cmath>

#include "fracseg/monotone.hpp"
#include "fracseg/spectral.hpp"

using namespace fracseg;

namespace {

// H(1) = 1 normalization of the exact pair
FieldPair normalized_exact_pair(FracParam par, GridPtr g) {
  FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  double h1 = 0.0;
  const int k = g->t_index(0.0);
  for (int j = 0; j < g->n_theta(); ++j) {
    const double uu = pair.u.interior(k, j), vv = pair.v.interior(k, j);
    h1 += g->theta_weight(j) * (uu * uu + vv * vv);
  }
  const double c = 1.0 / std::sqrt(h1);
  for (double& v : pair.u.raw()) v *= c;
  for (double& v : pair.v.raw()) v *= c;
  return pair;
}

}  // namespace

TEST_CASE("N is identically s on the exact pair") {
  for (double s : {0.3, 0.5, 0.75}) {
    const FracParam par = make_params(s);
    GridPtr g = build_grid(-17.0, 1.0, 4501, 1024, par);
    FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
    FrequencyTrace tr = frequency_trace(pair, par);
    double worst = 0.0;
    for (size_t k = 0; k < tr.r.size(); ++k) {
      const double t = std::log(tr.r[k]);
      if (t < -2.0) continue;  // below this the inner truncation tail bites
      worst = std::max(worst, std::abs(tr.N[k] - s));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("H growth law on the normalized exact pair") {
  const FracParam par = make_params(0.5);
  GridPtr g = build_grid(-4.0, 1.0, 501, 256, par);
  FieldPair pair = normalized_exact_pair(par, g);
  FrequencyTrace tr = frequency_trace(pair, par);
  for (size_t k = 0; k < tr.r.size(); ++k)
    CHECK(tr.H[k] == doctest::Approx(std::pow(tr.r[k], 2.0 * par.s)).epsilon(1e-10));
  // in particular H(2) = 2 at s = 1/2 (nearest grid radius)
  const int k2 = g->t_index(std::log(2.0)) ;
  CHECK(tr.H[k2] == doctest::Approx(std::pow(tr.r[k2], 1.0)).epsilon(1e-10));
  // log-slope of H dominates 2N
  const auto slope = log_h_slope(tr);
  for (size_t k = 1; k + 1 < slope.size(); ++k)
    CHECK(slope[k] >= 2.0 * tr.N[k] - 1e-6);
}

TEST_CASE("scaling invariance of the frequency trace") {
  const FracParam par = make_params(0.65);
  GridPtr g = build_grid(-6.0, 1.0, 401, 128, par);
  FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  // perturb so the field is not exactly homogeneous
  for (int i = 0; i < g->n_t(); ++i)
    for (int jj = 0; jj < g->n_cols(); ++jj) {
      const double t = g->t_node(i);
      pair.u.at(i, jj) *= 1.0 + 0.05 * std::exp(-(t * t));
      pair.v.at(i, jj) *= 1.0 + 0.03 * std::sin(t);
    }
  FrequencyTrace tr = frequency_trace(pair, par);

  const double lam = std::exp(0.25);  // shift by a fraction of h to land on nodes?
  // t-shift by exactly 10 grid steps, amplitude factor lam^s
  const double shift = 10 * g->h_t();
  GridPtr g2 = build_grid(g->t_min() - shift, g->t_max() - shift, g->n_t(),
                          g->n_theta(), par);
  FieldPair scaled{LogPolarField(g2), LogPolarField(g2)};
  const double amp = std::exp(par.s * shift);
  for (int i = 0; i < g->n_t(); ++i)
    for (int jj = 0; jj < g->n_cols(); ++jj) {
      scaled.u.at(i, jj) = amp * pair.u.at(i, jj);
      scaled.v.at(i, jj) = amp * pair.v.at(i, jj);
    }
  FrequencyTrace tr2 = frequency_trace(scaled, par);
  (void)lam;
  for (size_t k = 0; k < tr.r.size(); ++k) {
    CHECK(tr2.N[k] == doctest::Approx(tr.N[k]).epsilon(1e-10));
    CHECK(tr2.r[k] == doctest::Approx(tr.r[k] * std::exp(-shift)).epsilon(1e-12));
  }
}

TEST_CASE("Pohozaev residual vanishes on the exact pair with order >= 1") {
  const FracParam par = make_params(0.6);
  std::vector<double> errs, hs;
  for (int lvl = 0; lvl < 3; ++lvl) {
    GridPtr g = build_grid(-7.0, 1.0, 161 * (1 << lvl) + 1, 64 * (1 << lvl), par);
    FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
    double worst = 0.0;
    for (int k = 0; k < g->n_t(); ++k) {
      const double t = g->t_node(k);
      if (t < -4.0 || t > -0.5) continue;
      worst = std::max(worst,
                       std::abs(pohozaev_residual_relative(pair, par, std::exp(t))));
    }
    errs.push_back(worst);
    hs.push_back(g->h_t());
  }
  CHECK(errs.back() <= 1e-3);
  const double order =
      std::log(errs.front() / errs.back()) / std::log(hs.front() / hs.back());
  CHECK(order >= 1.0);

  // zero fields: identically zero identity
  GridPtr g = build_grid(-2.0, 1.0, 61, 32, par);
  FieldPair zero{LogPolarField(g), LogPolarField(g)};
  CHECK(pohozaev_residual(zero, par, 1.0) == 0.0);
}

TEST_CASE("doubling inequality") {
  const FracParam par = make_params(0.45);
  GridPtr g = build_grid(-5.0, 1.0, 301, 96, par);
  FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  FrequencyTrace tr = frequency_trace(pair, par);
  // with d = s the ratio equals (r2/r1)^{2s} and the slack factor exceeds 1
  CHECK(doubling_check(tr, par.s) <= 0.0);
  CHECK_THROWS_AS(doubling_check(tr, 0.5 * par.s), std::invalid_argument);
}

TEST_CASE("ACF self-consistency on the exact pair") {
  const FracParam par = make_params(0.5);
  GridPtr g = build_grid(-8.0, 2.0, 501, 128, par);
  FieldPair pair = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
  AcfResult acf = acf_trace(pair, par, 0.0);
  CHECK(acf.b_est == doctest::Approx(1.0).epsilon(1e-6));
  // J is nondecreasing for the truncated cumulative energies
  for (size_t k = 0; k + 1 < acf.J.size(); ++k)
    CHECK(acf.J[k + 1] >= acf.J[k] - 1e-8);
  // a level that wipes out a field is rejected
  CHECK_THROWS_AS(acf_trace(pair, par, 1e9), std::domain_error);
  // nonzero truncation below the inner trace scale is rejected
  CHECK_THROWS_AS(acf_trace(pair, par, 1e-12), std::domain_error);
}
