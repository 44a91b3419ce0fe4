#include "fracseg/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracseg/la_operator.hpp"
#include "fracseg/spectral.hpp"

namespace fracseg {

void SolverConfig::validate() const {
  if (!(t_min < t_max)) throw std::invalid_argument("solver: t_min < t_max required");
  if (n_t < 8 || n_theta < 8) throw std::invalid_argument("solver: grid counts >= 8");
  if (!(tol > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
  if (!(damping > 0.0 && damping <= 1.0))
    throw std::invalid_argument("solver: damping must lie in (0,1]");
  if (max_newton < 1) throw std::invalid_argument("solver: max_newton >= 1");
  for (size_t k = 1; k < t_max_schedule.size(); ++k)
    if (!(t_max_schedule[k] > t_max_schedule[k - 1]))
      throw std::invalid_argument("solver: schedule must be strictly increasing");
  if (init == InitGuess::custom && custom_init == nullptr)
    throw std::invalid_argument("solver: custom init requires custom_init fields");
}

std::pair<std::vector<double>, std::vector<double>> farfield_data(FracParam par,
                                                                  double t_max,
                                                                  const LogPolarGrid& g) {
  const double amp = std::exp(par.s * t_max);
  const int cols = g.n_cols();
  std::vector<double> du(cols), dv(cols);
  du[0] = amp;
  for (int j = 0; j < g.n_theta(); ++j)
    du[j + 1] = amp * cos_half_pow(g.theta_node(j), par.s);
  du[cols - 1] = 0.0;
  // exact column mirror keeps the discrete system bitwise u<->v symmetric
  for (int jj = 0; jj < cols; ++jj) dv[jj] = du[cols - 1 - jj];
  return {du, dv};
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

// Discrete nonlinear system for one grid: interleaved unknowns
// x[(i*cols + jj)*2 + field].
struct SolveSystem {
  GridPtr grid;
  FracParam par;
  DiscreteOperator op;  // t-weight e^{a t}, no zeroth term
  std::vector<double> data_u, data_v;
  std::vector<double> trace_coef;  // e^{(1-a) t_i}
  int cols, n_t, n_theta, n_unknowns;

  SolveSystem(GridPtr g, FracParam p)
      : grid(g), par(p), op(g, p.a, 0.0) {
    cols = g->n_cols();
    n_t = g->n_t();
    n_theta = g->n_theta();
    n_unknowns = 2 * n_t * cols;
    auto data = farfield_data(par, g->t_max(), *g);
    data_u = std::move(data.first);
    data_v = std::move(data.second);
    trace_coef.resize(n_t);
    for (int i = 0; i < n_t; ++i)
      trace_coef[i] = std::exp((1.0 - par.a) * g->t_node(i));
  }

  int idx(int f, int i, int jj) const { return (i * cols + jj) * 2 + f; }

  void pack(const FieldPair& pair, std::vector<double>& x) const {
    x.resize(n_unknowns);
    for (int i = 0; i < n_t; ++i)
      for (int jj = 0; jj < cols; ++jj) {
        x[idx(0, i, jj)] = pair.u.at(i, jj);
        x[idx(1, i, jj)] = pair.v.at(i, jj);
      }
  }

  void unpack(const std::vector<double>& x, FieldPair& pair) const {
    for (int i = 0; i < n_t; ++i)
      for (int jj = 0; jj < cols; ++jj) {
        pair.u.at(i, jj) = x[idx(0, i, jj)];
        pair.v.at(i, jj) = x[idx(1, i, jj)];
      }
  }

  const double& xv(const std::vector<double>& x, int f, int i, int jj) const {
    return x[idx(f, i, jj)];
  }

  // residual and, when trips != nullptr, the Jacobian triplets
  void assemble(const std::vector<double>& x, std::vector<double>& F,
                std::vector<Trip>* trips) const {
    const auto& g = *grid;
    F.assign(n_unknowns, 0.0);
    auto add = [&](int r, int c, double v) {
      if (trips) trips->emplace_back(r, c, v);
    };
    for (int f = 0; f < 2; ++f) {
      const std::vector<double>& dat = (f == 0) ? data_u : data_v;
      const int of = 1 - f;  // partner field
      for (int i = 0; i < n_t; ++i) {
        if (i == n_t - 1) {  // outer Dirichlet row, all columns
          for (int jj = 0; jj < cols; ++jj) {
            const int r = idx(f, i, jj);
            F[r] = xv(x, f, i, jj) - dat[jj];
            add(r, r, 1.0);
          }
          continue;
        }
        // interior finite-volume rows
        for (int j = 0; j < n_theta; ++j) {
          const int jj = j + 1;
          const int r = idx(f, i, jj);
          const double mass = op.t_mass(i) * g.theta_weight(j);
          const double tdn = op.t_mass(i) * op.theta_face(j) / mass;
          const double tup = op.t_mass(i) * op.theta_face(j + 1) / mass;
          double diag = tdn + tup;
          double acc = tdn * (xv(x, f, i, jj) - xv(x, f, i, jj - 1)) +
                       tup * (xv(x, f, i, jj) - xv(x, f, i, jj + 1));
          add(r, idx(f, i, jj - 1), -tdn);
          add(r, idx(f, i, jj + 1), -tup);
          if (i > 0) {
            const double sdn = g.theta_weight(j) * op.t_face(i - 1) / mass;
            acc += sdn * (xv(x, f, i, jj) - xv(x, f, i - 1, jj));
            add(r, idx(f, i - 1, jj), -sdn);
            diag += sdn;
          }
          const double sup = g.theta_weight(j) * op.t_face(i) / mass;
          acc += sup * (xv(x, f, i, jj) - xv(x, f, i + 1, jj));
          add(r, idx(f, i + 1, jj), -sup);
          diag += sup;
          add(r, r, diag);
          F[r] = acc;
        }
        // trace rows: weighted normal trace equals the nonlinear coupling
        for (int side = 0; side < 2; ++side) {
          const int jb = (side == 0) ? 0 : cols - 1;
          const int jn = (side == 0) ? 1 : cols - 2;
          const double T = (side == 0) ? op.theta_face(0) : op.theta_face(n_theta);
          const int r = idx(f, i, jb);
          const double wb = xv(x, f, i, jb);
          const double pb = xv(x, of, i, jb);
          const double c = trace_coef[i];
          F[r] = T * (xv(x, f, i, jn) - wb) - c * wb * pb * pb;
          add(r, idx(f, i, jn), T);
          add(r, idx(f, i, jb), -T - c * pb * pb);
          add(r, idx(of, i, jb), -2.0 * c * wb * pb);
        }
      }
    }
  }
};

double scaled_resnorm(const SolveSystem& sys, const std::vector<double>& F,
                      const std::vector<double>& rowscale, double field_scale) {
  double m = 0.0;
  for (int r = 0; r < sys.n_unknowns; ++r)
    m = std::max(m, std::abs(F[r]) / rowscale[r]);
  return m / field_scale;
}

std::vector<double> row_scales(const SolveSystem& sys, const std::vector<Trip>& trips) {
  std::vector<double> rs(sys.n_unknowns, 0.0);
  for (const auto& t : trips) rs[t.row()] = std::max(rs[t.row()], std::abs(t.value()));
  for (double& v : rs)
    if (v == 0.0) v = 1.0;
  return rs;
}

// one damped Newton solve at fixed domain; x holds the initial iterate
void newton_solve(const SolveSystem& sys, std::vector<double>& x, const SolverConfig& cfg,
                  SolveReport& report) {
  const double field_scale = std::exp(sys.par.s * sys.grid->t_max());
  std::vector<double> F, F_try;
  std::vector<Trip> trips;
  Eigen::SparseLU<SpMat> lu;
  SpMat J(sys.n_unknowns, sys.n_unknowns);
  bool pattern_done = false;

  sys.assemble(x, F, &trips);
  std::vector<double> rowscale = row_scales(sys, trips);
  double res = scaled_resnorm(sys, F, rowscale, field_scale);
  report.residual_history.push_back(res);
  const bool debug = std::getenv("FRACSEG_DEBUG") != nullptr;
  if (debug) {
    // finite-difference audit of a few Jacobian columns
    std::vector<double> F0(F), F1;
    const double h = 1e-7 * field_scale;
    for (int probe : {sys.idx(0, 1, 1), sys.idx(0, 5, 0), sys.idx(1, 5, 0),
                      sys.idx(0, 5, sys.cols - 1), sys.idx(1, 7, sys.cols - 1),
                      sys.idx(0, 3, 7), sys.idx(1, sys.n_t - 2, 3)}) {
      std::vector<double> xp(x);
      xp[probe] += h;
      sys.assemble(xp, F1, nullptr);
      // gather analytic column
      std::vector<std::pair<int, double>> fd;
      for (int r = 0; r < sys.n_unknowns; ++r) {
        const double d = (F1[r] - F0[r]) / h;
        if (std::abs(d) > 1e-6) fd.emplace_back(r, d);
      }
      for (auto& [r, d] : fd) {
        double jval = 0.0;
        for (const auto& t : trips)
          if (t.row() == r && t.col() == probe) jval += t.value();
        if (std::abs(jval - d) > 1e-3 * (1.0 + std::abs(d)))
          std::fprintf(stderr, "  FD mismatch: row=%d col=%d J=%.6g FD=%.6g\n", r,
                       probe, jval, d);
      }
    }
    std::fprintf(stderr, "  FD audit done\n");
  }

  for (int it = 0; it < cfg.max_newton; ++it) {
    if (res <= cfg.tol) break;
    // scaled linear system J dx = -F
    std::vector<Trip> scaled;
    scaled.reserve(trips.size());
    for (const auto& t : trips)
      scaled.emplace_back(t.row(), t.col(), t.value() / rowscale[t.row()]);
    J.setFromTriplets(scaled.begin(), scaled.end());
    if (!pattern_done) {
      lu.analyzePattern(J);
      pattern_done = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve_profile: Jacobian factorization failed");
    Eigen::VectorXd rhs(sys.n_unknowns);
    for (int r = 0; r < sys.n_unknowns; ++r) rhs(r) = -F[r] / rowscale[r];
    Eigen::VectorXd dx = lu.solve(rhs);

    double lam = cfg.damping;
    bool accepted = false;
    std::vector<double> x_try(sys.n_unknowns);
    for (int bt = 0; bt < 12 && !accepted; ++bt, lam *= 0.5) {
      for (int r = 0; r < sys.n_unknowns; ++r) x_try[r] = x[r] + lam * dx(r);
      double mn = 0.0;
      for (double v : x_try) mn = std::min(mn, v);
      if (mn < -0.05 * field_scale) continue;  // positivity guard
      sys.assemble(x_try, F_try, nullptr);
      const double res_try = scaled_resnorm(sys, F_try, rowscale, field_scale);
      if (res_try < res) {
        x.swap(x_try);
        res = res_try;
        accepted = true;
      }
    }
    ++report.iterations;
    if (!accepted) {
      // nonlinear block Gauss-Seidel fallback: freeze the partner field in
      // the trace coupling and solve each field linearly
      for (int f = 0; f < 2; ++f) {
        std::vector<Trip> lt;
        Eigen::VectorXd lb(sys.n_t * sys.cols);
        const auto& g = *sys.grid;
        const std::vector<double>& dat = (f == 0) ? sys.data_u : sys.data_v;
        auto lid = [&](int i, int jj) { return i * sys.cols + jj; };
        for (int i = 0; i < sys.n_t; ++i) {
          if (i == sys.n_t - 1) {
            for (int jj = 0; jj < sys.cols; ++jj) {
              lt.emplace_back(lid(i, jj), lid(i, jj), 1.0);
              lb(lid(i, jj)) = dat[jj];
            }
            continue;
          }
          for (int j = 0; j < sys.n_theta; ++j) {
            const int jj = j + 1;
            const int r = lid(i, jj);
            const double mass = sys.op.t_mass(i) * g.theta_weight(j);
            double diag = 0.0;
            auto link = [&](int ci, int cjj, double w) {
              lt.emplace_back(r, lid(ci, cjj), -w);
              diag += w;
            };
            link(i, jj - 1, sys.op.t_mass(i) * sys.op.theta_face(j) / mass);
            link(i, jj + 1, sys.op.t_mass(i) * sys.op.theta_face(j + 1) / mass);
            if (i > 0) link(i - 1, jj, g.theta_weight(j) * sys.op.t_face(i - 1) / mass);
            link(i + 1, jj, g.theta_weight(j) * sys.op.t_face(i) / mass);
            lt.emplace_back(r, r, diag);
            lb(r) = 0.0;
          }
          for (int side = 0; side < 2; ++side) {
            const int jb = (side == 0) ? 0 : sys.cols - 1;
            const int jn = (side == 0) ? 1 : sys.cols - 2;
            const double T = (side == 0) ? sys.op.theta_face(0)
                                         : sys.op.theta_face(sys.n_theta);
            const int r = lid(i, jb);
            const double pb = sys.xv(x, 1 - f, i, jb);
            lt.emplace_back(r, lid(i, jn), T);
            lt.emplace_back(r, lid(i, jb), -T - sys.trace_coef[i] * pb * pb);
            lb(r) = 0.0;
          }
        }
        SpMat L(sys.n_t * sys.cols, sys.n_t * sys.cols);
        L.setFromTriplets(lt.begin(), lt.end());
        Eigen::SparseLU<SpMat> flu;
        flu.compute(L);
        if (flu.info() != Eigen::Success)
          throw std::runtime_error("solve_profile: Gauss-Seidel sweep failed");
        Eigen::VectorXd sol = flu.solve(lb);
        for (int i = 0; i < sys.n_t; ++i)
          for (int jj = 0; jj < sys.cols; ++jj)
            x[sys.idx(f, i, jj)] = sol(lid(i, jj));
      }
      sys.assemble(x, F, &trips);
      rowscale = row_scales(sys, trips);
      const double res_gs = scaled_resnorm(sys, F, rowscale, field_scale);
      if (res_gs >= res)
        throw std::runtime_error("solve_profile: no progress after fallback sweep");
      res = res_gs;
      report.residual_history.push_back(res);
      continue;
    }
    sys.assemble(x, F, &trips);
    rowscale = row_scales(sys, trips);
    res = scaled_resnorm(sys, F, rowscale, field_scale);
    report.residual_history.push_back(res);
    if (debug) {
      int argmax = 0;
      double m = 0.0;
      for (int r = 0; r < sys.n_unknowns; ++r)
        if (std::abs(F[r]) / rowscale[r] > m) { m = std::abs(F[r]) / rowscale[r]; argmax = r; }
      const int node = argmax / 2, f = argmax % 2;
      std::fprintf(stderr, "  it=%d res=%.3e lam_used worst row: field=%d i=%d jj=%d\n",
                   it, res, f, node / sys.cols, node % sys.cols);
    }
  }
  report.final_residual = res;
  if (res > cfg.tol)
    throw std::runtime_error("solve_profile: Newton did not reach tolerance, residual=" +
                             std::to_string(res));
}

}  // namespace

std::pair<FieldPair, SolveReport> solve_profile(FracParam par, const SolverConfig& cfg) {
  cfg.validate();
  const double h_t = (cfg.t_max - cfg.t_min) / (cfg.n_t - 1);
  std::vector<double> schedule = cfg.t_max_schedule;
  if (schedule.empty()) schedule = {cfg.t_max};
  if (std::abs(schedule.back() - cfg.t_max) > 1e-12)
    throw std::invalid_argument("solver: schedule must end at t_max");

  SolveReport report;
  FieldPair prev;  // previous stage solution
  bool have_prev = false;

  for (double stage_tmax : schedule) {
    int n_t = static_cast<int>(std::lround((stage_tmax - cfg.t_min) / h_t)) + 1;
    n_t = std::max(n_t, 8);
    const double tmax_snap = cfg.t_min + (n_t - 1) * h_t;
    GridPtr g = build_grid(cfg.t_min, tmax_snap, n_t, cfg.n_theta, par);
    SolveSystem sys(g, par);

    FieldPair guess = exact_homogeneous_pair(par, HomogeneousBranch::segregated, g);
    if (!have_prev && cfg.init == InitGuess::perturbed) {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> uni(-cfg.perturb_amp, cfg.perturb_amp);
      for (int i = 0; i + 1 < g->n_t(); ++i)
        for (int jj = 0; jj < g->n_cols(); ++jj) {
          guess.u.at(i, jj) *= 1.0 + uni(rng);
          guess.v.at(i, jj) *= 1.0 + uni(rng);
        }
    } else if (!have_prev && cfg.init == InitGuess::custom) {
      const auto& src = *cfg.custom_init;
      if (src.u.grid().n_t() != g->n_t() || src.u.grid().n_theta() != g->n_theta())
        throw std::invalid_argument("solver: custom init grid mismatch");
      guess = src;
    } else if (have_prev) {
      for (int i = 0; i + 1 < prev.u.grid().n_t() && i + 1 < g->n_t(); ++i)
        for (int jj = 0; jj < g->n_cols(); ++jj) {
          guess.u.at(i, jj) = prev.u.at(i, jj);
          guess.v.at(i, jj) = prev.v.at(i, jj);
        }
    }

    std::vector<double> x;
    sys.pack(guess, x);
    newton_solve(sys, x, cfg, report);
    FieldPair sol{LogPolarField(g), LogPolarField(g)};
    sys.unpack(x, sol);
    prev = std::move(sol);
    have_prev = true;
    report.stage_t_max.push_back(tmax_snap);
  }

  // positivity audit on the converged profile
  const double scale = std::max(prev.u.max_abs(), prev.v.max_abs());
  int viol = 0;
  for (double v : prev.u.raw())
    if (v < -cfg.tol * scale) ++viol;
  for (double v : prev.v.raw())
    if (v < -cfg.tol * scale) ++viol;
  report.positivity_violations = viol;
  if (viol > 0)
    throw std::runtime_error("solve_profile: converged iterate violates positivity at " +
                             std::to_string(viol) + " nodes");
  return {std::move(prev), std::move(report)};
}

ResidualReport residual_report(const FieldPair& pair, FracParam par) {
  if (pair.u.grid_ptr().get() != pair.v.grid_ptr().get())
    throw std::invalid_argument("residual_report: fields on different grids");
  GridPtr g = pair.u.grid_ptr();
  SolveSystem sys(g, par);
  // judge the pair against its own outer row so only interior/trace defects count
  for (int jj = 0; jj < sys.cols; ++jj) {
    sys.data_u[jj] = pair.u.at(g->n_t() - 1, jj);
    sys.data_v[jj] = pair.v.at(g->n_t() - 1, jj);
  }
  std::vector<double> x, F;
  sys.pack(pair, x);
  sys.assemble(x, F, nullptr);
  ResidualReport rep;
  double su2 = 0.0, sv2 = 0.0;
  int nu = 0, nv = 0;
  for (int i = 0; i + 1 < sys.n_t; ++i) {
    // the i = 0 row carries the inner Neumann condition, not the PDE
    for (int j = 0; i > 0 && j < sys.n_theta; ++j) {
      const double fu = F[sys.idx(0, i, j + 1)];
      const double fv = F[sys.idx(1, i, j + 1)];
      rep.u_interior_sup = std::max(rep.u_interior_sup, std::abs(fu));
      rep.v_interior_sup = std::max(rep.v_interior_sup, std::abs(fv));
      su2 += fu * fu;
      sv2 += fv * fv;
      ++nu;
      ++nv;
    }
    for (int jb : {0, sys.cols - 1}) {
      rep.u_trace_defect_sup =
          std::max(rep.u_trace_defect_sup, std::abs(F[sys.idx(0, i, jb)]));
      rep.v_trace_defect_sup =
          std::max(rep.v_trace_defect_sup, std::abs(F[sys.idx(1, i, jb)]));
    }
  }
  rep.u_interior_l2 = std::sqrt(su2 / std::max(nu, 1));
  rep.v_interior_l2 = std::sqrt(sv2 / std::max(nv, 1));
  return rep;
}

}  // namespace fracseg
