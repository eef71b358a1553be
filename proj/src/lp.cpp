#include "nnequiv/lp.hpp"

#include <cmath>
#include <stdexcept>

#include <gmpxx.h>

#include "nnequiv/detail/simplex.hpp"
#include "nnequiv/network.hpp"

namespace nnequiv {

namespace {

using detail::BoxSimplex;
using detail::SimplexResult;
using detail::SimplexStatus;

using QMat = std::vector<std::vector<mpq_class>>;
using QVec = std::vector<mpq_class>;

constexpr double kOptTolRel = 1e-6;

BoxSimplex<double>::Config float_cfg(int m, int n) {
  BoxSimplex<double>::Config cfg;
  cfg.rc_tol = 1e-9;
  cfg.piv_tol = 1e-9;
  cfg.feas_tol = 1e-7;
  cfg.iter_cap = 20000 + 200L * (m + n);
  cfg.bland = false;
  return cfg;
}

BoxSimplex<mpq_class>::Config exact_cfg(int m, int n) {
  BoxSimplex<mpq_class>::Config cfg;
  cfg.rc_tol = 0;
  cfg.piv_tol = 0;
  cfg.feas_tol = 0;
  cfg.iter_cap = 2000000 + 5000L * (m + n);
  cfg.bland = true;  // exact arithmetic + Bland: guaranteed termination
  return cfg;
}

std::vector<std::vector<double>> to_rows(const Mat& a) {
  std::vector<std::vector<double>> rows(a.rows());
  for (int i = 0; i < a.rows(); ++i) rows[i] = a.row_vec(i);
  return rows;
}

QMat to_rational(const Mat& a) {
  QMat rows(a.rows(), QVec(a.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) rows[i][j] = mpq_class(a(i, j));
  return rows;
}

QVec to_rational(const Vec& v) {
  QVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = mpq_class(v[i]);
  return out;
}

Vec to_double(const QVec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

}  // namespace

LpOutcome LpSolver::maximize(const Polytope& p, const Vec& objective) {
  if (static_cast<int>(objective.size()) != p.dim)
    throw DimensionError("lp maximize: objective length != polytope dim");
  ++calls_;

  const int m = p.row_count();
  const int n = p.dim;
  auto rows = to_rows(p.A);

  BoxSimplex<double> fsolver;
  SimplexResult<double> fr = fsolver.solve(rows, p.b, objective, n, float_cfg(m, n));

  QMat qrows = to_rational(p.A);
  QVec qb = to_rational(p.b);
  QVec qc = to_rational(objective);
  BoxSimplex<mpq_class> qsolver;

  LpOutcome out;
  if (fr.status == SimplexStatus::Infeasible) {
    // Never discard on float evidence: rerun phase 1 exactly.
    SimplexResult<mpq_class> qr = qsolver.solve(qrows, qb, qc, n, exact_cfg(m, n));
    if (qr.status == SimplexStatus::Infeasible) {
      out.status = LpStatus::Infeasible;
      out.exact_confirmed = true;
      return out;
    }
    if (qr.status == SimplexStatus::Optimal) {
      out.status = LpStatus::Optimal;
      out.value = qr.value.get_d();
      out.witness = to_double(qr.x);
      out.rational_verified = true;
      return out;
    }
    out.status = LpStatus::IterationLimit;
    return out;
  }

  if (fr.status == SimplexStatus::IterationLimit) {
    out.status = LpStatus::IterationLimit;
    return out;
  }

  // Float optimum: recertify the final basis exactly; if the basis is stale
  // or unusable, fall back to a full exact solve.
  std::optional<SimplexResult<mpq_class>> qr =
      qsolver.solve_warm(qrows, qb, qc, n, fr.basic, fr.vstat, exact_cfg(m, n));
  if (!qr) {
    SimplexResult<mpq_class> cold = qsolver.solve(qrows, qb, qc, n, exact_cfg(m, n));
    if (cold.status == SimplexStatus::Infeasible) {
      // Float claimed optimal on an infeasible system; trust the exact run.
      out.status = LpStatus::Infeasible;
      out.exact_confirmed = true;
      return out;
    }
    if (cold.status != SimplexStatus::Optimal) {
      out.status = LpStatus::IterationLimit;
      return out;
    }
    qr = std::move(cold);
  }

  double exact_value = qr->value.get_d();
  out.status = LpStatus::Optimal;
  out.value = exact_value;
  out.witness = to_double(qr->x);
  out.rational_verified =
      std::fabs(fr.value - exact_value) <= kOptTolRel * std::max(1.0, std::fabs(exact_value));
  return out;
}

LpOutcome LpSolver::check_feasible(const Polytope& p) {
  return maximize(p, Vec(p.dim, 0.0));
}

std::pair<Vec, double> approximate_row(const Vec& g, double c, int k_input) {
  Vec reduced(g.begin(), g.begin() + k_input);
  double mu = 0.0;  // min over [-1,1] of the error part: -sum |g_err|
  for (std::size_t j = k_input; j < g.size(); ++j) mu -= std::fabs(g[j]);
  return {std::move(reduced), c - mu};
}

LpOutcome maximize_with_error_dims(const DiffSet& d, int out_dim, int sign, LpSolver& lp) {
  Vec obj(d.pred.dim);
  const double* row = d.dG_pred.row(out_dim);
  for (int j = 0; j < d.pred.dim; ++j) obj[j] = sign * row[j];
  LpOutcome out = lp.maximize(d.pred, obj);
  if (out.optimal())
    out.value += kern::abs_sum(d.dG_free.row(out_dim), static_cast<std::size_t>(d.dG_free.cols()));
  return out;
}

}  // namespace nnequiv
