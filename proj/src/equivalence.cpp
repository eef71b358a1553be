#include "nnequiv/equivalence.hpp"

#include <algorithm>
#include <cmath>

namespace nnequiv {

namespace {

// Maximized differences this close to zero are argmax ties, which are
// ambiguous rather than violations.
constexpr double kTieTol = 1e-9;

// Accepted concrete deviation may undershoot eps by this much (float drift
// between the LP model and the recomputed forward pass).
constexpr double kValidateSlack = 1e-9;

int strict_argmax(const Vec& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace

EpsZonoCheck check_epsilon_zono(const DiffSet& d, double eps) {
  double worst = 0.0;
  for (int i = 0; i < d.out_dim(); ++i) {
    double dev = std::fabs(d.dc[i]) +
                 kern::abs_sum(d.dG_pred.row(i), static_cast<std::size_t>(d.dG_pred.cols())) +
                 kern::abs_sum(d.dG_free.row(i), static_cast<std::size_t>(d.dG_free.cols()));
    worst = std::max(worst, dev);
  }
  return {worst < eps, worst};
}

EpsStarCheck check_epsilon_star(const DiffSet& d, double eps, LpSolver& lp) {
  EpsStarCheck out;
  out.status = CheckStatus::Proven;
  out.dev = 0.0;
  bool have_any = false;
  for (int i = 0; i < d.out_dim(); ++i) {
    for (int sign : {1, -1}) {
      LpOutcome r = maximize_with_error_dims(d, i, sign, lp);
      if (r.infeasible()) {
        // Exact-confirmed empty leaf region: vacuously within bounds.
        return {CheckStatus::Proven, 0.0, {}, -1, 1};
      }
      if (!r.optimal()) return {CheckStatus::Unresolved, 0.0, {}, i, sign};
      double dev = sign * d.dc[i] + r.value;
      if (!have_any || dev > out.dev) {
        have_any = true;
        out.dev = dev;
        out.alpha = r.witness;
        out.dim = i;
        out.sign = sign;
      }
    }
  }
  out.status = out.dev < eps ? CheckStatus::Proven : CheckStatus::Candidate;
  return out;
}

Top1Check check_top1(const StoredOutput& out_r, const StoredOutput& out_t, const Polytope& pred,
                     const std::vector<ErrorTag>& pred_tags, LpSolver& lp) {
  const int o = static_cast<int>(out_r.c.size());
  Top1Check out;
  bool tie_seen = false;
  bool unresolved_seen = false;
  Vec row_full(out_r.G.cols());

  for (int j = 0; j < o; ++j) {
    // P_j: the part of the leaf where output j is the reference argmax.
    Polytope pj = pred;
    for (int i = 0; i < o; ++i) {
      if (i == j) continue;
      for (int k = 0; k < out_r.G.cols(); ++k)
        row_full[k] = out_r.G(i, k) - out_r.G(j, k);
      MappedRow m = map_row_to_pred(row_full.data(), out_r.k_input, out_r.tags, pred.dim, pred_tags);
      pj.add_row(m.g, (out_r.c[j] - out_r.c[i]) + m.free_abs);
    }
    LpOutcome feas = lp.check_feasible(pj);
    if (feas.infeasible()) continue;  // j is never the reference argmax here
    if (!feas.optimal()) {
      unresolved_seen = true;
      continue;
    }

    Vec trow(out_t.G.cols());
    for (int i = 0; i < o; ++i) {
      if (i == j) continue;
      for (int k = 0; k < out_t.G.cols(); ++k)
        trow[k] = out_t.G(i, k) - out_t.G(j, k);
      MappedRow m = map_row_to_pred(trow.data(), out_t.k_input, out_t.tags, pred.dim, pred_tags);
      LpOutcome r = lp.maximize(pj, m.g);
      if (r.infeasible()) continue;
      if (!r.optimal()) {
        unresolved_seen = true;
        continue;
      }
      double dev = (out_t.c[i] - out_t.c[j]) + r.value + m.free_abs;
      if (dev > kTieTol) {
        if (out.status != CheckStatus::Candidate || dev > out.dev) {
          out.status = CheckStatus::Candidate;
          out.dev = dev;
          out.alpha = r.witness;
          out.i = i;
          out.j = j;
        }
      } else if (dev > -kTieTol) {
        tie_seen = true;
      }
    }
  }

  if (out.status == CheckStatus::Candidate) return out;
  if (unresolved_seen) {
    out.status = CheckStatus::Unresolved;
    return out;
  }
  out.status = tie_seen ? CheckStatus::TieOnly : CheckStatus::Proven;
  return out;
}

Vec witness_to_input(const InputBox& box, const Vec& alpha) {
  Vec x(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    double a = i < static_cast<int>(alpha.size()) ? alpha[i] : 0.0;
    a = std::clamp(a, -1.0, 1.0);
    x[i] = (box.lo[i] + box.hi[i]) / 2.0 + (box.hi[i] - box.lo[i]) / 2.0 * a;
  }
  return x;
}

std::optional<Counterexample> validate_epsilon_candidate(const Network& r, const Network& t,
                                                         const InputBox& box, const Vec& alpha,
                                                         double eps) {
  Vec x = witness_to_input(box, alpha);
  Vec yr = r.eval(x);
  Vec yt = t.eval(x);
  double dev = 0.0;
  for (std::size_t i = 0; i < yr.size(); ++i) dev = std::max(dev, std::fabs(yr[i] - yt[i]));
  if (dev < eps - kValidateSlack) return std::nullopt;
  Counterexample cex;
  cex.kind = EquivProperty::Kind::Epsilon;
  cex.x = std::move(x);
  cex.y_r = std::move(yr);
  cex.y_t = std::move(yt);
  cex.deviation = dev;
  return cex;
}

std::optional<Counterexample> validate_top1_candidate(const Network& r, const Network& t,
                                                      const InputBox& box, const Vec& alpha) {
  Vec x = witness_to_input(box, alpha);
  Vec yr = r.eval(x);
  Vec yt = t.eval(x);
  int ar = strict_argmax(yr);
  int at = strict_argmax(yt);
  // A definitive disagreement needs both networks to strictly prefer their
  // own winner over the other's; tied argmaxes are ambiguous.
  if (ar == at || !(yr[ar] > yr[at]) || !(yt[at] > yt[ar])) return std::nullopt;
  Counterexample cex;
  cex.kind = EquivProperty::Kind::Top1;
  cex.x = std::move(x);
  cex.y_r = std::move(yr);
  cex.y_t = std::move(yt);
  cex.argmax_r = ar;
  cex.argmax_t = at;
  return cex;
}

}  // namespace nnequiv
