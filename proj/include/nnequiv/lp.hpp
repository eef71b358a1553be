// LP backend: feasibility and maximization over star-set predicates.
// Every Infeasible verdict is confirmed by re-running phase 1 in exact
// rational arithmetic on the same constraint data, and every Optimal basis
// is recertified exactly before its value is trusted; no branch is ever
// pruned on floating-point evidence alone.

#pragma once

#include <utility>

#include "nnequiv/geometry.hpp"
#include "nnequiv/linalg.hpp"

namespace nnequiv {

enum class LpStatus { Optimal, Infeasible, IterationLimit };

struct LpOutcome {
  LpStatus status = LpStatus::IterationLimit;
  double value = 0.0;
  Vec witness;             // feasible point achieving `value` (Optimal only)
  bool exact_confirmed = false;   // Infeasible: rational phase 1 agreed
  bool rational_verified = false; // Optimal: float value within 1e-6 rel. of exact optimum

  bool optimal() const { return status == LpStatus::Optimal; }
  bool infeasible() const { return status == LpStatus::Infeasible; }
};

// One instance per worker; instances hold scratch state and are not shared.
class LpSolver {
 public:
  // Feasibility of p (objective 0). Optimal carries a witness; Infeasible is
  // exact-confirmed. IterationLimit must be treated as "assume feasible".
  LpOutcome check_feasible(const Polytope& p);

  // max objective.alpha over p. The returned value is the exact optimum of
  // the given constraint data (rational recheck corrects float drift).
  LpOutcome maximize(const Polytope& p, const Vec& objective);

  long calls() const { return calls_; }

 private:
  long calls_ = 0;
};

// Eq-style dimensional reduction of a constraint row: fold the error-column
// contribution g_err.alpha into the right-hand side via its closed-form
// minimum over [-1,1], leaving a row over the first k_input variables only.
// Sound: any alpha feasible for the full row projects into the reduced row.
std::pair<Vec, double> approximate_row(const Vec& g, double c, int k_input);

// Upper bound for sign*(dG.alpha)_out_dim over the diff set: LP over the
// predicate variables plus the closed-form contribution of the free error
// columns. The caller re-adds the center term.
LpOutcome maximize_with_error_dims(const DiffSet& d, int out_dim, int sign, LpSolver& lp);

}  // namespace nnequiv
