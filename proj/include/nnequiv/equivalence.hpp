// Leaf-level property checks: epsilon-equivalence (Chebyshev) on
// differential sets, top-1 equivalence via output-space polytopes, and
// counterexample extraction/validation. Pure functions over immutable leaf
// data plus a caller-supplied LP instance.

#pragma once

#include <optional>
#include <vector>

#include "nnequiv/geometry.hpp"
#include "nnequiv/lp.hpp"
#include "nnequiv/network.hpp"
#include "nnequiv/property.hpp"

namespace nnequiv {

enum class CheckStatus {
  Proven,
  Candidate,   // a maximization exceeded the bound; needs concrete validation
  TieOnly,     // top-1: worst differences were exactly 0 (argmax ties)
  Unresolved,  // LP did not resolve (iteration limit); caller refines
};

// Closed-form deviation bound over the base box (the predicate rows are
// ignored): max_i |dc_i| + sum_j |dG_ij|. Proven iff below eps.
struct EpsZonoCheck {
  bool proven = false;
  double max_dev = 0.0;
};
EpsZonoCheck check_epsilon_zono(const DiffSet& d, double eps);

// LP-backed deviation bound under the leaf predicate. On Candidate, `alpha`
// is the witness of the worst violation (over the predicate variables).
struct EpsStarCheck {
  CheckStatus status = CheckStatus::Unresolved;
  double dev = 0.0;
  Vec alpha;
  int dim = -1;
  int sign = 1;
};
EpsStarCheck check_epsilon_star(const DiffSet& d, double eps, LpSolver& lp);

// For every output dimension j, restrict to the region where j is the
// reference argmax (P_j) and maximize each t_i - t_j there. All differences
// strictly below zero proves top-1 equivalence on this leaf; a positive
// difference yields a candidate (i, j) with its witness.
struct Top1Check {
  CheckStatus status = CheckStatus::Unresolved;
  double dev = 0.0;
  Vec alpha;
  int i = -1;
  int j = -1;
};
Top1Check check_top1(const StoredOutput& out_r, const StoredOutput& out_t, const Polytope& pred,
                     const std::vector<ErrorTag>& pred_tags, LpSolver& lp);

// Input point realized from the input block of a predicate witness.
Vec witness_to_input(const InputBox& box, const Vec& alpha);

// Concrete re-evaluation of a candidate. Returns the validated
// counterexample, or nullopt when the violation was an artifact of
// over-approximation (spurious) and the caller must refine.
std::optional<Counterexample> validate_epsilon_candidate(const Network& r, const Network& t,
                                                         const InputBox& box, const Vec& alpha,
                                                         double eps);
std::optional<Counterexample> validate_top1_candidate(const Network& r, const Network& t,
                                                      const InputBox& box, const Vec& alpha);

}  // namespace nnequiv
