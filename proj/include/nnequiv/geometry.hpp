// Star-set and zonotope data structures with their transformers: affine
// maps, exact ReLU splits, the parallelogram ReLU over-approximation,
// closed-form zonotope intervals and differential-set construction.
//
// Variable layout convention: the first k_input generator columns belong to
// the input box variables; over-approximation error columns are appended
// after them and never reordered. Every variable lives in [-1, 1].

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nnequiv/linalg.hpp"

namespace nnequiv {

struct InputBox;

// Provenance of one error column: which network / layer / neuron the
// over-approximation happened at. Differential sets align columns by tag.
struct ErrorTag {
  std::uint8_t net = 0;  // 0 = reference, 1 = test
  int layer = 0;
  int neuron = 0;

  friend bool operator==(const ErrorTag&, const ErrorTag&) = default;
};

// {alpha | A alpha <= b} intersected with the implicit base box [-1,1]^dim.
struct Polytope {
  Mat A;
  Vec b;
  int dim = 0;

  int row_count() const { return A.rows(); }

  void add_row(const Vec& row, double rhs);

  // Grow the variable space; existing rows are zero-padded.
  void pad_to(int new_dim);

  // Membership up to `tol` slack (base box included).
  bool contains(const Vec& alpha, double tol = 1e-9) const;

  static Polytope box_only(int dim) { return Polytope{Mat(0, dim), {}, dim}; }
};

// <c, G, P>: the set {c + G alpha | alpha in P}.
struct StarSet {
  Vec c;
  Mat G;  // n x k, k == pred.dim
  Polytope pred;

  int n() const { return static_cast<int>(c.size()); }
};

// Star set whose predicate is the base box alone; admits closed-form
// optimization. Columns [0, k_input) are input variables, the rest error
// variables described by `tags`.
struct Zonotope {
  Vec c;
  Mat G;  // n x (k_input + k_error)
  int k_input = 0;
  std::vector<ErrorTag> tags;

  int n() const { return static_cast<int>(c.size()); }
  int k_error() const { return static_cast<int>(tags.size()); }
  int k_total() const { return k_input + k_error(); }
};

// Output of one network as stored at the R->T handoff or at a leaf.
struct StoredOutput {
  Vec c;
  Mat G;
  int k_input = 0;
  std::vector<ErrorTag> tags;
};

// Differential set <c_R - c_T, G_R - G_T, P_T>. Generator columns are split
// into the block covered by the predicate variables (LP-optimizable) and the
// free error columns beyond it (closed-form, each in [-1,1]).
struct DiffSet {
  Vec dc;
  Mat dG_pred;  // O x pred.dim
  Mat dG_free;  // O x free_tags.size()
  std::vector<ErrorTag> free_tags;
  Polytope pred;

  int out_dim() const { return static_cast<int>(dc.size()); }
};

// c' = W c + bias, G' = W G; the predicate is untouched.
StarSet affine_map(const StarSet& s, const Mat& w, const Vec& bias);
Zonotope affine_map(const Zonotope& z, const Mat& w, const Vec& bias);

// Exact reachable interval of dimension `dim`: c_d -/+ sum_j |G_dj|.
std::pair<double, double> zono_interval(const Zonotope& z, int dim);
std::pair<double, double> zono_interval_row(double c, const double* row, int k);

// Exact ReLU split at `neuron`. pos keeps the geometry and gains
// -G_n alpha <= c_n (value >= 0); neg gains G_n alpha <= -c_n and its row is
// zeroed. Emptiness of a branch is left to LP feasibility.
std::pair<StarSet, StarSet> split_relu(const StarSet& s, int neuron);

// Parallelogram over-approximation of a straddling ReLU (lo < 0 < hi):
// lambda = hi/(hi-lo), mu = -lambda*lo/2; row scaled by lambda, center moved
// to lambda*c + mu, one error column with entry mu appended.
Zonotope overapprox_relu(const Zonotope& z, int dim, double lo, double hi, ErrorTag tag);

// Input box folded into center/generators: c = (lo+hi)/2, G = diag((hi-lo)/2),
// base predicate [-1,1]^I.
StarSet init_star(const InputBox& box);
Zonotope init_zono(const InputBox& box);

// Differential set of two stored outputs under the shared final predicate.
// Error columns are aligned by provenance tag; a column present in only one
// operand keeps the other side's contribution at zero. `pred_tags` lists the
// error tags that are part of the predicate variable space (beyond k_input),
// in predicate column order.
DiffSet make_diff(const StoredOutput& out_r, const StoredOutput& out_t,
                  const Polytope& pred, const std::vector<ErrorTag>& pred_tags);

// A row over [k_input | row_tags...] remapped onto the predicate space
// [k_input | pred_tags...]. Error columns outside the predicate contribute
// `free_abs` = sum of their |coefficients|: added to a right-hand side it
// soundly relaxes a constraint, added to an LP maximum it completes the
// closed-form bound.
struct MappedRow {
  Vec g;  // over pred_dim variables
  double free_abs = 0.0;
};
MappedRow map_row_to_pred(const double* row, int k_input, const std::vector<ErrorTag>& row_tags,
                          int pred_dim, const std::vector<ErrorTag>& pred_tags);

}  // namespace nnequiv
