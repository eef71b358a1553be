// Equivalence properties, counterexamples, verdicts and run statistics.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nnequiv/linalg.hpp"

namespace nnequiv {

struct EquivProperty {
  enum class Kind { Epsilon, Top1 };
  Kind kind = Kind::Epsilon;
  double epsilon = 0.0;  // Chebyshev bound, Epsilon only; must be > 0

  static EquivProperty make_epsilon(double eps);
  static EquivProperty make_top1();

  // "epsilon:<float>" or "top1".
  static EquivProperty parse(const std::string& text);
  std::string to_string() const;
};

// Concretely validated witness of non-equivalence: y_r/y_t are re-evaluated
// network outputs at x, and either the deviation reaches epsilon or the
// argmax indices differ strictly.
struct Counterexample {
  EquivProperty::Kind kind = EquivProperty::Kind::Epsilon;
  Vec x;
  Vec y_r;
  Vec y_t;
  double deviation = 0.0;  // epsilon case
  int argmax_r = -1;       // top-1 case
  int argmax_t = -1;

  std::string to_json() const;
};

struct Verdict {
  enum class Kind { Equivalent, NotEquivalent, Timeout };
  Kind kind = Kind::Timeout;
  std::optional<Counterexample> cex;

  static Verdict equivalent() { return {Kind::Equivalent, std::nullopt}; }
  static Verdict not_equivalent(Counterexample c) { return {Kind::NotEquivalent, std::move(c)}; }
  static Verdict timeout() { return {Kind::Timeout, std::nullopt}; }

  std::string kind_string() const;
};

struct DepthRecord {
  std::string path_id;  // branch string: one L/R per exact split
  int success_depth = 0;
  int straddle_count = 0;  // split candidates seen on the path (not in the CSV)
};

struct RunStats {
  long paths_total = 0;      // leaves resolved by a definitive check
  long checks_run = 0;       // leaf-check invocations (incl. failed attempts)
  long descend_ops = 0;      // child states created by splits (edges)
  long refinements = 0;      // failed checks that re-split a snapshot
  long infeasible_dropped = 0;
  long overapprox_total = 0;
  double wall_seconds = 0.0;
  bool overapprox_helped = false;  // some leaf proved with over-approx nodes on its path
  std::vector<DepthRecord> depth_log;       // proven leaves, in completion order
  std::optional<DepthRecord> cex_record;    // counterexample path, when one ended the run
};

}  // namespace nnequiv
