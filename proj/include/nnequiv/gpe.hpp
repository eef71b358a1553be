// Two-network geometric path enumeration: a worklist of propagation states
// stepped neuron by neuron through the reference network, handed over to the
// test network under the accumulated predicate, and checked at the leaves.
// Straddling ReLUs are either split exactly or over-approximated per the
// configured refinement strategy; failed leaf checks restore the snapshot of
// the first over-approximated node and split it.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nnequiv/equivalence.hpp"
#include "nnequiv/geometry.hpp"
#include "nnequiv/lp.hpp"
#include "nnequiv/network.hpp"
#include "nnequiv/property.hpp"
#include "nnequiv/refinement.hpp"

namespace nnequiv {

struct EngineConfig {
  EquivProperty property;
  StrategyKind strategy = StrategyKind::LastMinusOne;
  double timeout_seconds = 3600.0;
  int workers = 1;
  // LP feasibility check every Nth split along a path (0 disables; infeasible
  // leaves are then caught at check time).
  int feasibility_cadence = 1;
  // Counterexample search tuning: skip the prove-only zonotope check and
  // validate candidates eagerly.
  bool find_cex_mode = false;
  bool collect_leaves = false;  // retain finished leaves (tests, diagnostics)
  // Over-approximate every straddling neuron regardless of strategy
  // (soundness diagnostics; never splits, never refines).
  bool force_overapprox = false;
  std::uint64_t seed = 0;
  DepthTable depth_table;  // OracleReplay input
};

struct LeafRecord {
  StoredOutput out_r;
  StoredOutput out_t;
  Polytope pred;
  std::vector<ErrorTag> pred_tags;
  std::string path_id;
  int split_depth = 0;
  bool used_overapprox = false;
};

struct EnumerationResult {
  Verdict verdict;
  RunStats stats;
  std::vector<LeafRecord> leaves;
};

class Engine {
 public:
  struct State;

  // Snapshot of the state right before a neuron was over-approximated;
  // restoring it and splitting that neuron is the refinement step.
  struct OverapproxRecord {
    std::uint8_t nn = 0;
    int layer = 0;
    int neuron = 0;
    std::shared_ptr<const State> snapshot;
  };

  struct State {
    std::uint8_t nn = 0;  // 0: reference, 1: test
    int layer = 0;
    int neuron = -1;  // -1: affine map of `layer` pending
    Zonotope zono;
    Polytope pred;                     // over k_input (+ referenced error dims)
    std::vector<ErrorTag> pred_tags;   // predicate columns beyond k_input
    std::optional<StoredOutput> out_r; // present once the reference side finished
    int split_depth = 0;
    int forced_depth = 0;     // refinement floor for the depth heuristics
    int straddle_count = 0;   // split candidates encountered on this path
    int splits_since_check = 0;
    std::string path_id;      // branch string, one L/R per exact split
    std::vector<OverapproxRecord> oa_log;
  };

  enum class StepEvent { Advanced, SplitPushed, Dropped };

  Engine(const Network& net_r, const Network& net_t, const InputBox& box, EngineConfig cfg);

  EnumerationResult run();

  // Exposed for unit tests; `run` is the production entry point.
  State initial_state() const;
  StepEvent step(State& s, std::vector<State>& children, LpSolver& lp);
  void transition(State& s) const;
  // Sound pre-activation bounds: zonotope closed form, LP-tightened once the
  // path has exact splits. nullopt when the predicate is exactly infeasible.
  std::optional<std::pair<double, double>> relu_bounds(const State& s, int neuron, LpSolver& lp);

  const Network& current_net(const State& s) const { return s.nn == 0 ? net_r_ : net_t_; }
  bool finished_current(const State& s) const {
    return s.layer >= static_cast<int>(current_net(s).layers.size());
  }

 private:
  struct Shared;

  StepEvent step_impl(State& s, std::vector<State>& children, LpSolver& lp, Shared& sh);
  void apply_split(State&& s, int neuron, std::vector<State>& out, LpSolver& lp, Shared& sh);
  void leaf_check(State&& s, std::vector<State>& out, LpSolver& lp, Shared& sh);
  void refine(State&& s, std::vector<State>& out, LpSolver& lp, Shared& sh);
  void process_one(State&& s, std::vector<State>& out, LpSolver& lp, Shared& sh);
  bool decide_split(const State& s) const;

  const Network& net_r_;
  const Network& net_t_;
  InputBox box_;
  EngineConfig cfg_;
  mutable Strategy strategy_;
};

// Convenience wrapper: validate shapes and run the engine.
EnumerationResult enumerate_equivalence(const Network& net_r, const Network& net_t,
                                        const InputBox& box, const EngineConfig& cfg);

}  // namespace nnequiv
