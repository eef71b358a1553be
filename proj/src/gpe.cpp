#include "nnequiv/gpe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "nnequiv/log.hpp"

namespace nnequiv {

namespace {
// Exact-path candidates rejected by concrete validation within this band of
// the threshold are float drift between the set model and the forward pass.
constexpr double kBoundaryBand = 1e-7;
}  // namespace

struct Engine::Shared {
  std::mutex mu;  // worklist, lifecycle, verdict
  std::condition_variable cv;
  std::deque<State> work;
  int active = 0;
  bool stop = false;
  bool timed_out = false;
  std::optional<Verdict> verdict;
  std::exception_ptr error;
  std::chrono::steady_clock::time_point deadline;

  std::mutex stats_mu;  // counters, depth log, collected leaves
  RunStats stats;
  std::vector<LeafRecord> leaves;
};

Engine::Engine(const Network& net_r, const Network& net_t, const InputBox& box, EngineConfig cfg)
    : net_r_(net_r),
      net_t_(net_t),
      box_(box),
      cfg_(std::move(cfg)),
      strategy_(cfg_.strategy, cfg_.depth_table) {
  net_r_.validate();
  net_t_.validate();
  box_.validate();
  if (net_r_.input_dim() != net_t_.input_dim() || net_r_.input_dim() != box_.dim())
    throw DimensionError("networks and input box disagree on the input dimension");
  if (net_r_.output_dim() != net_t_.output_dim())
    throw DimensionError("networks disagree on the output dimension");
  if (cfg_.property.kind == EquivProperty::Kind::Epsilon && !(cfg_.property.epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  if (cfg_.property.kind == EquivProperty::Kind::Top1 && net_r_.output_dim() < 2)
    throw std::invalid_argument("top-1 equivalence needs at least two outputs");
}

Engine::State Engine::initial_state() const {
  State s;
  s.nn = 0;
  s.layer = 0;
  s.neuron = -1;
  s.zono = init_zono(box_);
  s.pred = Polytope::box_only(box_.dim());
  return s;
}

void Engine::transition(State& s) const {
  s.out_r = StoredOutput{s.zono.c, s.zono.G, s.zono.k_input, s.zono.tags};
  s.zono = init_zono(box_);
  s.nn = 1;
  s.layer = 0;
  s.neuron = -1;
}

std::optional<std::pair<double, double>> Engine::relu_bounds(const State& s, int neuron,
                                                             LpSolver& lp) {
  auto [lo, hi] = zono_interval(s.zono, neuron);
  if (s.split_depth == 0 || !(lo < 0.0 && 0.0 < hi)) return {{lo, hi}};

  // Exact splits narrowed the predicate below what the zonotope sees; LP
  // bounds recover that. Error columns outside the predicate enter closed
  // form. Degrades to the zonotope bounds when the LP gives up.
  MappedRow m = map_row_to_pred(s.zono.G.row(neuron), s.zono.k_input, s.zono.tags, s.pred.dim,
                                s.pred_tags);
  LpOutcome up = lp.maximize(s.pred, m.g);
  if (up.infeasible()) return std::nullopt;
  Vec neg(m.g.size());
  for (std::size_t j = 0; j < m.g.size(); ++j) neg[j] = -m.g[j];
  LpOutcome dn = lp.maximize(s.pred, neg);
  if (dn.infeasible()) return std::nullopt;
  if (up.optimal() && dn.optimal()) {
    double c = s.zono.c[neuron];
    double hi_lp = c + up.value + m.free_abs;
    double lo_lp = c - dn.value - m.free_abs;
    double nlo = std::max(lo, lo_lp);
    double nhi = std::min(hi, hi_lp);
    if (nlo <= nhi) {
      lo = nlo;
      hi = nhi;
    }
  }
  return {{lo, hi}};
}

bool Engine::decide_split(const State& s) const {
  if (cfg_.force_overapprox) return false;
  return strategy_.should_split(s.path_id, s.split_depth, s.forced_depth);
}

namespace {

void advance_after_neuron(Engine::State& s, const Network& net) {
  ++s.neuron;
  if (s.neuron >= net.layers[s.layer].out_dim()) {
    ++s.layer;
    s.neuron = -1;
  }
}

}  // namespace

void Engine::apply_split(State&& s, int neuron, std::vector<State>& out, LpSolver& lp,
                         Shared& sh) {
  // F keeps split hyperplanes at their native dimensionality: widen the
  // predicate to cover the zonotope's error columns before building the row.
  if (!strategy_.lp_approx()) {
    for (const ErrorTag& t : s.zono.tags) {
      if (std::find(s.pred_tags.begin(), s.pred_tags.end(), t) == s.pred_tags.end())
        s.pred_tags.push_back(t);
    }
    s.pred.pad_to(s.zono.k_input + static_cast<int>(s.pred_tags.size()));
  }
  MappedRow m = map_row_to_pred(s.zono.G.row(neuron), s.zono.k_input, s.zono.tags, s.pred.dim,
                                s.pred_tags);
  const double c = s.zono.c[neuron];

  State base = std::move(s);
  advance_after_neuron(base, current_net(base));
  base.split_depth += 1;
  base.splits_since_check += 1;

  State neg = base;
  State pos = std::move(base);

  Vec flipped(m.g.size());
  for (std::size_t j = 0; j < m.g.size(); ++j) flipped[j] = -m.g[j];
  pos.pred.add_row(flipped, c + m.free_abs);  // value >= 0
  pos.path_id += 'R';

  neg.pred.add_row(m.g, -c + m.free_abs);  // value <= 0, output pinned to 0
  neg.path_id += 'L';
  neg.zono.c[neuron] = 0.0;
  neg.zono.G.zero_row(neuron);

  for (State* child : {&neg, &pos}) {
    {
      std::lock_guard<std::mutex> lock(sh.stats_mu);
      ++sh.stats.descend_ops;
    }
    bool keep = true;
    if (cfg_.feasibility_cadence > 0 && child->splits_since_check >= cfg_.feasibility_cadence) {
      LpOutcome f = lp.check_feasible(child->pred);
      if (f.infeasible()) {
        keep = false;
        std::lock_guard<std::mutex> lock(sh.stats_mu);
        ++sh.stats.infeasible_dropped;
      } else {
        child->splits_since_check = 0;  // iteration limit counts as feasible
      }
    }
    if (keep) out.push_back(std::move(*child));
  }
}

Engine::StepEvent Engine::step(State& s, std::vector<State>& children, LpSolver& lp) {
  Shared scratch;
  return step_impl(s, children, lp, scratch);
}

Engine::StepEvent Engine::step_impl(State& s, std::vector<State>& children, LpSolver& lp,
                                    Shared& sh) {
  const Network& net = current_net(s);
  const Layer& layer = net.layers[s.layer];

  if (s.neuron < 0) {
    s.zono = affine_map(s.zono, layer.weights, layer.bias);
    if (layer.activation == Activation::ReLU) {
      s.neuron = 0;
    } else {
      ++s.layer;
    }
    return StepEvent::Advanced;
  }

  const int neuron = s.neuron;
  auto bounds = relu_bounds(s, neuron, lp);
  if (!bounds) {
    std::lock_guard<std::mutex> lock(sh.stats_mu);
    ++sh.stats.infeasible_dropped;
    return StepEvent::Dropped;
  }
  auto [lo, hi] = *bounds;

  if (hi <= 0.0) {
    s.zono.c[neuron] = 0.0;
    s.zono.G.zero_row(neuron);
    advance_after_neuron(s, net);
    return StepEvent::Advanced;
  }
  if (lo >= 0.0) {
    advance_after_neuron(s, net);
    return StepEvent::Advanced;
  }

  ++s.straddle_count;
  if (decide_split(s)) {
    apply_split(std::move(s), neuron, children, lp, sh);
    return StepEvent::SplitPushed;
  }

  auto snapshot = std::make_shared<const State>(s);
  s.oa_log.push_back(OverapproxRecord{s.nn, s.layer, neuron, std::move(snapshot)});
  s.zono = overapprox_relu(s.zono, neuron, lo, hi, ErrorTag{s.nn, s.layer, neuron});
  {
    std::lock_guard<std::mutex> lock(sh.stats_mu);
    ++sh.stats.overapprox_total;
  }
  advance_after_neuron(s, net);
  return StepEvent::Advanced;
}

void Engine::refine(State&& s, std::vector<State>& out, LpSolver& lp, Shared& sh) {
  if (s.oa_log.empty())
    throw std::logic_error("refinement requested on an exact path");
  // The first over-approximated node is the only guaranteed non-ghost split
  // candidate; restore its snapshot and split it for real this time.
  OverapproxRecord rec = s.oa_log.front();
  State restored = *rec.snapshot;
  restored.forced_depth = restored.split_depth + 1;
  {
    std::lock_guard<std::mutex> lock(sh.stats_mu);
    ++sh.stats.refinements;
  }
  apply_split(std::move(restored), rec.neuron, out, lp, sh);
}

void Engine::leaf_check(State&& s, std::vector<State>& out, LpSolver& lp, Shared& sh) {
  {
    std::lock_guard<std::mutex> lock(sh.stats_mu);
    ++sh.stats.checks_run;
  }
  StoredOutput out_t{s.zono.c, s.zono.G, s.zono.k_input, s.zono.tags};

  bool proven = false;
  bool need_refine = false;
  std::optional<Counterexample> cex;

  if (cfg_.property.kind == EquivProperty::Kind::Epsilon) {
    const double eps = cfg_.property.epsilon;
    DiffSet d = make_diff(*s.out_r, out_t, s.pred, s.pred_tags);
    if (!cfg_.find_cex_mode && check_epsilon_zono(d, eps).proven) {
      proven = true;
    } else {
      EpsStarCheck sc = check_epsilon_star(d, eps, lp);
      switch (sc.status) {
        case CheckStatus::Proven:
        case CheckStatus::TieOnly:
          proven = true;
          break;
        case CheckStatus::Candidate: {
          auto v = validate_epsilon_candidate(net_r_, net_t_, box_, sc.alpha, eps);
          if (v) {
            cex = std::move(v);
          } else if (!s.oa_log.empty()) {
            need_refine = true;
          } else if (sc.dev < eps + kBoundaryBand) {
            proven = true;
          } else {
            throw std::runtime_error(
                "exact-path deviation candidate failed concrete validation");
          }
          break;
        }
        case CheckStatus::Unresolved:
          if (s.oa_log.empty())
            throw std::runtime_error("LP could not resolve an exact leaf check");
          need_refine = true;
          break;
      }
    }
  } else {
    Top1Check tc = check_top1(*s.out_r, out_t, s.pred, s.pred_tags, lp);
    switch (tc.status) {
      case CheckStatus::Proven:
        proven = true;
        break;
      case CheckStatus::TieOnly:
        // Argmax ties are ambiguous, never counterexamples. On an exact set
        // nothing is left to refine: only boundary ties remain.
        if (s.oa_log.empty()) proven = true;
        else need_refine = true;
        break;
      case CheckStatus::Candidate: {
        auto v = validate_top1_candidate(net_r_, net_t_, box_, tc.alpha);
        if (v) {
          cex = std::move(v);
        } else if (!s.oa_log.empty()) {
          need_refine = true;
        } else if (tc.dev < kBoundaryBand) {
          proven = true;
        } else {
          throw std::runtime_error(
              "exact-path top-1 candidate landed on a degenerate argmax tie; "
              "instance is tie-ambiguous");
        }
        break;
      }
      case CheckStatus::Unresolved:
        if (s.oa_log.empty())
          throw std::runtime_error("LP could not resolve an exact leaf check");
        need_refine = true;
        break;
    }
  }

  if (cex) {
    std::scoped_lock lock(sh.mu, sh.stats_mu);
    ++sh.stats.paths_total;
    if (!sh.verdict) {
      sh.verdict = Verdict::not_equivalent(std::move(*cex));
      sh.stats.cex_record = DepthRecord{s.path_id, s.split_depth, s.straddle_count};
    }
    sh.stop = true;
    sh.cv.notify_all();
    return;
  }
  if (proven) {
    std::lock_guard<std::mutex> lock(sh.stats_mu);
    ++sh.stats.paths_total;
    sh.stats.depth_log.push_back(DepthRecord{s.path_id, s.split_depth, s.straddle_count});
    if (!s.oa_log.empty()) sh.stats.overapprox_helped = true;
    strategy_.on_success(s.split_depth);
    if (cfg_.collect_leaves)
      sh.leaves.push_back(LeafRecord{*s.out_r, std::move(out_t), s.pred, s.pred_tags, s.path_id,
                                     s.split_depth, !s.oa_log.empty()});
    return;
  }
  if (!need_refine) throw std::logic_error("leaf check fell through without a resolution");
  refine(std::move(s), out, lp, sh);
}

void Engine::process_one(State&& s, std::vector<State>& out, LpSolver& lp, Shared& sh) {
  if (finished_current(s)) {
    if (s.nn == 0) {
      transition(s);
      out.push_back(std::move(s));
    } else {
      leaf_check(std::move(s), out, lp, sh);
    }
    return;
  }
  StepEvent ev = step_impl(s, out, lp, sh);
  if (ev == StepEvent::Advanced) out.push_back(std::move(s));
}

EnumerationResult Engine::run() {
  Shared sh;
  sh.deadline = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(cfg_.timeout_seconds));
  sh.work.push_back(initial_state());
  const auto t0 = std::chrono::steady_clock::now();

  auto worker = [this, &sh]() {
    LpSolver lp;
    std::vector<State> produced;
    std::unique_lock<std::mutex> lock(sh.mu);
    while (true) {
      sh.cv.wait(lock, [&] { return sh.stop || !sh.work.empty() || sh.active == 0; });
      if (sh.stop) break;
      if (sh.work.empty()) {
        if (sh.active == 0) break;
        continue;
      }
      if (std::chrono::steady_clock::now() > sh.deadline) {
        sh.timed_out = true;
        sh.stop = true;
        sh.cv.notify_all();
        break;
      }
      State s = std::move(sh.work.back());
      sh.work.pop_back();
      ++sh.active;
      lock.unlock();

      produced.clear();
      try {
        process_one(std::move(s), produced, lp, sh);
      } catch (...) {
        lock.lock();
        if (!sh.error) sh.error = std::current_exception();
        sh.stop = true;
        --sh.active;
        sh.cv.notify_all();
        break;
      }

      lock.lock();
      for (State& c : produced) sh.work.push_back(std::move(c));
      --sh.active;
      sh.cv.notify_all();
    }
  };

  if (cfg_.workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(cfg_.workers);
    for (int i = 0; i < cfg_.workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (sh.error) std::rethrow_exception(sh.error);

  EnumerationResult result;
  result.stats = std::move(sh.stats);
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.leaves = std::move(sh.leaves);
  if (sh.verdict) result.verdict = std::move(*sh.verdict);
  else if (sh.timed_out) result.verdict = Verdict::timeout();
  else result.verdict = Verdict::equivalent();
  NNEQUIV_LOG(Info, "verdict=%s paths=%ld checks=%ld descend=%ld refine=%ld dropped=%ld",
              result.verdict.kind_string().c_str(), result.stats.paths_total,
              result.stats.checks_run, result.stats.descend_ops, result.stats.refinements,
              result.stats.infeasible_dropped);
  return result;
}

EnumerationResult enumerate_equivalence(const Network& net_r, const Network& net_t,
                                        const InputBox& box, const EngineConfig& cfg) {
  Engine engine(net_r, net_t, box, cfg);
  return engine.run();
}

}  // namespace nnequiv
