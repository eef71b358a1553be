#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nnequiv/equivalence.hpp"
#include "support/gen.hpp"

using namespace nnequiv;

namespace {

DiffSet zero_diff(int o, int k) {
  DiffSet d;
  d.dc.assign(o, 0.0);
  d.dG_pred = Mat(o, k);
  d.dG_free = Mat(o, 0);
  d.pred = Polytope::box_only(k);
  return d;
}

}  // namespace

TEST_CASE("epsilon zonotope check: zero diff proven for any epsilon") {
  DiffSet d = zero_diff(2, 3);
  EpsZonoCheck r = check_epsilon_zono(d, 1e-12);
  CHECK(r.proven);
  CHECK(r.max_dev == 0.0);
}

TEST_CASE("epsilon zonotope check: constant deviation") {
  DiffSet d = zero_diff(1, 2);
  d.dc[0] = 1.0;
  EpsZonoCheck r = check_epsilon_zono(d, 0.5);
  CHECK_FALSE(r.proven);
  CHECK(r.max_dev == doctest::Approx(1.0));
  CHECK(check_epsilon_zono(d, 1.5).proven);
}

TEST_CASE("epsilon zonotope closed form dominates sampling") {
  std::mt19937_64 rng(3);
  DiffSet d = zero_diff(2, 3);
  for (int i = 0; i < 2; ++i) {
    d.dc[i] = gen::urand(rng, -1, 1);
    for (int j = 0; j < 3; ++j) d.dG_pred(i, j) = gen::urand(rng, -1, 1);
  }
  EpsZonoCheck r = check_epsilon_zono(d, 1e9);
  for (int s = 0; s < 10000; ++s) {
    Vec alpha(3);
    for (auto& v : alpha) v = gen::urand(rng, -1, 1);
    for (int i = 0; i < 2; ++i) {
      double dev = d.dc[i];
      for (int j = 0; j < 3; ++j) dev += d.dG_pred(i, j) * alpha[j];
      CHECK(std::fabs(dev) <= r.max_dev + 1e-12);
    }
  }
}

TEST_CASE("epsilon star check: zero diff proven") {
  LpSolver lp;
  DiffSet d = zero_diff(2, 2);
  EpsStarCheck r = check_epsilon_star(d, 1e-9, lp);
  CHECK(r.status == CheckStatus::Proven);
}

TEST_CASE("epsilon star check: constant-offset pair") {
  LpSolver lp;
  DiffSet d = zero_diff(1, 1);
  d.dc[0] = 1.0;
  EpsStarCheck proven = check_epsilon_star(d, 2.0, lp);
  CHECK(proven.status == CheckStatus::Proven);
  CHECK(proven.dev == doctest::Approx(1.0));

  EpsStarCheck cand = check_epsilon_star(d, 0.5, lp);
  CHECK(cand.status == CheckStatus::Candidate);
  CHECK(cand.dev == doctest::Approx(1.0));
  CHECK(cand.alpha.size() == 1);
}

TEST_CASE("epsilon star check respects the predicate") {
  LpSolver lp;
  DiffSet d = zero_diff(1, 1);
  d.dG_pred(0, 0) = 1.0;                 // deviation = alpha
  d.pred.add_row({1.0}, 0.25);           // alpha <= 0.25
  EpsStarCheck r = check_epsilon_star(d, 0.5, lp);
  CHECK(r.status == CheckStatus::Proven);
  CHECK(r.dev == doctest::Approx(0.25));
}

TEST_CASE("zonotope check dominates star check on the same leaf") {
  std::mt19937_64 rng(11);
  LpSolver lp;
  for (int trial = 0; trial < 10; ++trial) {
    DiffSet d = zero_diff(2, 2);
    for (int i = 0; i < 2; ++i) {
      d.dc[i] = gen::urand(rng, -1, 1);
      for (int j = 0; j < 2; ++j) d.dG_pred(i, j) = gen::urand(rng, -1, 1);
    }
    d.pred.add_row({1.0, 0.0}, gen::urand(rng, 0.0, 1.0));
    EpsZonoCheck zc = check_epsilon_zono(d, 1e9);
    EpsStarCheck sc = check_epsilon_star(d, 1e9, lp);
    REQUIRE(sc.status == CheckStatus::Proven);
    CHECK(zc.max_dev >= sc.dev - 1e-9);
  }
}

TEST_CASE("epsilon monotone: proven at eps stays proven at larger eps") {
  std::mt19937_64 rng(13);
  LpSolver lp;
  DiffSet d = zero_diff(1, 2);
  d.dc[0] = 0.4;
  d.dG_pred(0, 0) = 0.3;
  for (double eps : {0.8, 1.0, 2.0, 5.0}) {
    EpsStarCheck r = check_epsilon_star(d, eps, lp);
    CHECK(r.status == CheckStatus::Proven);
  }
  CHECK(check_epsilon_star(d, 0.5, lp).status == CheckStatus::Candidate);
}

TEST_CASE("top1: identical outputs are proven (ties allowed)") {
  LpSolver lp;
  std::mt19937_64 rng(17);
  StoredOutput o;
  o.c = {0.2, -0.1};
  o.G = Mat(2, 2);
  o.G(0, 0) = 1.0;
  o.G(1, 1) = 0.5;
  o.k_input = 2;
  Top1Check r = check_top1(o, o, Polytope::box_only(2), {}, lp);
  CHECK((r.status == CheckStatus::Proven || r.status == CheckStatus::TieOnly));
  CHECK(r.status != CheckStatus::Candidate);
}

TEST_CASE("top1: constant disagreeing argmax yields a candidate") {
  LpSolver lp;
  StoredOutput r_out;
  r_out.c = {1.0, 0.0};
  r_out.G = Mat(2, 1);
  r_out.k_input = 1;
  StoredOutput t_out;
  t_out.c = {0.0, 1.0};
  t_out.G = Mat(2, 1);
  t_out.k_input = 1;
  Top1Check r = check_top1(r_out, t_out, Polytope::box_only(1), {}, lp);
  CHECK(r.status == CheckStatus::Candidate);
  CHECK(r.j == 0);  // reference argmax is 0 everywhere
  CHECK(r.i == 1);  // test output 1 beats it
}

TEST_CASE("top1: P_j regions cover the predicate") {
  // Union-of-regions coverage: every sampled point belongs to some feasible
  // P_j, reconstructed here the same way the check builds them.
  std::mt19937_64 rng(19);
  LpSolver lp;
  StoredOutput r_out;
  r_out.c = {0.0, 0.1};
  r_out.G = Mat(2, 2);
  r_out.G(0, 0) = 1.0;
  r_out.G(1, 1) = 1.0;
  r_out.k_input = 2;
  Polytope pred = Polytope::box_only(2);
  int covered = 0;
  for (int s = 0; s < 1000; ++s) {
    Vec alpha = {gen::urand(rng, -1, 1), gen::urand(rng, -1, 1)};
    double r0 = r_out.c[0] + alpha[0];
    double r1 = r_out.c[1] + alpha[1];
    bool in_p0 = r0 >= r1;
    bool in_p1 = r1 >= r0;
    CHECK((in_p0 || in_p1));
    covered += (in_p0 || in_p1);
  }
  CHECK(covered == 1000);
}

TEST_CASE("top1 verdict invariant under positive scaling of both outputs") {
  std::mt19937_64 rng(23);
  LpSolver lp;
  for (int trial = 0; trial < 5; ++trial) {
    StoredOutput r_out, t_out;
    r_out.c = {gen::urand(rng, -1, 1), gen::urand(rng, -1, 1)};
    t_out.c = {gen::urand(rng, -1, 1), gen::urand(rng, -1, 1)};
    r_out.G = Mat(2, 2);
    t_out.G = Mat(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        r_out.G(i, j) = gen::urand(rng, -1, 1);
        t_out.G(i, j) = gen::urand(rng, -1, 1);
      }
    r_out.k_input = t_out.k_input = 2;

    Top1Check base = check_top1(r_out, t_out, Polytope::box_only(2), {}, lp);

    const double scale = 3.7;
    StoredOutput r2 = r_out, t2 = t_out;
    for (int i = 0; i < 2; ++i) {
      r2.c[i] *= scale;
      t2.c[i] *= scale;
      for (int j = 0; j < 2; ++j) {
        r2.G(i, j) *= scale;
        t2.G(i, j) *= scale;
      }
    }
    Top1Check scaled = check_top1(r2, t2, Polytope::box_only(2), {}, lp);
    CHECK(base.status == scaled.status);
  }
}

TEST_CASE("witness_to_input maps predicate witnesses into the box") {
  InputBox box;
  box.lo = {-2.0, 0.0};
  box.hi = {2.0, 1.0};
  Vec x = witness_to_input(box, {1.0, -1.0});
  CHECK(x == Vec{2.0, 0.0});
  Vec mid = witness_to_input(box, {0.0, 0.0});
  CHECK(mid == Vec{0.0, 0.5});
}

TEST_CASE("validate_epsilon_candidate accepts genuine and rejects spurious") {
  std::mt19937_64 rng(29);
  Network r = gen::random_network(rng, {1, 3, 1});
  Network t_far = gen::shift_output_bias(r, 0, 1.0);
  Network t_near = gen::shift_output_bias(r, 0, 0.1);
  InputBox box = gen::unit_box(1);

  auto genuine = validate_epsilon_candidate(r, t_far, box, {0.5}, 0.5);
  REQUIRE(genuine.has_value());
  CHECK(genuine->deviation == doctest::Approx(1.0));
  CHECK(genuine->y_r == r.eval(genuine->x));
  CHECK(genuine->y_t == t_far.eval(genuine->x));

  auto spurious = validate_epsilon_candidate(r, t_near, box, {0.5}, 0.5);
  CHECK_FALSE(spurious.has_value());
}

TEST_CASE("validate_top1_candidate requires a strict argmax difference") {
  std::mt19937_64 rng(31);
  Network r = gen::random_network(rng, {2, 4, 2});
  Network t_swap = gen::swap_outputs(r, 0, 1);
  InputBox box = gen::unit_box(2);

  bool found = false;
  for (int trial = 0; trial < 64 && !found; ++trial) {
    Vec x = gen::random_box_point(rng, box);
    Vec alpha = {x[0], x[1]};  // unit box: alpha == x
    auto cex = validate_top1_candidate(r, t_swap, box, alpha);
    if (cex) {
      found = true;
      CHECK(cex->argmax_r != cex->argmax_t);
      Vec yr = r.eval(cex->x);
      CHECK(yr[cex->argmax_r] > yr[cex->argmax_t]);
    }
  }
  CHECK(found);

  auto same = validate_top1_candidate(r, r, box, {0.3, 0.3});
  CHECK_FALSE(same.has_value());
}
