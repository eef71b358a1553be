#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "nnequiv/refinement.hpp"

using namespace nnequiv;

TEST_CASE("strategy letters round trip") {
  for (char c : {'E', 'F', 'A', 'M', 'L', 'O'})
    CHECK(strategy_letter(parse_strategy(std::string(1, c))) == c);
  CHECK_THROWS(parse_strategy("X"));
}

TEST_CASE("exact strategy always splits") {
  Strategy s(StrategyKind::Exact);
  CHECK(s.should_split("", 0, 0));
  CHECK(s.should_split("LRLRLR", 6, 0));
}

TEST_CASE("first-refine over-approximates unless forced") {
  Strategy s(StrategyKind::FirstRefineApproxLP);
  CHECK_FALSE(s.should_split("", 0, 0));
  CHECK(s.should_split("", 0, 1));   // refinement raised the floor
  CHECK_FALSE(s.should_split("L", 1, 1));
}

TEST_CASE("running max starts at zero and follows recorded successes") {
  Strategy s(StrategyKind::RunningMax);
  CHECK_FALSE(s.should_split("", 0, 0));  // initial max 0: over-approximate
  s.on_success(2);
  s.on_success(5);
  s.on_success(3);
  CHECK(s.running_max() == 5);
  CHECK(s.last_depth() == 3);
  CHECK(s.should_split("", 4, 0));
  CHECK_FALSE(s.should_split("", 5, 0));
}

TEST_CASE("last-minus-one clamps at zero and tracks the previous path") {
  Strategy s(StrategyKind::LastMinusOne);
  CHECK_FALSE(s.should_split("", 0, 0));  // init 0
  s.on_success(3);
  CHECK(s.should_split("", 1, 0));        // threshold 2
  CHECK_FALSE(s.should_split("", 2, 0));
  s.on_success(0);
  CHECK_FALSE(s.should_split("", 0, 0));  // max(0-1,0) = 0
}

TEST_CASE("oracle replay follows the table by prefix") {
  DepthTable t;
  t.add("LL", 2);
  t.add("LR", 2);
  t.add("R", 1);
  Strategy s(StrategyKind::OracleReplay, t);
  CHECK(s.should_split("", 0, 0));      // entries deeper than 0 extend ""
  CHECK(s.should_split("L", 1, 0));     // "LL","LR" extend "L" with depth 2
  CHECK_FALSE(s.should_split("R", 1, 0));
  CHECK_FALSE(s.should_split("LL", 2, 0));
  CHECK_THROWS(s.should_split("RR", 1, 0));  // no entry extends "RR"
}

TEST_CASE("oracle replay with a depth-0 table over-approximates immediately") {
  DepthTable t;
  t.add("", 0);
  Strategy s(StrategyKind::OracleReplay, t);
  CHECK_FALSE(s.should_split("", 0, 0));
}

TEST_CASE("oracle replay requires a table") {
  CHECK_THROWS(Strategy(StrategyKind::OracleReplay));
}

TEST_CASE("depth table csv round trip, including the root path") {
  DepthTable t;
  t.add("", 0);
  t.add("LRL", 3);
  std::string path = (std::filesystem::temp_directory_path() / "nnequiv_depths.csv").string();
  t.save_csv(path);
  DepthTable back = DepthTable::load_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back.entries()[0] == std::make_pair(std::string(""), 0));
  CHECK(back.entries()[1] == std::make_pair(std::string("LRL"), 3));
  std::remove(path.c_str());
}

TEST_CASE("depth table from a run includes the counterexample path") {
  RunStats stats;
  stats.depth_log.push_back({"L", 1, 2});
  stats.cex_record = DepthRecord{"RL", 2, 3};
  DepthTable t = DepthTable::from_run(stats);
  REQUIRE(t.size() == 2);
  CHECK(t.advice("R", 1) == DepthTable::Advice::Split);
  CHECK(t.advice("RL", 2) == DepthTable::Advice::Overapprox);
}
