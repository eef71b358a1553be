#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nnequiv/network.hpp"
#include "support/gen.hpp"

using namespace nnequiv;

namespace {

const char* kIdentityNet = R"({"layers":[{"weights":[[1.0]],"bias":[0.0],"activation":"linear"}]})";

const char* kReluThenLinear = R"({
  "layers":[
    {"weights":[[1.0]],"bias":[0.0],"activation":"relu"},
    {"weights":[[1.0]],"bias":[0.0],"activation":"linear"}
  ]})";

const char* kAbsGadget = R"({
  "layers":[
    {"weights":[[1.0],[-1.0]],"bias":[0.0,0.0],"activation":"relu"},
    {"weights":[[1.0,1.0]],"bias":[0.0],"activation":"linear"}
  ]})";

}  // namespace

TEST_CASE("identity net loads and evaluates") {
  Network net = parse_network(kIdentityNet);
  CHECK(net.input_dim() == 1);
  CHECK(net.output_dim() == 1);
  CHECK(net.eval({-2.0}) == Vec{-2.0});
}

TEST_CASE("relu clamps negatives") {
  Network net = parse_network(kReluThenLinear);
  CHECK(net.eval({-2.0}) == Vec{0.0});
  CHECK(net.eval({3.0}) == Vec{3.0});
}

TEST_CASE("two-path absolute value gadget") {
  Network net = parse_network(kAbsGadget);
  CHECK(net.eval({3.0}) == Vec{3.0});
  CHECK(net.eval({-3.0}) == Vec{3.0});
  CHECK(net.eval({0.0}) == Vec{0.0});
}

TEST_CASE("dimension mismatch between layers is rejected with the layer named") {
  const char* bad = R"({
    "layers":[
      {"weights":[[1.0,0.0],[0.0,1.0]],"bias":[0.0,0.0],"activation":"relu"},
      {"weights":[[1.0,0.0,0.0]],"bias":[0.0],"activation":"linear"}
    ]})";
  CHECK_THROWS_WITH_AS(parse_network(bad), doctest::Contains("layer 1"), DimensionError);
}

TEST_CASE("non-finite entries are rejected") {
  // json itself refuses nan/inf literals; oversized decimals become inf
  const char* bad = R"({"layers":[{"weights":[[1e999]],"bias":[0.0],"activation":"linear"}]})";
  CHECK_THROWS_AS(parse_network(bad), ParseError);
}

TEST_CASE("trailing relu layer is rejected") {
  const char* bad = R"({"layers":[{"weights":[[1.0]],"bias":[0.0],"activation":"relu"}]})";
  CHECK_THROWS_WITH_AS(parse_network(bad), doctest::Contains("linear"), ParseError);
}

TEST_CASE("bias length mismatch is rejected") {
  const char* bad = R"({"layers":[{"weights":[[1.0],[2.0]],"bias":[0.0],"activation":"linear"}]})";
  CHECK_THROWS_AS(parse_network(bad), DimensionError);
}

TEST_CASE("eval rejects wrong input size") {
  Network net = parse_network(kAbsGadget);
  CHECK_THROWS_AS(net.eval({1.0, 2.0}), DimensionError);
}

TEST_CASE("serialize round-trips to identical evaluation") {
  std::mt19937_64 rng(42);
  Network net = gen::random_network(rng, {3, 4, 3, 2});
  Network back = parse_network(serialize_network(net));
  for (int i = 0; i < 100; ++i) {
    Vec x = gen::random_box_point(rng, gen::unit_box(3));
    CHECK(net.eval(x) == back.eval(x));  // exact: no arithmetic in the trip
  }
}

TEST_CASE("eval is affine within a fixed activation pattern") {
  std::mt19937_64 rng(7);
  Network net = gen::random_network(rng, {2, 4, 2});

  auto pattern = [&](const Vec& x) {
    std::vector<bool> p;
    Vec v = x;
    for (const Layer& l : net.layers) {
      v = matvec(l.weights, v, &l.bias);
      if (l.activation == Activation::ReLU)
        for (double e : v) p.push_back(e > 0.0);
      if (l.activation == Activation::ReLU) kern::relu(v.data(), v.size());
    }
    return p;
  };

  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 20; ++trial) {
    Vec x = gen::random_box_point(rng, gen::unit_box(2));
    Vec y = x;
    for (auto& e : y) e += gen::urand(rng, -0.05, 0.05);
    if (pattern(x) != pattern(y)) continue;
    ++checked;
    double lam = gen::urand(rng, 0.0, 1.0);
    Vec mid(2), expect;
    for (int i = 0; i < 2; ++i) mid[i] = lam * x[i] + (1 - lam) * y[i];
    if (pattern(mid) != pattern(x)) continue;
    Vec fx = net.eval(x), fy = net.eval(y), fmid = net.eval(mid);
    for (std::size_t i = 0; i < fx.size(); ++i)
      CHECK(fmid[i] == doctest::Approx(lam * fx[i] + (1 - lam) * fy[i]).epsilon(1e-9));
  }
  CHECK(checked > 0);
}

TEST_CASE("input box validation") {
  CHECK_THROWS_AS(parse_box(R"({"lo":[0.0],"hi":[-1.0]})"), ParseError);
  CHECK_THROWS_AS(parse_box(R"({"lo":[0.0,1.0],"hi":[1.0]})"), DimensionError);
  InputBox b = parse_box(R"({"lo":[0.0,0.0],"hi":[1.0,2.0]})");
  CHECK(b.dim() == 2);
  InputBox back = parse_box(serialize_box(b));
  CHECK(back.lo == b.lo);
  CHECK(back.hi == b.hi);
}
