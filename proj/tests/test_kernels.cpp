#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nnequiv/kernels.hpp"

using namespace nnequiv;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<double> v(n);
  for (auto& e : v) e = dist(rng);
  return v;
}

bool have_avx2() {
  try {
    kern::set_backend(kern::Backend::Avx2);
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

TEST_CASE("scalar kernels: known values") {
  kern::set_backend(kern::Backend::Scalar);
  std::vector<double> x = {1, -2, 3};
  std::vector<double> y = {4, 5, -6};
  CHECK(kern::dot(x.data(), y.data(), 3) == doctest::Approx(1 * 4 - 2 * 5 - 3 * 6));
  CHECK(kern::abs_sum(x.data(), 3) == doctest::Approx(6.0));
  kern::relu(x.data(), 3);
  CHECK(x == std::vector<double>{1, 0, 3});
  kern::axpy(y.data(), 2.0, x.data(), 3);
  CHECK(y == std::vector<double>{6, 5, 0});
}

TEST_CASE("avx2 and scalar backends agree on every size and remainder") {
  if (!have_avx2()) {
    MESSAGE("avx2 unavailable on this machine; skipping equivalence test");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 100u, 257u}) {
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);

    kern::set_backend(kern::Backend::Scalar);
    double dot_s = kern::dot(x.data(), y.data(), n);
    double abs_s = kern::abs_sum(x.data(), n);
    auto relu_s = x;
    kern::relu(relu_s.data(), n);
    auto axpy_s = y;
    kern::axpy(axpy_s.data(), 1.5, x.data(), n);

    kern::set_backend(kern::Backend::Avx2);
    double dot_v = kern::dot(x.data(), y.data(), n);
    double abs_v = kern::abs_sum(x.data(), n);
    auto relu_v = x;
    kern::relu(relu_v.data(), n);
    auto axpy_v = y;
    kern::axpy(axpy_v.data(), 1.5, x.data(), n);

    CHECK(dot_s == doctest::Approx(dot_v).epsilon(1e-12));
    CHECK(abs_s == doctest::Approx(abs_v).epsilon(1e-12));
    CHECK(relu_s == relu_v);  // max is exact in both backends
    for (std::size_t i = 0; i < n; ++i)
      CHECK(axpy_s[i] == doctest::Approx(axpy_v[i]).epsilon(1e-12));
  }
  kern::set_backend(kern::Backend::Scalar);
}

TEST_CASE("matvec agrees across backends including ragged shapes") {
  if (!have_avx2()) return;
  std::mt19937_64 rng(11);
  for (auto [m, n] : std::vector<std::pair<std::size_t, std::size_t>>{
           {1, 1}, {2, 3}, {3, 4}, {5, 5}, {7, 13}, {16, 16}, {10, 33}}) {
    auto w = random_vec(rng, m * n);
    auto x = random_vec(rng, n);
    auto b = random_vec(rng, m);
    std::vector<double> out_s(m), out_v(m);

    kern::set_backend(kern::Backend::Scalar);
    kern::matvec(w.data(), x.data(), b.data(), out_s.data(), m, n);
    kern::set_backend(kern::Backend::Avx2);
    kern::matvec(w.data(), x.data(), b.data(), out_v.data(), m, n);

    for (std::size_t i = 0; i < m; ++i)
      CHECK(out_s[i] == doctest::Approx(out_v[i]).epsilon(1e-12));
  }
  kern::set_backend(kern::Backend::Scalar);
}

TEST_CASE("runtime dispatch picks a working backend") {
  kern::Backend b = kern::active_backend();
  CHECK((b == kern::Backend::Scalar || b == kern::Backend::Avx2));
  std::vector<double> x = {1.0, 2.0};
  CHECK(kern::dot(x.data(), x.data(), 2) == doctest::Approx(5.0));
}
