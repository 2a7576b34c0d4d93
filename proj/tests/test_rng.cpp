#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "smoothltf/rng.hpp"

using namespace smoothltf;

TEST_CASE("identical seeds reproduce identical sequences") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams of one master seed are distinct") {
  RngStream a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("child streams are unaffected by parent advancement") {
  RngStream parent(9);
  RngStream child_before = parent.split(3);
  for (int i = 0; i < 100; ++i) parent.next_u64();
  RngStream child_after = parent.split(3);
  for (int i = 0; i < 100; ++i) CHECK(child_before.next_u64() == child_after.next_u64());
}

TEST_CASE("uniform doubles live in [0,1) with mean near 1/2") {
  RngStream rng(1);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // SE of the mean is (1/sqrt(12))/sqrt(n) ~ 6.5e-4.
  CHECK(std::abs(sum / n - 0.5) < 4e-3);
}

TEST_CASE("bernoulli frequency tracks p") {
  RngStream rng(2);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (rng.bernoulli(0.3)) ++hits;
  CHECK(std::abs(hits / double(n) - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / n) + 1e-3);
}

TEST_CASE("rademacher is balanced and gaussian has unit moments") {
  RngStream rng(3);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.rademacher();
  CHECK(std::abs(s / n) < 0.01);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    m1 += g;
    m2 += g * g;
  }
  CHECK(std::abs(m1 / n) < 0.01);
  CHECK(std::abs(m2 / n - 1.0) < 0.02);
}

TEST_CASE("next_below stays in range and covers it") {
  RngStream rng(4);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.next_below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(c > 700);
}
