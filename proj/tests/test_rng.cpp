#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "oec/rng.hpp"

using oec::derive_seed;
using oec::Rng;

TEST_CASE("derive_seed golden value") {
  CHECK(derive_seed(0, "gen") == 0x27aaa5d926f2c683ULL);
  CHECK(derive_seed(0, "gen") == derive_seed(0, "gen"));
  CHECK(derive_seed(0, "gen") != derive_seed(1, "gen"));
}

TEST_CASE("derive_seed has no collisions over a million labels") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1 << 21);
  int collisions = 0;
  for (int k = 0; k < 1000000; ++k)
    if (!seen.insert(derive_seed(12345, "mc:" + std::to_string(k))).second) ++collisions;
  CHECK(collisions == 0);
}

TEST_CASE("bounded integers stay in range and cover it") {
  Rng rng(7);
  std::vector<int> hits(13, 0);
  for (int i = 0; i < 13000; ++i) {
    const auto v = rng.below(13);
    REQUIRE(v < 13);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("uniform reals lie in their intervals") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform01();
    const double b = rng.uniform_open();
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
    CHECK(b > 0.0);
    CHECK(b < 1.0);
  }
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Rng r1(99), r2(99);
  r1.shuffle(a);
  r2.shuffle(b);
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}
