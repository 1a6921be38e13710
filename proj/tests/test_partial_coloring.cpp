#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oec/generators.hpp"
#include "oec/partial_coloring.hpp"
#include "oec/pipeline.hpp"

using namespace oec;

TEST_CASE("epsilon_default") {
  for (double n : {3.0, 100.0, 1e6}) {
    CHECK(epsilon_default(n, 32.0 * std::log(n)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // delta = 3200 ln n: 2 / 3200^{1/5} = 2 / 5.0238 = 0.39811.
  CHECK(epsilon_default(std::exp(50.0), 3200.0 * 50.0) == doctest::Approx(0.398107).epsilon(1e-6));
  CHECK(epsilon_default(std::exp(100.0), 3200.0 * 100.0) == doctest::Approx(0.398107).epsilon(1e-6));
  double prev = epsilon_default(1000.0, 1.0);
  for (double d = 2.0; d < 1e6; d *= 2.0) {
    const double e = epsilon_default(1000.0, d);
    CHECK(e < prev);
    prev = e;
  }
  CHECK_THROWS(epsilon_default(1.0, 10.0));
  CHECK_THROWS(epsilon_default(10.0, 0.5));
}

TEST_CASE("palette sizes") {
  CHECK(palette_size_for(100, 0.25) == 150);
  CHECK(palette_size_for(1, 1.0) == 2);
  CHECK(palette_size_for(64, 0.0625) == 80);
  CHECK(palette_size_for(64, 0.1) == 85);  // 64 * 1.3162 = 84.24
  const auto cfg = LevelConfig::make(100, 0.25, 7);
  CHECK(cfg.palette_size == 150);
  CHECK(cfg.color_base == 7);
  const auto st = init_level(5, cfg);
  for (int u = 0; u < 5; ++u) {
    CHECK(st.size(u) == 150);
    CHECK(st.removed(u) == 0);
  }
}

TEST_CASE("palette state removal keeps membership consistent") {
  PaletteState st(2, 6);
  st.remove(0, 3);
  st.remove(0, 0);
  CHECK(st.size(0) == 4);
  CHECK(st.size(1) == 6);
  CHECK_FALSE(st.contains(0, 3));
  CHECK_FALSE(st.contains(0, 0));
  CHECK(st.contains(0, 5));
  CHECK(st.x(0, 5) == doctest::Approx(0.25));
  CHECK(st.x(0, 3) == 0.0);
  const std::set<int> left(st.colors(0).begin(), st.colors(0).end());
  CHECK(left == std::set<int>{1, 2, 4, 5});
}

TEST_CASE("singleton arrival is always colored") {
  Rng pick(1), crs(2);
  std::vector<int> counts(4, 0);
  for (int trial = 0; trial < 4000; ++trial) {
    PaletteState st(1, 4);
    const std::vector<int> nb{0};
    const auto out = process_arrival(st, nb, crs::Scheme::kExpClock, pick, crs);
    REQUIRE(out.colored() == 1);
    REQUIRE(out.assigned[0] == out.picks[0]);
    CHECK(st.size(0) == 3);
    ++counts[static_cast<std::size_t>(out.assigned[0])];
  }
  for (int c : counts) CHECK(std::abs(c - 1000) < 4 * std::sqrt(4000 * 0.25 * 0.75));
}

TEST_CASE("collisions: one winner per color, color gone from both palettes") {
  Rng pick(3), crs(4);
  int collisions = 0;
  for (int trial = 0; trial < 200; ++trial) {
    PaletteState st(2, 2);
    const std::vector<int> nb{0, 1};
    const auto out = process_arrival(st, nb, crs::Scheme::kExpClock, pick, crs, true);
    CHECK(st.size(0) == 1);
    CHECK(st.size(1) == 1);
    CHECK_FALSE(st.contains(0, out.picks[0]));
    CHECK_FALSE(st.contains(1, out.picks[1]));
    if (out.picks[0] == out.picks[1]) {
      ++collisions;
      CHECK(out.colored() == 1);
      CHECK(((out.assigned[0] == -1) != (out.assigned[1] == -1)));
    } else {
      CHECK(out.colored() == 2);
    }
    // x snapshot was taken before any pick.
    CHECK(out.x(0, 0) == doctest::Approx(0.5));
    CHECK(out.x(1, 1) == doctest::Approx(0.5));
  }
  CHECK(collisions > 50);
  CHECK(collisions < 150);
}

TEST_CASE("empty palettes are skipped") {
  Rng pick(5), crs(6);
  PaletteState st(1, 1);
  const std::vector<int> nb{0};
  auto out = process_arrival(st, nb, crs::Scheme::kUniform, pick, crs);
  CHECK(out.colored() == 1);
  out = process_arrival(st, nb, crs::Scheme::kUniform, pick, crs);
  CHECK(out.colored() == 0);
  CHECK(out.skipped == std::vector<int>{0});
  CHECK(out.picks[0] == -1);
  CHECK_THROWS_AS(out.x(0, 0), std::logic_error);
}

TEST_CASE("level run: properness, palette arithmetic, snapshot sums") {
  const auto inst = gen_random_regular(200, 16, 9);
  const auto cfg = LevelConfig::make(16, 0.25);
  PartialColoringLevel level(200, cfg, crs::Scheme::kExpClock, 10, 11);
  std::vector<int> deg(200, 0);
  std::set<int> used;
  std::vector<std::set<int>> at(200);
  for (std::size_t t = 0; t < inst.arrivals.size(); ++t) {
    const auto& nb = inst.arrivals[t].neighbors;
    const auto out = level.process(nb, static_cast<int>(t), true);
    std::set<int> here;
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const int u = nb[j];
      double sum = 0.0;
      for (int c = 0; c < cfg.palette_size; ++c) sum += out.x(j, c);
      CHECK(std::abs(sum - 1.0) < 1e-12);
      CHECK(out.palette_before[j] == cfg.palette_size - deg[static_cast<std::size_t>(u)]);
      ++deg[static_cast<std::size_t>(u)];
      CHECK(level.palettes().size(u) == cfg.palette_size - deg[static_cast<std::size_t>(u)]);
      const int c = out.assigned[j];
      if (c < 0) continue;
      CHECK(here.insert(c).second);
      CHECK(at[static_cast<std::size_t>(u)].insert(c).second);
      used.insert(c);
    }
  }
  CHECK(static_cast<int>(used.size()) <= cfg.palette_size);
  CHECK(level.edges_in() == inst.edge_count());
  CHECK(level.edges_skipped() == 0);
}

TEST_CASE("pick marginals match the snapshot on a frozen two-step fixture") {
  // Node 0 loses one color in step 1; step 2 picks uniformly over the rest.
  const int trials = 200000;
  std::vector<int> counts(4, 0);
  Rng pick(12), crs(13);
  for (int i = 0; i < trials; ++i) {
    PaletteState st(2, 4);
    st.remove(0, 2);
    const std::vector<int> nb{0, 1};
    const auto out = process_arrival(st, nb, crs::Scheme::kExpClock, pick, crs);
    ++counts[static_cast<std::size_t>(out.picks[0])];
  }
  CHECK(counts[2] == 0);
  for (int c : {0, 1, 3}) {
    const double p = 1.0 / 3.0;
    const double se = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(counts[static_cast<std::size_t>(c)] / double(trials) - p) < 4 * se);
  }
}

TEST_CASE("never-selecting scheme leaves everything uncolored but still consumes picks") {
  PartialColoringLevel level(4, LevelConfig::make(2, 1.0), crs::Scheme::kNone, 1, 2);
  const std::vector<int> nb{0, 1};
  const auto out = level.process(nb, 0);
  CHECK(out.colored() == 0);
  CHECK(level.palettes().size(0) == 3);
  CHECK(level.palettes().size(1) == 3);
}
