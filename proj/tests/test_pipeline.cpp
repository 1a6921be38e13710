#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oec/generators.hpp"
#include "oec/pipeline.hpp"

using namespace oec;

namespace {

Transcript run_cascade(const Instance& inst, const LevelPlan& plan, crs::Scheme scheme,
                       std::uint64_t seed) {
  CascadeColorer colorer(inst.header, plan, scheme, seed);
  for (const auto& a : inst.arrivals) colorer.process(a);
  return colorer.transcript();
}

std::size_t distinct_colors(const EdgeColoring& col) {
  std::set<int> s;
  for (const auto& row : col.colors) s.insert(row.begin(), row.end());
  return s.size();
}

}  // namespace

TEST_CASE("plan with overrides is a geometric sequence") {
  PlanOverrides ov;
  ov.q = 0.5;
  ov.threshold = 8.0;
  ov.epsilon = 0.25;
  const auto plan = plan_levels(1000, 64, ov);
  REQUIRE(plan.level_count() == 4);
  const double want[] = {64, 32, 16, 8};
  int base = 0;
  for (int i = 0; i < 4; ++i) {
    const auto& l = plan.levels[static_cast<std::size_t>(i)];
    CHECK(l.delta == want[i]);
    CHECK(l.color_base == base);
    CHECK(l.palette_size == static_cast<int>(std::ceil(1.5 * want[i])));
    base += l.palette_size;
  }
  CHECK(plan.greedy_base == base);
  CHECK(plan.level_colors() == base);
  ov.max_levels = 2;
  CHECK(plan_levels(1000, 64, ov).level_count() == 2);
}

TEST_CASE("plan constants follow the formulas") {
  // At delta / ln n = 1e11: (1e-11)^{1/11} = 0.1, so lambda = 0.3 sqrt 2.
  const double lambda = 3.0 * std::sqrt(2.0) * std::pow(1e-11, 1.0 / 11.0);
  CHECK(lambda == doctest::Approx(0.42426).epsilon(1e-5));
  CHECK(std::exp(-1.0) + lambda == doctest::Approx(0.79214).epsilon(1e-5));

  const double n = 1e4;
  const int delta = 1 << 20;
  PlanOverrides ov;
  ov.q = 0.5;
  const auto plan = plan_levels(n, delta, ov);
  CHECK(plan.alpha == doctest::Approx(10.0 / 11.0));
  CHECK(plan.lambda ==
        doctest::Approx(3.0 * std::sqrt(2.0) * std::pow(std::log(n) / delta, 1.0 / 11.0)));
  CHECK(plan.threshold == doctest::Approx(std::pow(delta, 10.0 / 11.0) *
                                          std::pow(std::log(n), 1.0 / 11.0)));
  for (const auto& l : plan.levels) {
    CHECK(l.delta >= plan.threshold);
    CHECK(l.epsilon == doctest::Approx(2.0 * std::pow(std::log(n) / l.delta, 0.2)));
  }
  CHECK(plan.levels.back().delta * 0.5 < plan.threshold);
}

TEST_CASE("default constants are infeasible at desk scale") {
  const double n = 1000.0;
  const int delta = static_cast<int>(32 * std::log(n));
  try {
    plan_levels(n, delta);
    FAIL("expected InfeasibleParameters");
  } catch (const InfeasibleParameters& e) {
    CHECK(e.lambda() == doctest::Approx(3.0 * std::sqrt(2.0) *
                                        std::pow(std::log(n) / delta, 1.0 / 11.0)));
    CHECK(e.q() > 1.0);
  }
  PlanOverrides ov;
  ov.q = 1.0;
  CHECK_THROWS_AS(plan_levels(1000, 64, ov), InfeasibleParameters);
  CHECK_THROWS_AS(plan_levels(2, 64), std::invalid_argument);
}

TEST_CASE("first-fit basics") {
  Instance one{{10, 4}, {{{3, 1, 7, 2}}}};
  const auto col = greedy_color(one, 5);
  CHECK(col.colors[0] == std::vector<int>{5, 6, 7, 8});

  const auto hard = gen_greedy_hard(2, 50, 1);
  CHECK(distinct_colors(greedy_color(hard)) == 3);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = gen_binomial(40, 40, 0.2, 6, seed);
    const auto c = greedy_color(inst);
    CHECK(check_coloring(inst, c).proper());
    CHECK(check_coloring(inst, c).total());
    if (!inst.arrivals.empty())
      CHECK(distinct_colors(c) <= static_cast<std::size_t>(2 * realized_max_degree(inst) - 1));
  }
}

TEST_CASE("cascade output is proper, total, within the bound, and deterministic") {
  const auto inst = gen_random_regular(300, 32, 4);
  PlanOverrides ov;
  ov.q = 0.55;
  ov.epsilon = 0.1;
  ov.threshold = 4.0;
  const auto plan = plan_levels(300, 32, ov);
  const auto t1 = run_cascade(inst, plan, crs::Scheme::kExpClock, 99);
  const auto chk = check_coloring(inst, t1.coloring);
  CHECK(chk.proper());
  CHECK(chk.total());
  const auto used = distinct_colors(t1.coloring);
  CHECK(static_cast<int>(used) <= cascade_color_bound(t1, plan));

  // Level and tail colors stay in their own ranges.
  for (std::size_t t = 0; t < t1.arrivals.size(); ++t) {
    for (std::size_t j = 0; j < t1.arrivals[t].neighbors.size(); ++j) {
      const int st = t1.stage[t][j];
      const int c = t1.coloring.colors[t][j];
      if (st < plan.level_count()) {
        const auto& l = plan.levels[static_cast<std::size_t>(st)];
        CHECK(c >= l.color_base);
        CHECK(c < l.color_base + l.palette_size);
      } else {
        CHECK(c >= plan.greedy_base);
      }
    }
  }

  const auto t2 = run_cascade(inst, plan, crs::Scheme::kExpClock, 99);
  CHECK(t1.coloring == t2.coloring);
  CHECK(t1.stage == t2.stage);
  const auto t3 = run_cascade(inst, plan, crs::Scheme::kExpClock, 100);
  CHECK_FALSE(t1.coloring == t3.coloring);
}

TEST_CASE("a never-selecting scheme degenerates to first-fit on the tail palette") {
  const auto inst = gen_random_regular(60, 8, 2);
  PlanOverrides ov;
  ov.epsilon = 0.5;
  const auto plan = single_level_plan(60, 8, ov);
  const auto tr = run_cascade(inst, plan, crs::Scheme::kNone, 1);
  CHECK(tr.coloring == greedy_color(inst, plan.greedy_base));
  CHECK(residual_subgraph(tr, 0) .arrivals == inst.arrivals);
}

TEST_CASE("residual subgraph") {
  const auto inst = gen_random_regular(20, 3, 5);
  const auto tr = run_cascade(inst, greedy_plan(), crs::Scheme::kExpClock, 0);
  // With no levels everything is residual through level -1 and nothing after.
  CHECK(residual_subgraph(tr, -1).arrivals == inst.arrivals);
  CHECK(residual_subgraph(tr, 0).arrivals.empty());
  CHECK(residual_subgraph(tr, 0).header.delta == 1);

  const Transcript empty{};
  CHECK(residual_subgraph(empty).arrivals.empty());
}

TEST_CASE("empty instance uses no colors") {
  const Instance inst{{5, 2}, {}};
  PlanOverrides ov;
  ov.epsilon = 0.5;
  const auto tr = run_cascade(inst, single_level_plan(5, 2, ov), crs::Scheme::kExpClock, 1);
  CHECK(distinct_colors(tr.coloring) == 0);
}
