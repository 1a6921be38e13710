#include <doctest.h>

#include "oec/expectimax.hpp"

using namespace oec::expectimax;

TEST_CASE("delta 1 needs one color") {
  for (int n = 1; n <= 5; ++n) {
    const auto r = solve_deterministic(n, 1, n, 3);
    CHECK(r.value == 1.0);
    CHECK_FALSE(r.infeasible);
  }
}

TEST_CASE("a cap below delta is infeasible") {
  const auto r = solve_deterministic(4, 3, 4, 2);
  CHECK(r.infeasible);
  CHECK(r.value == 3.0);  // cap + 1
  CHECK(solve_deterministic_uncached(3, 2, 2, 1) == 2);
}

TEST_CASE("limits") {
  CHECK_THROWS_AS(solve_deterministic(9, 2, 4, 3), LimitExceeded);
  CHECK_THROWS_AS(solve_deterministic(5, 4, 4, 7), LimitExceeded);
  CHECK_THROWS_AS(solve_deterministic(5, 2, 4, 9), LimitExceeded);
  CHECK_THROWS_AS(solve_deterministic(2, 3, 2, 5), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_randomized(FirstFitPolicy{}, 9, 2, 4, 3), LimitExceeded);
}

TEST_CASE("memoized and uncached solvers agree at n <= 4, delta <= 2") {
  for (int n = 1; n <= 4; ++n)
    for (int d = 1; d <= std::min(2, n); ++d)
      for (int arrivals = 0; arrivals <= n; ++arrivals)
        for (int cap = 1; cap <= 2 * d; ++cap) {
          CAPTURE(n);
          CAPTURE(d);
          CAPTURE(arrivals);
          CAPTURE(cap);
          CHECK(solve_deterministic(n, d, arrivals, cap).value ==
                solve_deterministic_uncached(n, d, arrivals, cap));
        }
}

TEST_CASE("deterministic values lie in [delta, 2 delta - 1] and grow with budgets") {
  for (int d = 1; d <= 2; ++d) {
    double prev_n = 0.0;
    for (int n = std::max(d, 2); n <= 7; ++n) {
      double prev_a = 0.0;
      for (int a = 1; a <= n; ++a) {
        const auto r = solve_deterministic(n, d, a, 2 * d - 1);
        CHECK_FALSE(r.infeasible);
        CHECK(r.value >= d);
        CHECK(r.value <= 2 * d - 1);
        CHECK(r.value >= prev_a);
        prev_a = r.value;
      }
      CHECK(prev_a >= prev_n);
      prev_n = prev_a;
    }
  }
  CHECK(solve_deterministic(6, 2, 6, 3).value == 3.0);
  CHECK(solve_deterministic(5, 3, 5, 5).value >= 3.0);
}

TEST_CASE("feasibility only improves as the cap grows") {
  bool feasible = false;
  for (int cap = 1; cap <= 5; ++cap) {
    const auto r = solve_deterministic(5, 2, 5, cap);
    if (feasible) CHECK_FALSE(r.infeasible);
    feasible = !r.infeasible;
  }
  CHECK(feasible);
}

TEST_CASE("first-fit is pushed to 2 delta - 1 at delta 2") {
  const auto r = evaluate_randomized(FirstFitPolicy{}, 6, 2, 6, 4);
  CHECK(r.value == doctest::Approx(3.0));
  CHECK_FALSE(r.trace.empty());
  for (const auto& s : r.trace) CHECK(s.probability == 1.0);
}

TEST_CASE("a single arrival costs exactly delta") {
  for (int d = 1; d <= 3; ++d) {
    CHECK(evaluate_randomized(FirstFitPolicy{}, 4, d, 1, 6).value == doctest::Approx(d));
    CHECK(evaluate_randomized(UniformPolicy{}, 4, d, 1, 6).value == doctest::Approx(d));
  }
}

TEST_CASE("uniform policy") {
  const auto r = evaluate_randomized(UniformPolicy{}, 5, 2, 5, 4);
  CHECK(r.value >= 2.0);
  CHECK(r.value <= 5.0);

  UniformPolicy up;
  const auto dist = up.distribution({NodeSig{0b01, 1}, NodeSig{0, 1}}, 0b01, 3);
  double total = 0.0;
  for (const auto& [p, cols] : dist) {
    total += p;
    CHECK(cols[0] != 0);
    CHECK(cols[0] != cols[1]);
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("policy factory and state canonicalization") {
  CHECK(make_policy("first-fit")->name() == "first-fit");
  CHECK(make_policy("uniform")->name() == "uniform");
  CHECK_THROWS(make_policy("best"));

  auto s = GameState::initial(3, 2, 3);
  CHECK(s.nodes.size() == 3);
  s.nodes[0] = {0b1, 0};
  s.nodes[2] = {0b10, 1};
  s.canonicalize();
  CHECK(s.nodes.size() == 2);
  auto t = GameState::initial(3, 2, 3);
  t.nodes[0] = {0b10, 1};
  t.nodes[1] = {0b1, 0};
  t.canonicalize();
  CHECK(s.key() == t.key());
}

namespace {

class BrokenPolicy final : public ColorPolicy {
 public:
  std::vector<std::pair<double, std::vector<int>>> distribution(
      const std::vector<NodeSig>& nbrs, std::uint32_t, int) const override {
    return {{0.7, std::vector<int>(nbrs.size(), 0)}};
  }
  std::string name() const override { return "broken"; }
};

}  // namespace

TEST_CASE("distributions must sum to one") {
  CHECK_THROWS_AS(evaluate_randomized(BrokenPolicy{}, 3, 1, 2, 3), PolicyError);
}
