#include <doctest.h>

#include <set>
#include <utility>

#include "oec/generators.hpp"
#include "oec/pipeline.hpp"

using namespace oec;

namespace {

std::set<std::pair<int, int>> edge_set(const Instance& inst) {
  std::set<std::pair<int, int>> s;
  for (std::size_t t = 0; t < inst.arrivals.size(); ++t)
    for (int u : inst.arrivals[t].neighbors) s.insert({static_cast<int>(t), u});
  return s;
}

std::size_t ff_colors(const Instance& inst) {
  std::set<int> s;
  for (const auto& row : greedy_color(inst).colors) s.insert(row.begin(), row.end());
  return s.size();
}

}  // namespace

TEST_CASE("random regular") {
  const auto k22 = gen_random_regular(2, 2, 5);
  CHECK(edge_set(k22) == std::set<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

  const auto match = gen_random_regular(3, 1, 8);
  CHECK(degree_profile(validate_instance(match)) == std::map<int, int>{{1, 3}});

  const auto big = gen_random_regular(1000, 64, 7);
  const auto ledger = validate_instance(big);
  CHECK(degree_profile(ledger) == std::map<int, int>{{64, 1000}});
  CHECK(online_degree_profile(big) == std::map<int, int>{{64, 1000}});
  CHECK(edge_set(big).size() == 64000);

  CHECK(gen_random_regular(50, 5, 3) == gen_random_regular(50, 5, 3));
  CHECK_FALSE(gen_random_regular(50, 5, 3) == gen_random_regular(50, 5, 4));
  CHECK_THROWS_AS(gen_random_regular(3, 4, 1), GeneratorError);
}

TEST_CASE("random regular property sweep") {
  for (int n = 1; n <= 12; ++n) {
    for (int d = 1; d <= n; ++d) {
      const auto inst = gen_random_regular(n, d, static_cast<std::uint64_t>(n * 31 + d));
      const auto ledger = validate_instance(inst);
      CHECK(degree_profile(ledger) == std::map<int, int>{{d, n}});
      CHECK(edge_set(inst).size() == static_cast<std::size_t>(n * d));
    }
  }
}

TEST_CASE("binomial") {
  const auto none = gen_binomial(10, 10, 0.0, 5, 1);
  CHECK(none.arrivals.empty());
  CHECK(none.header.n_offline == 10);

  const auto full = gen_binomial(6, 4, 1.0, 6, 1);
  CHECK(edge_set(full).size() == 24);
  CHECK(full.arrivals.size() == 4);

  const auto capped = gen_binomial(500, 500, 0.1, 60, 3);
  validate_instance(capped);
  CHECK(realized_max_degree(capped) <= 60);
  CHECK(capped.header.delta == 60);
}

TEST_CASE("greedy-hard forces 2 delta - 1 colors") {
  for (int d = 1; d <= 6; ++d) {
    const int need = greedy_hard_required_size(d);
    const auto inst = gen_greedy_hard(d, need, 17);
    validate_instance(inst);
    CHECK(ff_colors(inst) == static_cast<std::size_t>(2 * d - 1));
    CHECK(realized_max_degree(inst) <= d);
    CHECK(static_cast<int>(inst.arrivals.size()) <= need);
  }
  CHECK(ff_colors(gen_greedy_hard(4, 500, 3)) == 7);
  const int need = greedy_hard_required_size(3);
  try {
    gen_greedy_hard(3, need - 1, 1);
    FAIL("expected BudgetTooSmall");
  } catch (const BudgetTooSmall& e) {
    CHECK(e.required() == need);
  }
}

TEST_CASE("generator names") {
  CHECK(parse_gen_kind("regular") == GenKind::kRegular);
  CHECK(parse_gen_kind("binomial") == GenKind::kBinomial);
  CHECK(parse_gen_kind("greedy-hard") == GenKind::kGreedyHard);
  CHECK(parse_gen_kind("greedy_hard") == GenKind::kGreedyHard);
  CHECK(to_string(GenKind::kGreedyHard) == "greedy_hard");
  CHECK_THROWS(parse_gen_kind("cube"));
}
