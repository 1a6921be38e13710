#include <doctest.h>

#include <sstream>

#include "oec/graph_stream.hpp"

using namespace oec;

namespace {

Instance parse(const std::string& text) {
  std::istringstream in(text);
  return load_instance(in);
}

}  // namespace

TEST_CASE("load_instance parses a header and arrivals") {
  const Instance inst = parse("{\"n_offline\":3,\"delta\":2}\n{\"neighbors\":[0,2]}\n");
  CHECK(inst.header.n_offline == 3);
  CHECK(inst.header.delta == 2);
  REQUIRE(inst.arrivals.size() == 1);
  CHECK(inst.arrivals[0].neighbors == std::vector<int>{0, 2});
  CHECK(inst.edge_count() == 2);
}

TEST_CASE("zero arrivals is a valid instance") {
  const Instance inst = parse("{\"n_offline\":4,\"delta\":1}\n");
  CHECK(inst.arrivals.empty());
  const DegreeLedger ledger = validate_instance(inst);
  CHECK(degree_profile(ledger) == std::map<int, int>{{0, 4}});
}

TEST_CASE("load errors") {
  CHECK_THROWS_WITH_AS(parse("{\"n_offline\":3,\"delta\":2}\n{\"neighbors\":[0,0]}\n"),
                       doctest::Contains("duplicate neighbor 0"), ParseError);
  CHECK_THROWS_WITH_AS(parse("{\"n_offline\":3,\"delta\":2}\n{\"neighbors\":[0,3]}\n"),
                       doctest::Contains("offline id 3 out of range"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("{\"n_offline\":3,\"delta\":4}\n"), StreamError);
  try {
    parse("{\"n_offline\":3,\"delta\":2}\n{\"neighbors\":[0]}\nnot json\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("serialize round-trips") {
  const std::string text =
      "{\"delta\":2,\"n_offline\":3}\n{\"neighbors\":[0,2]}\n{\"neighbors\":[1]}\n";
  const Instance inst = parse(text);
  CHECK(serialize_instance(inst) == text);
  CHECK(parse(serialize_instance(inst)) == inst);
}

TEST_CASE("validate_arrival enforces degrees") {
  const InstanceHeader h{3, 2};
  DegreeLedger ledger(3);
  validate_arrival(h, ledger, {{0, 1}});
  validate_arrival(h, ledger, {{0, 1}});
  CHECK(ledger.degree(0) == 2);
  CHECK(ledger.degree(1) == 2);
  CHECK(degree_profile(ledger) == std::map<int, int>{{0, 1}, {2, 2}});
  try {
    validate_arrival(h, ledger, {{0}});
    FAIL("expected DegreeExceeded");
  } catch (const DegreeExceeded& e) {
    CHECK(e.node() == 0);
  }
  CHECK(ledger.arrivals_seen() == 2);
}

TEST_CASE("validate_arrival rejects oversized arrivals") {
  DegreeLedger ledger(3);
  CHECK_THROWS_AS(validate_arrival({3, 1}, ledger, {{0, 1, 2}}), ArrivalSizeError);
}

TEST_CASE("arrival budget defaults to n_offline") {
  const InstanceHeader h{2, 2};
  DegreeLedger ledger(2);
  validate_arrival(h, ledger, {{0}});
  validate_arrival(h, ledger, {{1}});
  CHECK_THROWS_AS(validate_arrival(h, ledger, {{0}}), ArrivalBudgetExceeded);
  DegreeLedger roomy(2);
  ValidationOptions opts;
  opts.arrival_budget = 3;
  for (int i = 0; i < 3; ++i) validate_arrival(h, roomy, {{i % 2}}, opts);
  CHECK(roomy.arrivals_seen() == 3);
}

TEST_CASE("permissive mode drops offending neighbors") {
  const InstanceHeader h{3, 1};
  DegreeLedger ledger(3);
  ValidationOptions opts;
  opts.permissive = true;
  validate_arrival(h, ledger, {{0}}, opts);
  const auto accepted = validate_arrival(h, ledger, {{0}}, opts);
  CHECK(accepted.neighbors.empty());
  CHECK(ledger.arrivals_seen() == 1);
}

TEST_CASE("check_coloring finds conflicts on both sides") {
  Instance inst;
  inst.header = {3, 2};
  inst.arrivals = {{{0, 1}}, {{0, 2}}};
  EdgeColoring good{{{0, 1}, {1, 0}}};
  const auto ok = check_coloring(inst, good);
  CHECK(ok.proper());
  CHECK(ok.total());
  CHECK(ok.colors_used == 2);

  EdgeColoring online_clash{{{0, 0}, {1, 0}}};
  CHECK(check_coloring(inst, online_clash).conflicts >= 1);
  EdgeColoring offline_clash{{{0, 1}, {0, 1}}};
  CHECK(check_coloring(inst, offline_clash).conflicts >= 1);
  EdgeColoring partial{{{0, kUncolored}, {1, 0}}};
  const auto p = check_coloring(inst, partial);
  CHECK(p.proper());
  CHECK(p.uncolored == 1);
  EdgeColoring misshapen{{{0}}};
  CHECK_FALSE(check_coloring(inst, misshapen).proper());
}

TEST_CASE("realized max degree looks at both sides") {
  Instance inst;
  inst.header = {4, 3};
  inst.arrivals = {{{0, 1, 2}}, {{0}}};
  CHECK(realized_max_degree(inst) == 3);
  CHECK(online_degree_profile(inst) == std::map<int, int>{{1, 1}, {3, 1}});
}
