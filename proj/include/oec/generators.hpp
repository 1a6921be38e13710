#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "oec/graph_stream.hpp"

namespace oec {

enum class GenKind { kRegular, kBinomial, kGreedyHard };

std::string to_string(GenKind kind);
GenKind parse_gen_kind(const std::string& name);

struct GenSpec {
  GenKind kind = GenKind::kRegular;
  int n_offline = 0;
  int n_online = 0;  // binomial only; 0 means n_offline
  int delta = 0;
  double edge_prob = 0.0;  // binomial only
  std::uint64_t seed = 0;
};

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetTooSmall : public GeneratorError {
 public:
  explicit BudgetTooSmall(int required);
  int required() const { return required_; }

 private:
  int required_;
};

/// delta-regular simple bipartite graph on n + n nodes: the union of delta
/// random perfect matchings, with duplicate edges repaired by swapping
/// partners inside the matching being placed.
Instance gen_random_regular(int n, int delta, std::uint64_t seed);

/// Each (online, offline) pair is an edge with probability p; edges that
/// would push either endpoint past delta_cap are dropped in arrival order,
/// and online nodes left without edges are omitted.
Instance gen_binomial(int n_offline, int n_online, double p, int delta_cap, std::uint64_t seed);

/// An instance on which first-fit uses 2 delta - 1 colors. Offline node ids
/// are a seeded random injection into [0, n_budget).
Instance gen_greedy_hard(int delta, int n_budget, std::uint64_t seed);

/// Offline nodes and arrivals gen_greedy_hard needs for this delta.
int greedy_hard_required_size(int delta);

Instance generate(const GenSpec& spec);

}  // namespace oec
