#pragma once

// Exact game values at toy scale. The adversary presents online nodes (each
// a set of at most delta offline nodes with spare degree); the algorithm
// colors the new edges properly from a palette of color_cap colors. The
// payoff is the number of distinct colors used once the arrival budget runs
// out. An algorithm that cannot color properly within the cap scores
// color_cap + 1.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oec::expectimax {

inline constexpr int kMaxOffline = 8;
inline constexpr int kMaxDelta = 3;
inline constexpr int kMaxColorCap = 8;

class LimitExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An offline node as the game sees it.
struct NodeSig {
  std::uint8_t mask = 0;    // colors already on its edges
  std::uint8_t budget = 0;  // edges it may still receive

  auto operator<=>(const NodeSig&) const = default;
};

struct GameState {
  std::vector<NodeSig> nodes;  // canonical: budget > 0 only, sorted
  std::uint32_t used = 0;      // colors used anywhere
  int arrivals_left = 0;

  static GameState initial(int n_off, int delta, int arrival_budget);
  void canonicalize();
  std::string key() const;
};

struct TraceStep {
  std::vector<NodeSig> neighbors;  // in presentation order
  std::vector<int> colors;         // -1 if the algorithm got stuck
  double probability = 1.0;        // of this outcome given the arrival
  double value = 0.0;              // game value before the arrival

  std::string to_string() const;
};

struct SolveResult {
  double value = 0.0;
  bool infeasible = false;  // value exceeds color_cap
  std::vector<TraceStep> trace;
  std::size_t states = 0;   // memo entries
};

/// min over deterministic algorithms of max over adaptive adversaries.
/// Limits: n_off <= 8, delta <= 3, color_cap <= 8.
SolveResult solve_deterministic(int n_off, int delta, int arrival_budget, int color_cap);

/// Same value by plain recursion over raw node ids and raw colors, no memo
/// and no symmetry reduction. Only practical for tiny inputs.
int solve_deterministic_uncached(int n_off, int delta, int arrival_budget, int color_cap);

/// A randomized online algorithm given as exact distributions over colorings
/// of one arrival. Neighbors are in presentation order.
class ColorPolicy {
 public:
  virtual ~ColorPolicy() = default;
  /// Outcomes (probability, colors); a color of -1 means no proper color.
  virtual std::vector<std::pair<double, std::vector<int>>> distribution(
      const std::vector<NodeSig>& neighbors, std::uint32_t used, int color_cap) const = 0;
  virtual std::string name() const = 0;
};

/// Lowest color free at the node and unused within the arrival.
class FirstFitPolicy final : public ColorPolicy {
 public:
  std::vector<std::pair<double, std::vector<int>>> distribution(
      const std::vector<NodeSig>& neighbors, std::uint32_t used, int color_cap) const override;
  std::string name() const override { return "first-fit"; }
};

/// Each edge in turn takes a uniformly random color among those still valid.
class UniformPolicy final : public ColorPolicy {
 public:
  std::vector<std::pair<double, std::vector<int>>> distribution(
      const std::vector<NodeSig>& neighbors, std::uint32_t used, int color_cap) const override;
  std::string name() const override { return "uniform"; }
};

std::unique_ptr<ColorPolicy> make_policy(const std::string& name);

/// Worst-case expected colors of `policy` against adaptive adversaries that
/// also choose the order of each neighborhood. The trace follows the
/// adversary's best moves and the most likely outcome at each chance node.
SolveResult evaluate_randomized(const ColorPolicy& policy, int n_off, int delta,
                                int arrival_budget, int color_cap);

}  // namespace oec::expectimax
