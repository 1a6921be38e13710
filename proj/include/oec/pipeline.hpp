#pragma once

// Cascade of partial-coloring levels with geometrically shrinking degree
// bounds, finished by a first-fit greedy tail on whatever is left. Each
// arrival passes through the levels in order; edges colored at one level
// are withheld from the next. Every level and the tail own disjoint colors.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oec/crs.hpp"
#include "oec/graph_stream.hpp"
#include "oec/partial_coloring.hpp"

namespace oec {

struct PlanOverrides {
  std::optional<double> epsilon;    // every level uses this epsilon
  std::optional<double> q;          // per-level decay factor
  std::optional<double> threshold;  // stop once the level bound drops below
  std::optional<double> alpha;
  std::optional<int> max_levels;
};

struct LevelPlan {
  double n = 0.0;
  double delta = 0.0;
  double alpha = 10.0 / 11.0;
  double lambda = 0.0;  // 3 sqrt(2) (ln n / delta)^{alpha/10}
  double q = 0.0;       // e^{-1} + lambda unless overridden
  double threshold = 0.0;  // delta^alpha (ln n)^{1-alpha} unless overridden
  std::vector<LevelConfig> levels;
  int greedy_base = 0;

  int level_count() const { return static_cast<int>(levels.size()); }
  /// Sum of the level palette sizes.
  int level_colors() const;
};

class InfeasibleParameters : public std::runtime_error {
 public:
  InfeasibleParameters(double lambda, double q);
  double lambda() const { return lambda_; }
  double q() const { return q_; }

 private:
  double lambda_;
  double q_;
};

/// Levels are every i with delta q^i >= threshold (delta_i kept real).
/// Throws InfeasibleParameters when q >= 1.
LevelPlan plan_levels(double n, int delta, const PlanOverrides& overrides = {});

/// Only the first level of plan_levels (no decay check), then the tail.
LevelPlan single_level_plan(double n, int delta, const PlanOverrides& overrides = {});

/// No levels: everything goes to the greedy tail starting at color 0.
LevelPlan greedy_plan();

/// First-fit: each edge takes the lowest color >= base free at both ends.
class FirstFit {
 public:
  FirstFit(int n_offline, int color_base);

  /// Colors the given edges of one online node in order; returns global colors.
  std::vector<int> color_arrival(std::span<const int> neighbors);

  int color_base() const { return base_; }
  /// Distinct colors assigned so far.
  int colors_used() const { return colors_used_; }
  bool used_at(int u, int color) const;
  /// Colors currently used at u, ascending.
  std::vector<int> colors_at(int u) const;

 private:
  int base_;
  int colors_used_ = 0;
  std::vector<std::vector<char>> used_;  // per offline node, local color -> used
  std::vector<char> seen_;               // local color ever assigned
};

/// First-fit over a whole validated stream.
EdgeColoring greedy_color(const Instance& instance, int color_base = 0);

struct PickRecord {
  int t = 0;
  int level = 0;
  int offline = 0;
  int color = 0;  // global
  bool won = false;
};

/// Append-only record of one run.
struct Transcript {
  InstanceHeader header;
  std::vector<OnlineArrival> arrivals;
  EdgeColoring coloring;                // global color per edge
  std::vector<std::vector<int>> stage;  // level that colored the edge; level_count = tail
  std::vector<PickRecord> picks;
  int level_count = 0;

  Instance instance() const { return {header, arrivals}; }
};

/// Edges not colored by levels 0..through_level, as an instance in arrival
/// order. Online nodes with nothing left are dropped. The header delta is
/// the observed max residual degree (at least 1).
Instance residual_subgraph(const Transcript& transcript, int through_level = 0);

struct ArrivalResult {
  std::vector<int> colors;         // global color per neighbor
  std::vector<StepOutcome> steps;  // one per level, in level order
  std::vector<int> tail_edges;     // neighbor indices colored by the tail
};

struct CascadeOptions {
  bool record_snapshots = false;
};

/// The online algorithm: levels interleaved per arrival, then the tail.
class CascadeColorer {
 public:
  CascadeColorer(InstanceHeader header, LevelPlan plan, crs::Scheme scheme, std::uint64_t seed,
                 CascadeOptions options = {});

  ArrivalResult process(const OnlineArrival& arrival);

  const LevelPlan& plan() const { return plan_; }
  const std::vector<PartialColoringLevel>& levels() const { return levels_; }
  const FirstFit& tail() const { return tail_; }
  const Transcript& transcript() const { return transcript_; }
  crs::Scheme scheme() const { return scheme_; }
  int arrivals_processed() const { return static_cast<int>(transcript_.arrivals.size()); }

 private:
  LevelPlan plan_;
  crs::Scheme scheme_;
  CascadeOptions options_;
  std::vector<PartialColoringLevel> levels_;
  FirstFit tail_;
  Transcript transcript_;
};

/// Upper bound on colors: level palettes plus 2 * residual max degree - 1.
int cascade_color_bound(const Transcript& transcript, const LevelPlan& plan);

}  // namespace oec
