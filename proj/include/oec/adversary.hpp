#pragma once

// Arrival sources. An oblivious source replays a fixed instance; adaptive
// sources choose each arrival after inspecting everything the algorithm
// has done so far (palettes, picks, assignments).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oec/graph_stream.hpp"
#include "oec/pipeline.hpp"

namespace oec {

/// Read-only window onto a run in progress.
struct AdversaryView {
  const InstanceHeader& header;
  const DegreeLedger& ledger;
  const CascadeColorer& colorer;

  const Transcript& transcript() const { return colorer.transcript(); }
  const LevelPlan& plan() const { return colorer.plan(); }
};

class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  /// The next arrival, or nullopt to end the stream.
  virtual std::optional<OnlineArrival> next(const AdversaryView& view) = 0;
  virtual std::string name() const = 0;
};

class ReplaySource final : public ArrivalSource {
 public:
  explicit ReplaySource(Instance instance) : instance_(std::move(instance)) {}
  std::optional<OnlineArrival> next(const AdversaryView& view) override;
  std::string name() const override { return "replay"; }
  const Instance& instance() const { return instance_; }

 private:
  Instance instance_;
  std::size_t cursor_ = 0;
};

/// A (U, C) pair and its fractional mass sum_{u in U} sum_{c in C} x_uc.
struct LoadPair {
  std::vector<int> nodes;   // U, ascending
  std::vector<int> colors;  // C, level-local, ascending
  double value = 0.0;
};

/// Fractional palette seen by the load attacker: the level palette when the
/// algorithm has one, otherwise the colors in [0, 2 delta - 1) still free at
/// each node under the greedy tail.
class LoadField {
 public:
  LoadField(const AdversaryView& view, int level, int delta);

  int color_count() const { return k_; }
  double x(int u, int c) const;
  /// Colors with x_uc > 0.
  std::vector<int> support(int u) const;

 private:
  const PaletteState* palettes_ = nullptr;
  const FirstFit* tail_ = nullptr;
  std::vector<int> free_;  // tail fallback: free colors below k_ per node
  int k_ = 0;
};

struct LoadAttackerParams {
  int delta = 0;
  double color_frac = 0.1;  // |C| = ceil(color_frac * delta)
  int arrivals_budget = 0;
  int level = 0;            // which cascade level to attack
};

/// Chooses C as the ceil(eps' delta) colors of largest total mass over nodes
/// with spare degree, then U as the delta such nodes of largest mass on C,
/// then alternates best responses while the pair value improves. When there
/// are at most kExhaustiveLimit candidate sets U, every U is tried instead
/// and the pair is optimal. Ties go to the lowest ids. Emits U.
class LoadAttacker final : public ArrivalSource {
 public:
  static constexpr std::uint64_t kExhaustiveLimit = 4096;

  explicit LoadAttacker(LoadAttackerParams params) : params_(params) {}
  std::optional<OnlineArrival> next(const AdversaryView& view) override;
  std::string name() const override { return "load-attacker"; }

  /// Pair behind the most recent arrival.
  const std::optional<LoadPair>& last_pair() const { return last_; }
  /// The plain two-stage pair (no alternation) for the current view.
  LoadPair two_stage_pair(const AdversaryView& view) const;
  /// The pair next() would use for the current view.
  LoadPair best_pair(const AdversaryView& view) const;

 private:
  LoadAttackerParams params_;
  std::optional<LoadPair> last_;
};

struct GreedyKillerParams {
  int delta = 0;
  int n_offline = 0;
  int arrivals_budget = 0;
};

/// Adaptive witness for first-fit's 2 delta - 1 colors. Offline nodes are
/// grouped by the colors incident to them. While fewer than delta nodes
/// share a color set at degree delta - 1, it presents one node from each
/// degree class in increasing degree order, which under first-fit advances
/// each by one fresh color. Then it presents delta nodes with identical
/// color sets, each of whose edges must take a new color.
class GreedyKiller final : public ArrivalSource {
 public:
  explicit GreedyKiller(GreedyKillerParams params);
  std::optional<OnlineArrival> next(const AdversaryView& view) override;
  std::string name() const override { return "greedy-killer"; }

 private:
  void catch_up(const Transcript& transcript);

  GreedyKillerParams params_;
  std::vector<std::vector<int>> sets_;  // sorted incident colors per offline node
  std::size_t seen_arrivals_ = 0;
};

}  // namespace oec
