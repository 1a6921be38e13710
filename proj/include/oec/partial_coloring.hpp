#pragma once

// One level of the palette-plus-contention-resolution partial coloring.
//
// Every offline node starts with the full level palette. When v_t arrives,
// each edge (u, v_t) picks a color uniformly from P(u) and that color leaves
// P(u) for good. For every color picked by at least one edge, the CRS
// chooses one of those edges to receive it; the others stay uncolored here.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oec/crs.hpp"
#include "oec/rng.hpp"

namespace oec {

/// 2 (ln n / delta)^{1/5}.
double epsilon_default(double n, double delta);

/// ceil((1 + sqrt(epsilon)) delta).
int palette_size_for(double delta, double epsilon);

struct LevelConfig {
  double delta = 0.0;  // assumed degree bound (real-valued inside a cascade)
  double epsilon = 0.0;
  int palette_size = 0;
  int color_base = 0;  // global id of local color 0

  static LevelConfig make(double delta, double epsilon, int color_base = 0);
};

/// Available colors per offline node, with O(1) membership and removal.
class PaletteState {
 public:
  PaletteState() = default;
  PaletteState(int n_offline, int palette_size);

  int n_offline() const { return n_; }
  int palette_size() const { return k_; }
  int size(int u) const { return size_[static_cast<std::size_t>(u)]; }
  int removed(int u) const { return k_ - size(u); }
  bool contains(int u, int c) const {
    return pos_[index(u, c)] < size_[static_cast<std::size_t>(u)];
  }
  /// Available colors of u, in no particular order.
  std::span<const int> colors(int u) const {
    return {slots_.data() + index(u, 0), static_cast<std::size_t>(size(u))};
  }
  /// x_uc = 1[c in P(u)] / |P(u)|.
  double x(int u, int c) const {
    return contains(u, c) ? 1.0 / static_cast<double>(size(u)) : 0.0;
  }

  void remove(int u, int c);

 private:
  std::size_t index(int u, int c) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(k_) +
           static_cast<std::size_t>(c);
  }

  int n_ = 0;
  int k_ = 0;
  std::vector<int> slots_;  // per node: available colors first
  std::vector<int> pos_;    // per node: slot of each color
  std::vector<int> size_;
};

PaletteState init_level(int n_offline, const LevelConfig& cfg);

/// Everything one arrival did at one level. Colors are level-local.
struct StepOutcome {
  int t = 0;
  std::vector<int> neighbors;        // offline ids, processing order
  std::vector<int> palette_before;   // |P(u)| at the snapshot
  /// Palette contents at the snapshot; filled only when snapshots are on.
  std::vector<std::vector<int>> snapshot;
  std::vector<int> picks;            // c(e), or -1 when P(u) was empty
  std::vector<int> assigned;         // color won by the edge, or -1
  std::vector<std::pair<int, int>> winners;  // (color, neighbor index), color order
  std::vector<int> skipped;          // neighbor indices with empty palettes

  std::size_t colored() const { return winners.size(); }
  /// x_uc at the snapshot for neighbor index j; requires snapshots.
  double x(std::size_t j, int c) const;
};

/// Runs one arrival through a level. Picks draw from `pick_rng` in neighbor
/// order; CRS calls draw from `crs_rng` in color order.
StepOutcome process_arrival(PaletteState& state, std::span<const int> neighbors,
                            crs::Scheme scheme, Rng& pick_rng, Rng& crs_rng,
                            bool record_snapshot = false, int t = 0);

/// A level as a stateful online algorithm with its own random streams.
class PartialColoringLevel {
 public:
  PartialColoringLevel(int n_offline, LevelConfig cfg, crs::Scheme scheme,
                       std::uint64_t pick_seed, std::uint64_t crs_seed);

  StepOutcome process(std::span<const int> neighbors, int t, bool record_snapshot = false);

  const LevelConfig& config() const { return cfg_; }
  const PaletteState& palettes() const { return state_; }
  crs::Scheme scheme() const { return scheme_; }

  std::size_t edges_in() const { return edges_in_; }
  std::size_t edges_colored() const { return edges_colored_; }
  std::size_t edges_skipped() const { return edges_skipped_; }

 private:
  LevelConfig cfg_;
  crs::Scheme scheme_;
  PaletteState state_;
  Rng pick_rng_;
  Rng crs_rng_;
  std::size_t edges_in_ = 0;
  std::size_t edges_colored_ = 0;
  std::size_t edges_skipped_ = 0;
  bool warned_ = false;
};

}  // namespace oec
