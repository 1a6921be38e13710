#pragma once

// Analysis quantities for partial-coloring runs: per-color fractional
// loads, good/bad classification, (U, C) probes, martingale traces of the
// probe value, concentration utilities, and run summaries with export.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oec/graph_stream.hpp"
#include "oec/partial_coloring.hpp"
#include "oec/pipeline.hpp"

namespace oec::metrics {

// ---------------------------------------------------------------------------
// Per-step loads.

/// Loads S_c = sum_{u in N(v_t)} x_uc over the level palette.
struct StepLoadReport {
  std::vector<double> load;  // indexed by level-local color
  std::vector<char> good;    // S_c <= 1 + epsilon
  int not_good = 0;
  double total = 0.0;        // equals the number of neighbors with a palette
  double max_load = 0.0;
};

/// Needs a step recorded with snapshots.
StepLoadReport classify_colors(const StepOutcome& step, int palette_size, double epsilon);

// ---------------------------------------------------------------------------
// (U, C) probes.

struct ProbeResult {
  double value = 0.0;
  bool bad = false;  // value > (1 + epsilon) |C|
};

/// ceil(epsilon * delta), the color-set size of a probe.
int probe_color_count(int delta, double epsilon);

/// Throws std::invalid_argument unless |U| == delta and |C| == ceil(epsilon delta).
ProbeResult bad_pair_probe(const PaletteState& state, std::span<const int> nodes,
                           std::span<const int> colors, int delta, double epsilon);

/// C(n, delta) * C(palette, ceil(epsilon delta)) as a double.
double probe_space_size(int n_offline, int delta, int palette_size, double epsilon);

// ---------------------------------------------------------------------------
// Martingale traces.

/// Z_i = sum_{u in U} |C cap P(u)| / |P(u)| after the i-th pick at one level,
/// tracked from the picks alone (independent of PaletteState).
class MartingaleTrace {
 public:
  MartingaleTrace(std::vector<int> nodes, std::vector<int> colors, int palette_size,
                  double delta, double epsilon);

  /// One edge at the level picked `color` at offline node `u`.
  void observe(int u, int color);

  const std::vector<int>& nodes() const { return nodes_; }
  const std::vector<int>& colors() const { return colors_; }
  const std::vector<double>& series() const { return z_; }
  const std::vector<char>& touched() const { return touched_; }

  double z0() const { return z_.front(); }
  /// |U| |C| / palette_size.
  double expected_z0() const;
  double step_bound() const;  // 2 / (sqrt(epsilon) delta)
  double max_step() const { return max_step_; }
  double max_z() const { return max_z_; }
  double drift() const { return z_.back() - z_.front(); }
  double sum_sq_increments() const { return sum_sq_; }
  double variance_budget() const { return 2.0 / epsilon_; }
  bool step_bound_ok(double slack = 1e-12) const { return max_step_ <= step_bound() + slack; }
  /// Z changed only on steps whose edge touched U.
  bool touch_discipline_ok() const { return untouched_moves_ == 0; }

 private:
  double current() const;

  std::vector<int> nodes_;
  std::vector<int> colors_;
  std::vector<char> in_c_;         // membership over level-local colors
  std::vector<int> slot_of_;       // offline id -> index in nodes_, or -1
  std::vector<int> palette_left_;  // |P(u)| per traced node
  std::vector<int> c_left_;        // |C cap P(u)| per traced node
  int palette_size_;
  double delta_;
  double epsilon_;
  std::vector<double> z_;
  std::vector<char> touched_;
  double max_step_ = 0.0;
  double max_z_ = 0.0;
  double sum_sq_ = 0.0;
  int untouched_moves_ = 0;
};

/// exp(-lambda^2 / (2 (sigma2 + A lambda / 3))).
double freedman_bound(double sigma2, double step_a, double lambda);

/// Left side (1 - e^{-1-x}) / (1 + x) of the auxiliary inequality.
double aux_lhs(double x);
/// Right side 1 - e^{-1} - x.
double aux_rhs(double x);

// ---------------------------------------------------------------------------
// Run summaries.

struct LevelSummary {
  double delta_i = 0.0;
  double epsilon_i = 0.0;
  int palette = 0;
  int color_base = 0;
  std::size_t edges_in = 0;
  std::size_t colored = 0;
  std::size_t skipped = 0;
  int colors_used = 0;
  int residual_max_degree = 0;

  double colored_fraction() const {
    return edges_in == 0 ? 0.0 : static_cast<double>(colored) / static_cast<double>(edges_in);
  }
};

/// Step-level observations gathered while the run is in flight.
struct StepMonitor {
  int steps = 0;
  int max_not_good = 0;
  int steps_over_not_good_cap = 0;  // not-good count > ceil(epsilon delta)
  double max_load = 0.0;
  double max_load_excess = 0.0;  // max over steps of (total - neighbors), ideally 0
  int attack_steps = 0;
  double max_attack_ratio = 0.0;  // attacked pair value / ((1 + eps) |C|)
  int attack_bad_steps = 0;

  void add_loads(const StepLoadReport& r, std::size_t live_neighbors, int not_good_cap);
  void add_attack(double value, std::size_t color_count, double epsilon);
};

struct TraceSummary {
  double z0 = 0.0;
  double expected_z0 = 0.0;
  double max_z = 0.0;
  double drift = 0.0;
  double max_step = 0.0;
  double step_bound = 0.0;
  double sum_sq = 0.0;
  double variance_budget = 0.0;
  std::size_t length = 0;
  bool step_ok = true;
};

TraceSummary summarize(const MartingaleTrace& trace);

struct RunMetrics {
  std::size_t arrivals = 0;
  std::size_t edges = 0;
  int colors_used = 0;
  int realized_delta = 0;
  double ratio = 0.0;  // colors_used / realized_delta
  std::vector<LevelSummary> per_level;
  int tail_colors = 0;
  std::size_t tail_edges = 0;
  int color_bound = 0;
  std::size_t conflicts = 0;
  std::size_t uncolored = 0;
  /// Edges of each online node colored at level 0 (occupied bins).
  std::vector<int> level0_occupancy;
  StepMonitor monitor;
  std::vector<TraceSummary> traces;
};

/// Thrown when the independent checker finds a conflict or a gap.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Totals recomputed from the transcript; throws ValidationFailure if the
/// coloring is improper or partial.
RunMetrics run_summary(const Transcript& transcript, const LevelPlan& plan);

// ---------------------------------------------------------------------------
// Export.

struct LoadRow {
  int t = 0;
  int color = 0;  // global
  double load = 0.0;
  bool good = true;
};

void write_loads_csv(std::ostream& out, std::span<const LoadRow> rows);
void write_trace_csv(std::ostream& out, const MartingaleTrace& trace);
/// Edge list t,offline,color,stage.
void write_coloring_csv(std::ostream& out, const Transcript& transcript);

struct ColoringTotals {
  std::size_t edges = 0;
  int colors_used = 0;
  int realized_delta = 0;
  double ratio = 0.0;
};
ColoringTotals read_coloring_csv(std::istream& in);

nlohmann::json manifest_json(const nlohmann::json& config, const std::string& config_hash,
                             std::uint64_t seed, const RunMetrics& m);

}  // namespace oec::metrics
