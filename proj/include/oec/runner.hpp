#pragma once

// Run configuration, single-run execution, and multi-run sweeps.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oec/adversary.hpp"
#include "oec/crs.hpp"
#include "oec/generators.hpp"
#include "oec/metrics.hpp"
#include "oec/pipeline.hpp"

namespace oec {

/// Process exit codes shared by the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitValidation = 3,
  kExitRun = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algo { kGreedy, kPartial, kPipeline };
std::string to_string(Algo a);
Algo parse_algo(const std::string& name);

enum class SourceKind { kFile, kGenerator, kAdversary };

using KeyValues = std::map<std::string, std::string>;

/// Flat key=value lines; '#' starts a comment.
KeyValues parse_kv_text(const std::string& text);
KeyValues read_kv_file(const std::string& path);

struct RunConfig {
  Algo algo = Algo::kPipeline;
  SourceKind source = SourceKind::kGenerator;

  std::string input;  // file source
  GenKind gen = GenKind::kRegular;
  std::string adversary;  // "load-attacker" or "greedy-killer"
  int n = 0;              // offline nodes (generator or adversary)
  int delta = 0;
  int n_online = 0;       // binomial generator; 0 means n
  double p = 0.0;         // binomial generator
  int arrivals = 0;       // arrival budget; 0 means n_offline
  double color_frac = 0.0;  // load attacker |C| / delta; 0 means the level epsilon

  PlanOverrides overrides;
  std::optional<double> threshold_frac;  // threshold = frac * delta
  crs::Scheme crs = crs::Scheme::kExpClock;
  bool permissive = false;
  bool monitor = false;  // per-step loads (needs palette snapshots)
  int trace_pairs = 0;

  std::uint64_t seed = 0;

  std::string manifest_path;
  std::string loads_path;  // per-step loads CSV (key "metrics")
  std::string coloring_path;
  std::string trace_dir;

  /// Keys recognized by from_kv (the same names as the run flags).
  static const std::vector<std::string>& keys();
  /// Throws ConfigError on unknown keys, bad values, or not exactly one
  /// input source (input / gen / adversary).
  static RunConfig from_kv(const KeyValues& kv);

  /// Canonical key=value form of everything that shapes the run except the
  /// seed and output paths.
  KeyValues canonical() const;
  std::string canonical_text() const;
  /// FNV-1a of canonical_text, 16 hex digits.
  std::string config_hash() const;
};

struct RunResult {
  metrics::RunMetrics metrics;
  nlohmann::json manifest;
  Transcript transcript;
  std::vector<metrics::MartingaleTrace> traces;
  std::vector<metrics::LoadRow> loads;
};

/// The cascade plan the config calls for on this header.
LevelPlan plan_for(const RunConfig& cfg, const InstanceHeader& header);

/// Runs one configuration and writes any requested outputs. Throws
/// ConfigError, StreamError or metrics::ValidationFailure, or other
/// std::exception for run errors.
RunResult execute_run(const RunConfig& cfg);

/// Maps the exception in flight to an exit code; call inside a catch block.
int exit_code_for_current_exception(std::string& message);

struct SweepOptions {
  std::vector<int> deltas;
  int seeds = 1;
  int jobs = 1;
  std::string out_dir;  // manifests and the aggregate CSV; empty writes nothing
};

struct SweepCell {
  int delta = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  int exit_code = 0;
  std::string error;
  double ratio = 0.0;
  double colored_fraction = 0.0;  // level 0, or 0 without levels
  double residual_decay = 0.0;    // level-0 residual max degree / delta
  nlohmann::json manifest;
};

struct SweepRow {
  int delta = 0;
  int runs = 0;
  int failures = 0;
  double mean_ratio = 0.0;
  double sd_ratio = 0.0;
  double mean_colored_fraction = 0.0;
  double sd_colored_fraction = 0.0;
  double mean_residual_decay = 0.0;
  double sd_residual_decay = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // delta-major, then seed index
  std::vector<SweepRow> rows;    // one per delta, in input order
  int failures() const;
};

/// Runs every (delta, seed index) cell of the template. Cell seeds are
/// derive_seed(template seed, "seed:<k>"). Failed cells are recorded and
/// the sweep carries on.
SweepResult sweep(const RunConfig& tmpl, const SweepOptions& options);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace oec
