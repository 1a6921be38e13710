#include "oec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace oec::metrics {

StepLoadReport classify_colors(const StepOutcome& step, int palette_size, double epsilon) {
  if (step.snapshot.size() != step.neighbors.size())
    throw std::invalid_argument("classify_colors needs a step recorded with snapshots");
  StepLoadReport r;
  r.load.assign(static_cast<std::size_t>(palette_size), 0.0);
  for (const auto& pal : step.snapshot) {
    if (pal.empty()) continue;
    const double share = 1.0 / static_cast<double>(pal.size());
    for (int c : pal) r.load[static_cast<std::size_t>(c)] += share;
    r.total += 1.0;
  }
  r.good.resize(r.load.size());
  for (std::size_t c = 0; c < r.load.size(); ++c) {
    const bool good = r.load[c] <= 1.0 + epsilon;
    r.good[c] = good ? 1 : 0;
    if (!good) ++r.not_good;
    r.max_load = std::max(r.max_load, r.load[c]);
  }
  return r;
}

int probe_color_count(int delta, double epsilon) {
  return static_cast<int>(std::ceil(epsilon * delta - 1e-12));
}

ProbeResult bad_pair_probe(const PaletteState& state, std::span<const int> nodes,
                           std::span<const int> colors, int delta, double epsilon) {
  const int want = probe_color_count(delta, epsilon);
  if (static_cast<int>(nodes.size()) != delta || static_cast<int>(colors.size()) != want) {
    std::ostringstream msg;
    msg << "probe size mismatch: |U|=" << nodes.size() << " (want " << delta << "), |C|="
        << colors.size() << " (want " << want << ")";
    throw std::invalid_argument(msg.str());
  }
  ProbeResult r;
  for (int u : nodes)
    for (int c : colors) r.value += state.x(u, c);
  r.bad = r.value > (1.0 + epsilon) * static_cast<double>(colors.size());
  return r;
}

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return std::round(r);
}

}  // namespace

double probe_space_size(int n_offline, int delta, int palette_size, double epsilon) {
  return binom(n_offline, delta) * binom(palette_size, probe_color_count(delta, epsilon));
}

MartingaleTrace::MartingaleTrace(std::vector<int> nodes, std::vector<int> colors,
                                 int palette_size, double delta, double epsilon)
    : nodes_(std::move(nodes)),
      colors_(std::move(colors)),
      palette_size_(palette_size),
      delta_(delta),
      epsilon_(epsilon) {
  if (palette_size_ < 1) throw std::invalid_argument("trace needs a nonempty palette");
  in_c_.assign(static_cast<std::size_t>(palette_size_), 0);
  for (int c : colors_) {
    if (c < 0 || c >= palette_size_) throw std::invalid_argument("trace color out of range");
    in_c_[static_cast<std::size_t>(c)] = 1;
  }
  int max_id = -1;
  for (int u : nodes_) max_id = std::max(max_id, u);
  slot_of_.assign(static_cast<std::size_t>(max_id + 1), -1);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    slot_of_[static_cast<std::size_t>(nodes_[i])] = static_cast<int>(i);
  palette_left_.assign(nodes_.size(), palette_size_);
  c_left_.assign(nodes_.size(), static_cast<int>(colors_.size()));
  z_.push_back(current());
  touched_.push_back(0);
  max_z_ = z_.back();
}

double MartingaleTrace::current() const {
  double z = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (palette_left_[i] > 0)
      z += static_cast<double>(c_left_[i]) / static_cast<double>(palette_left_[i]);
  return z;
}

void MartingaleTrace::observe(int u, int color) {
  const int slot = u >= 0 && u < static_cast<int>(slot_of_.size())
                       ? slot_of_[static_cast<std::size_t>(u)]
                       : -1;
  const bool touch = slot >= 0;
  if (touch) {
    const auto s = static_cast<std::size_t>(slot);
    if (palette_left_[s] > 0) --palette_left_[s];
    if (color >= 0 && color < palette_size_ && in_c_[static_cast<std::size_t>(color)] &&
        c_left_[s] > 0)
      --c_left_[s];
  }
  const double z = touch ? current() : z_.back();
  const double step = z - z_.back();
  if (!touch && step != 0.0) ++untouched_moves_;
  max_step_ = std::max(max_step_, std::abs(step));
  sum_sq_ += step * step;
  max_z_ = std::max(max_z_, z);
  z_.push_back(z);
  touched_.push_back(touch ? 1 : 0);
}

double MartingaleTrace::expected_z0() const {
  return static_cast<double>(nodes_.size()) * static_cast<double>(colors_.size()) /
         static_cast<double>(palette_size_);
}

double MartingaleTrace::step_bound() const { return 2.0 / (std::sqrt(epsilon_) * delta_); }

double freedman_bound(double sigma2, double step_a, double lambda) {
  if (sigma2 < 0 || step_a < 0 || lambda < 0)
    throw std::invalid_argument("freedman_bound needs nonnegative inputs");
  if (lambda == 0.0) return 1.0;
  return std::exp(-lambda * lambda / (2.0 * (sigma2 + step_a * lambda / 3.0)));
}

double aux_lhs(double x) { return -std::expm1(-1.0 - x) / (1.0 + x); }
double aux_rhs(double x) { return 1.0 - std::exp(-1.0) - x; }

void StepMonitor::add_loads(const StepLoadReport& r, std::size_t live_neighbors,
                            int not_good_cap) {
  ++steps;
  max_not_good = std::max(max_not_good, r.not_good);
  if (r.not_good > not_good_cap) ++steps_over_not_good_cap;
  max_load = std::max(max_load, r.max_load);
  double sum = 0.0;
  for (double s : r.load) sum += s;
  max_load_excess = std::max(max_load_excess, std::abs(sum - static_cast<double>(live_neighbors)));
}

void StepMonitor::add_attack(double value, std::size_t color_count, double epsilon) {
  if (color_count == 0) return;
  ++attack_steps;
  const double cap = (1.0 + epsilon) * static_cast<double>(color_count);
  max_attack_ratio = std::max(max_attack_ratio, value / cap);
  if (value > cap) ++attack_bad_steps;
}

TraceSummary summarize(const MartingaleTrace& trace) {
  TraceSummary s;
  s.z0 = trace.z0();
  s.expected_z0 = trace.expected_z0();
  s.max_z = trace.max_z();
  s.drift = trace.drift();
  s.max_step = trace.max_step();
  s.step_bound = trace.step_bound();
  s.sum_sq = trace.sum_sq_increments();
  s.variance_budget = trace.variance_budget();
  s.length = trace.series().size();
  s.step_ok = trace.step_bound_ok();
  return s;
}

RunMetrics run_summary(const Transcript& transcript, const LevelPlan& plan) {
  const Instance inst = transcript.instance();
  const ColoringCheck check = check_coloring(inst, transcript.coloring);
  if (!check.proper() || !check.total()) {
    std::ostringstream msg;
    msg << "coloring failed validation: " << check.conflicts << " conflicts, " << check.uncolored
        << " uncolored, " << check.shape_errors << " shape errors";
    for (const auto& s : check.samples) msg << "; " << s;
    throw ValidationFailure(msg.str());
  }

  RunMetrics m;
  m.arrivals = inst.arrivals.size();
  m.edges = inst.edge_count();
  m.colors_used = static_cast<int>(check.colors_used);
  m.realized_delta = inst.arrivals.empty() ? 0 : realized_max_degree(inst);
  m.ratio = m.realized_delta == 0 ? 0.0 : static_cast<double>(m.colors_used) / m.realized_delta;

  const int levels = plan.level_count();
  m.per_level.resize(static_cast<std::size_t>(levels));
  std::vector<std::set<int>> level_colors(static_cast<std::size_t>(levels));
  std::set<int> tail_colors;
  std::vector<std::size_t> reached(static_cast<std::size_t>(levels) + 1, 0);
  m.level0_occupancy.assign(inst.arrivals.size(), 0);
  for (std::size_t t = 0; t < inst.arrivals.size(); ++t) {
    const auto& stage = transcript.stage[t];
    const auto& cols = transcript.coloring.colors[t];
    for (std::size_t j = 0; j < stage.size(); ++j) {
      const int s = stage[j];
      // An edge colored at level s passed through levels 0..s.
      for (int i = 0; i <= std::min(s, levels - 1); ++i) ++reached[static_cast<std::size_t>(i)];
      if (s < levels) {
        auto& lv = m.per_level[static_cast<std::size_t>(s)];
        ++lv.colored;
        level_colors[static_cast<std::size_t>(s)].insert(cols[j]);
        if (s == 0) ++m.level0_occupancy[t];
      } else {
        ++m.tail_edges;
        tail_colors.insert(cols[j]);
      }
    }
  }
  for (int i = 0; i < levels; ++i) {
    auto& lv = m.per_level[static_cast<std::size_t>(i)];
    const auto& cfg = plan.levels[static_cast<std::size_t>(i)];
    lv.delta_i = cfg.delta;
    lv.epsilon_i = cfg.epsilon;
    lv.palette = cfg.palette_size;
    lv.color_base = cfg.color_base;
    lv.edges_in = reached[static_cast<std::size_t>(i)];
    lv.colors_used = static_cast<int>(level_colors[static_cast<std::size_t>(i)].size());
    const Instance res = residual_subgraph(transcript, i);
    lv.residual_max_degree = res.arrivals.empty() ? 0 : realized_max_degree(res);
  }
  // Skips come from picks: an edge that reached a level but recorded no pick.
  std::vector<std::size_t> picks_at(static_cast<std::size_t>(levels), 0);
  for (const auto& p : transcript.picks)
    if (p.level >= 0 && p.level < levels) ++picks_at[static_cast<std::size_t>(p.level)];
  for (int i = 0; i < levels; ++i) {
    auto& lv = m.per_level[static_cast<std::size_t>(i)];
    lv.skipped = lv.edges_in - std::min(lv.edges_in, picks_at[static_cast<std::size_t>(i)]);
  }
  m.tail_colors = static_cast<int>(tail_colors.size());
  m.color_bound = cascade_color_bound(transcript, plan);
  m.conflicts = check.conflicts;
  m.uncolored = check.uncolored;
  return m;
}

void write_loads_csv(std::ostream& out, std::span<const LoadRow> rows) {
  out << "t,color,load,good\n";
  const auto old = out.precision(17);
  for (const auto& r : rows)
    out << r.t << ',' << r.color << ',' << r.load << ',' << (r.good ? 1 : 0) << '\n';
  out.precision(old);
}

void write_trace_csv(std::ostream& out, const MartingaleTrace& trace) {
  out << "i,Z,touched\n";
  const auto old = out.precision(17);
  const auto& z = trace.series();
  const auto& touched = trace.touched();
  for (std::size_t i = 0; i < z.size(); ++i)
    out << i << ',' << z[i] << ',' << static_cast<int>(touched[i]) << '\n';
  out.precision(old);
}

void write_coloring_csv(std::ostream& out, const Transcript& transcript) {
  out << "t,offline,color,stage\n";
  for (std::size_t t = 0; t < transcript.arrivals.size(); ++t) {
    const auto& nbrs = transcript.arrivals[t].neighbors;
    for (std::size_t j = 0; j < nbrs.size(); ++j)
      out << t << ',' << nbrs[j] << ',' << transcript.coloring.colors[t][j] << ','
          << transcript.stage[t][j] << '\n';
  }
}

ColoringTotals read_coloring_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("coloring CSV: missing header");
  ColoringTotals tot;
  std::set<int> colors;
  std::unordered_map<long long, int> online_deg;
  std::unordered_map<long long, int> offline_deg;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long t = 0;
    long long u = 0;
    int color = 0;
    char c1 = 0;
    char c2 = 0;
    if (!(row >> t >> c1 >> u >> c2 >> color) || c1 != ',' || c2 != ',')
      throw std::runtime_error("coloring CSV: bad row at line " + std::to_string(lineno));
    ++tot.edges;
    colors.insert(color);
    tot.realized_delta = std::max({tot.realized_delta, ++online_deg[t], ++offline_deg[u]});
  }
  tot.colors_used = static_cast<int>(colors.size());
  tot.ratio = tot.realized_delta == 0 ? 0.0
                                      : static_cast<double>(tot.colors_used) / tot.realized_delta;
  return tot;
}

nlohmann::json manifest_json(const nlohmann::json& config, const std::string& config_hash,
                             std::uint64_t seed, const RunMetrics& m) {
  nlohmann::json j;
  j["config"] = config;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["arrivals"] = m.arrivals;
  j["edges"] = m.edges;
  j["colors_used"] = m.colors_used;
  j["realized_delta"] = m.realized_delta;
  j["ratio"] = m.ratio;
  j["color_bound"] = m.color_bound;
  j["conflicts"] = m.conflicts;
  j["uncolored"] = m.uncolored;
  auto levels = nlohmann::json::array();
  for (const auto& lv : m.per_level) {
    levels.push_back({{"delta_i", lv.delta_i},
                      {"epsilon_i", lv.epsilon_i},
                      {"palette", lv.palette},
                      {"color_base", lv.color_base},
                      {"edges_in", lv.edges_in},
                      {"colored", lv.colored},
                      {"colored_fraction", lv.colored_fraction()},
                      {"skipped", lv.skipped},
                      {"colors_used", lv.colors_used},
                      {"residual_max_degree", lv.residual_max_degree}});
  }
  j["per_level"] = levels;
  j["tail"] = {{"colors", m.tail_colors}, {"edges", m.tail_edges}};
  std::map<int, int> occupancy;
  for (int k : m.level0_occupancy) ++occupancy[k];
  auto occ = nlohmann::json::object();
  for (const auto& [k, count] : occupancy) occ[std::to_string(k)] = count;
  j["level0_occupancy"] = occ;
  const auto& mon = m.monitor;
  j["monitor"] = {{"steps", mon.steps},
                  {"max_not_good", mon.max_not_good},
                  {"steps_over_not_good_cap", mon.steps_over_not_good_cap},
                  {"max_load", mon.max_load},
                  {"max_load_excess", mon.max_load_excess},
                  {"attack_steps", mon.attack_steps},
                  {"max_attack_ratio", mon.max_attack_ratio},
                  {"attack_bad_steps", mon.attack_bad_steps}};
  auto traces = nlohmann::json::array();
  for (const auto& t : m.traces) {
    traces.push_back({{"z0", t.z0},
                      {"expected_z0", t.expected_z0},
                      {"max_z", t.max_z},
                      {"drift", t.drift},
                      {"max_step", t.max_step},
                      {"step_bound", t.step_bound},
                      {"sum_sq", t.sum_sq},
                      {"variance_budget", t.variance_budget},
                      {"length", t.length},
                      {"step_ok", t.step_ok}});
  }
  j["traces"] = traces;
  return j;
}

}  // namespace oec::metrics
