#include "oec/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "oec/expectimax.hpp"
#include "oec/rng.hpp"

namespace oec {

namespace fs = std::filesystem;

std::string to_string(Algo a) {
  switch (a) {
    case Algo::kGreedy: return "greedy";
    case Algo::kPartial: return "partial";
    case Algo::kPipeline: return "pipeline";
  }
  return "?";
}

Algo parse_algo(const std::string& name) {
  if (name == "greedy") return Algo::kGreedy;
  if (name == "partial") return Algo::kPartial;
  if (name == "pipeline") return Algo::kPipeline;
  throw ConfigError("unknown algo: " + name + " (expected greedy|partial|pipeline)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  int base = 10;
  std::string digits = v;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    base = 16;
    digits = v.substr(2);
  }
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), out, base);
  if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size())
    throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

KeyValues parse_kv_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str());
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "algo",      "input",     "gen",       "adversary",      "n",           "delta",
      "n-online",  "p",         "arrivals",  "color-frac",     "epsilon",     "q",
      "threshold", "threshold-frac", "alpha", "max-levels",    "crs",         "permissive",
      "monitor",   "trace-pairs", "seed",    "manifest",       "metrics",     "coloring",
      "trace-dir"};
  return k;
}

RunConfig RunConfig::from_kv(const KeyValues& kv) {
  const auto& known = keys();
  for (const auto& [key, value] : kv)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key: " + key);
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  RunConfig c;
  if (auto v = get("algo")) c.algo = parse_algo(*v);

  int sources = 0;
  if (auto v = get("input")) {
    c.source = SourceKind::kFile;
    c.input = *v;
    ++sources;
  }
  if (auto v = get("gen")) {
    c.source = SourceKind::kGenerator;
    try {
      c.gen = parse_gen_kind(*v);
    } catch (const GeneratorError& e) {
      throw ConfigError(e.what());
    }
    ++sources;
  }
  if (auto v = get("adversary"); v && v->rfind("replay:", 0) == 0) {
    c.source = SourceKind::kFile;
    c.input = v->substr(7);
    ++sources;
  } else if (v) {
    c.source = SourceKind::kAdversary;
    if (*v != "load-attacker" && *v != "greedy-killer")
      throw ConfigError("unknown adversary: " + *v +
                        " (expected replay:<file>|load-attacker|greedy-killer)");
    c.adversary = *v;
    ++sources;
  }
  if (sources != 1)
    throw ConfigError("exactly one input source is required (input, gen or adversary)");

  if (auto v = get("n")) c.n = parse_int("n", *v);
  if (auto v = get("delta")) c.delta = parse_int("delta", *v);
  if (auto v = get("n-online")) c.n_online = parse_int("n-online", *v);
  if (auto v = get("p")) c.p = parse_double("p", *v);
  if (auto v = get("arrivals")) c.arrivals = parse_int("arrivals", *v);
  if (auto v = get("color-frac")) c.color_frac = parse_double("color-frac", *v);
  if (auto v = get("epsilon")) c.overrides.epsilon = parse_double("epsilon", *v);
  if (auto v = get("q")) c.overrides.q = parse_double("q", *v);
  if (auto v = get("threshold")) c.overrides.threshold = parse_double("threshold", *v);
  if (auto v = get("threshold-frac")) c.threshold_frac = parse_double("threshold-frac", *v);
  if (auto v = get("alpha")) c.overrides.alpha = parse_double("alpha", *v);
  if (auto v = get("max-levels")) c.overrides.max_levels = parse_int("max-levels", *v);
  if (auto v = get("crs")) {
    try {
      c.crs = crs::parse_scheme(*v);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = get("permissive")) c.permissive = parse_bool("permissive", *v);
  if (auto v = get("monitor")) c.monitor = parse_bool("monitor", *v);
  if (auto v = get("trace-pairs")) c.trace_pairs = parse_int("trace-pairs", *v);
  if (auto v = get("seed")) c.seed = parse_u64("seed", *v);
  if (auto v = get("manifest")) c.manifest_path = *v;
  if (auto v = get("metrics")) c.loads_path = *v;
  if (auto v = get("coloring")) c.coloring_path = *v;
  if (auto v = get("trace-dir")) c.trace_dir = *v;

  if (c.source != SourceKind::kFile && (c.n < 1 || c.delta < 1))
    throw ConfigError("generator and adversary sources need n >= 1 and delta >= 1");
  if (c.overrides.threshold && c.threshold_frac)
    throw ConfigError("threshold and threshold-frac are mutually exclusive");
  if (c.overrides.epsilon && !(*c.overrides.epsilon > 0.0))
    throw ConfigError("epsilon must be positive");
  if (c.arrivals < 0 || c.trace_pairs < 0 || c.n_online < 0)
    throw ConfigError("arrivals, trace-pairs and n-online must be nonnegative");
  return c;
}

KeyValues RunConfig::canonical() const {
  KeyValues kv;
  kv["algo"] = to_string(algo);
  switch (source) {
    case SourceKind::kFile: kv["input"] = input; break;
    case SourceKind::kGenerator:
      kv["gen"] = to_string(gen);
      kv["n"] = std::to_string(n);
      kv["delta"] = std::to_string(delta);
      if (gen == GenKind::kBinomial) {
        kv["n-online"] = std::to_string(n_online);
        kv["p"] = format_double(p);
      }
      break;
    case SourceKind::kAdversary:
      kv["adversary"] = adversary;
      kv["n"] = std::to_string(n);
      kv["delta"] = std::to_string(delta);
      if (adversary == "load-attacker") kv["color-frac"] = format_double(color_frac);
      break;
  }
  if (arrivals > 0) kv["arrivals"] = std::to_string(arrivals);
  if (overrides.epsilon) kv["epsilon"] = format_double(*overrides.epsilon);
  if (overrides.q) kv["q"] = format_double(*overrides.q);
  if (overrides.threshold) kv["threshold"] = format_double(*overrides.threshold);
  if (threshold_frac) kv["threshold-frac"] = format_double(*threshold_frac);
  if (overrides.alpha) kv["alpha"] = format_double(*overrides.alpha);
  if (overrides.max_levels) kv["max-levels"] = std::to_string(*overrides.max_levels);
  kv["crs"] = crs::to_string(crs);
  kv["permissive"] = permissive ? "1" : "0";
  kv["monitor"] = monitor ? "1" : "0";
  kv["trace-pairs"] = std::to_string(trace_pairs);
  return kv;
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : canonical()) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::config_hash() const {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << label_hash(canonical_text());
  return out.str();
}

LevelPlan plan_for(const RunConfig& cfg, const InstanceHeader& header) {
  PlanOverrides ov = cfg.overrides;
  if (cfg.threshold_frac) ov.threshold = *cfg.threshold_frac * header.delta;
  const double n = header.n_offline;
  try {
    switch (cfg.algo) {
      case Algo::kGreedy: return greedy_plan();
      case Algo::kPartial: return single_level_plan(n, header.delta, ov);
      case Algo::kPipeline: return plan_levels(n, header.delta, ov);
    }
  } catch (const InfeasibleParameters& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown algo");
}

namespace {

void ensure_parent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// k distinct values from [0, n), ascending.
std::vector<int> sample_distinct(Rng& rng, int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : cfg.canonical()) j[k] = v;
  return j;
}

}  // namespace

RunResult execute_run(const RunConfig& cfg) {
  InstanceHeader header;
  std::unique_ptr<ArrivalSource> source;
  switch (cfg.source) {
    case SourceKind::kFile: {
      Instance inst = load_instance_file(cfg.input);
      header = inst.header;
      source = std::make_unique<ReplaySource>(std::move(inst));
      break;
    }
    case SourceKind::kGenerator: {
      GenSpec spec{cfg.gen, cfg.n, cfg.n_online, cfg.delta, cfg.p, derive_seed(cfg.seed, "gen")};
      try {
        Instance inst = generate(spec);
        header = inst.header;
        source = std::make_unique<ReplaySource>(std::move(inst));
      } catch (const BudgetTooSmall& e) {
        throw ConfigError(e.what());
      }
      break;
    }
    case SourceKind::kAdversary:
      header = {cfg.n, cfg.delta};
      try {
        check_header(header);
      } catch (const StreamError& e) {
        throw ConfigError(e.what());
      }
      break;
  }

  const LevelPlan plan = plan_for(cfg, header);
  const bool snapshots = cfg.monitor || !cfg.loads_path.empty();
  CascadeColorer colorer(header, plan, cfg.crs, derive_seed(cfg.seed, "run"),
                         CascadeOptions{snapshots});
  DegreeLedger ledger(header.n_offline);
  const AdversaryView view{header, ledger, colorer};
  const int budget = cfg.arrivals > 0 ? cfg.arrivals : header.n_offline;

  const bool have_level = plan.level_count() > 0;
  const double eps0 = have_level ? plan.levels[0].epsilon : 0.0;
  LoadAttacker* attacker = nullptr;
  if (cfg.source == SourceKind::kAdversary) {
    if (cfg.adversary == "load-attacker") {
      const double frac = cfg.color_frac > 0.0 ? cfg.color_frac : (have_level ? eps0 : 0.1);
      auto a = std::make_unique<LoadAttacker>(LoadAttackerParams{cfg.delta, frac, budget, 0});
      attacker = a.get();
      source = std::move(a);
    } else {
      source = std::make_unique<GreedyKiller>(GreedyKillerParams{cfg.delta, cfg.n, budget});
    }
  }

  RunResult result;

  // Sampled (U, C) traces at level 0, plus the attacker's opening pair.
  if (have_level && header.n_offline >= header.delta) {
    const auto& l0 = plan.levels[0];
    const int csize = metrics::probe_color_count(header.delta, l0.epsilon);
    if (csize >= 1 && csize <= l0.palette_size) {
      Rng rng(derive_seed(cfg.seed, "trace"));
      for (int k = 0; k < cfg.trace_pairs; ++k) {
        auto u = sample_distinct(rng, header.n_offline, header.delta);
        auto c = sample_distinct(rng, l0.palette_size, csize);
        result.traces.emplace_back(std::move(u), std::move(c), l0.palette_size, l0.delta,
                                   l0.epsilon);
      }
      if (attacker && cfg.trace_pairs > 0) {
        LoadPair p = attacker->best_pair(view);
        if (static_cast<int>(p.nodes.size()) == header.delta &&
            static_cast<int>(p.colors.size()) == csize)
          result.traces.emplace_back(std::move(p.nodes), std::move(p.colors), l0.palette_size,
                                     l0.delta, l0.epsilon);
      }
    }
  }

  const ValidationOptions vopt{cfg.permissive, budget};
  metrics::StepMonitor monitor;
  int empty_streak = 0;
  while (auto arrival = source->next(view)) {
    if (attacker && attacker->last_pair() && have_level)
      monitor.add_attack(attacker->last_pair()->value, attacker->last_pair()->colors.size(), eps0);
    const OnlineArrival accepted = validate_arrival(header, ledger, *arrival, vopt);
    if (accepted.neighbors.empty()) {
      if (++empty_streak > 1000)
        throw std::runtime_error("source keeps producing arrivals with no valid neighbors");
      continue;
    }
    empty_streak = 0;
    const ArrivalResult res = colorer.process(accepted);

    for (std::size_t i = 0; i < res.steps.size(); ++i) {
      const StepOutcome& step = res.steps[i];
      if (i == 0) {
        for (std::size_t k = 0; k < step.neighbors.size(); ++k)
          if (step.picks[k] >= 0)
            for (auto& tr : result.traces) tr.observe(step.neighbors[k], step.picks[k]);
      }
      if (!snapshots) continue;
      const auto& lc = plan.levels[i];
      const auto report = metrics::classify_colors(step, lc.palette_size, lc.epsilon);
      const std::size_t live = step.neighbors.size() - step.skipped.size();
      const int cap = static_cast<int>(std::ceil(lc.epsilon * lc.delta - 1e-12));
      monitor.add_loads(report, live, cap);
      if (!cfg.loads_path.empty()) {
        for (std::size_t c = 0; c < report.load.size(); ++c)
          if (report.load[c] > 0.0)
            result.loads.push_back({step.t, lc.color_base + static_cast<int>(c), report.load[c],
                                    report.good[c] != 0});
      }
    }
  }

  result.metrics = metrics::run_summary(colorer.transcript(), plan);
  result.metrics.monitor = monitor;
  for (const auto& tr : result.traces) {
    if (std::abs(tr.z0() - tr.expected_z0()) > 1e-9)
      throw std::logic_error("trace Z_0 differs from |U||C|/palette");
    if (!tr.step_bound_ok())
      throw std::logic_error("trace increment exceeds 2/(sqrt(eps) delta)");
    result.metrics.traces.push_back(metrics::summarize(tr));
  }
  result.manifest =
      metrics::manifest_json(config_json(cfg), cfg.config_hash(), cfg.seed, result.metrics);
  result.transcript = colorer.transcript();

  if (!cfg.manifest_path.empty()) {
    auto out = open_out(cfg.manifest_path);
    out << result.manifest.dump(2) << '\n';
  }
  if (!cfg.loads_path.empty()) {
    auto out = open_out(cfg.loads_path);
    metrics::write_loads_csv(out, result.loads);
  }
  if (!cfg.coloring_path.empty()) {
    auto out = open_out(cfg.coloring_path);
    metrics::write_coloring_csv(out, result.transcript);
  }
  if (!cfg.trace_dir.empty()) {
    fs::create_directories(cfg.trace_dir);
    for (std::size_t k = 0; k < result.traces.size(); ++k) {
      auto out = open_out((fs::path(cfg.trace_dir) / ("trace_" + std::to_string(k) + ".csv")).string());
      metrics::write_trace_csv(out, result.traces[k]);
    }
  }
  return result;
}

int exit_code_for_current_exception(std::string& message) {
  try {
    throw;
  } catch (const ConfigError& e) {
    message = e.what();
    return kExitConfig;
  } catch (const expectimax::LimitExceeded& e) {
    message = e.what();
    return kExitConfig;
  } catch (const StreamError& e) {
    message = e.what();
    return kExitValidation;
  } catch (const metrics::ValidationFailure& e) {
    message = e.what();
    return kExitValidation;
  } catch (const std::exception& e) {
    message = e.what();
    return kExitRun;
  } catch (...) {
    message = "unknown error";
    return kExitRun;
  }
}

int SweepResult::failures() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                        [](const SweepCell& c) { return !c.ok; }));
}

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

SweepResult sweep(const RunConfig& tmpl, const SweepOptions& options) {
  if (tmpl.source == SourceKind::kFile && !options.deltas.empty())
    throw ConfigError("a sweep over delta needs a generator or adversary source");
  if (options.seeds < 1) throw ConfigError("sweep needs at least one seed");
  std::vector<int> deltas = options.deltas;
  if (deltas.empty()) deltas.push_back(tmpl.delta);

  SweepResult result;
  for (int d : deltas)
    for (int k = 0; k < options.seeds; ++k) {
      SweepCell cell;
      cell.delta = d;
      cell.seed_index = k;
      cell.seed = derive_seed(tmpl.seed, "seed:" + std::to_string(k));
      result.cells.push_back(std::move(cell));
    }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      SweepCell& cell = result.cells[i];
      RunConfig cfg = tmpl;
      cfg.delta = cell.delta;
      cfg.seed = cell.seed;
      cfg.loads_path.clear();
      cfg.coloring_path.clear();
      cfg.trace_dir.clear();
      cfg.manifest_path.clear();
      if (!options.out_dir.empty())
        cfg.manifest_path = (fs::path(options.out_dir) /
                             ("manifest_d" + std::to_string(cell.delta) + "_s" +
                              std::to_string(cell.seed_index) + ".json"))
                                .string();
      try {
        const RunResult r = execute_run(cfg);
        cell.ok = true;
        cell.ratio = r.metrics.ratio;
        if (!r.metrics.per_level.empty()) {
          cell.colored_fraction = r.metrics.per_level[0].colored_fraction();
          cell.residual_decay =
              static_cast<double>(r.metrics.per_level[0].residual_max_degree) / cell.delta;
        }
        cell.manifest = r.manifest;
      } catch (...) {
        cell.exit_code = exit_code_for_current_exception(cell.error);
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(result.cells.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int d : deltas) {
    SweepRow row;
    row.delta = d;
    std::vector<double> ratio, frac, decay;
    for (const auto& c : result.cells) {
      if (c.delta != d) continue;
      ++row.runs;
      if (!c.ok) {
        ++row.failures;
        continue;
      }
      ratio.push_back(c.ratio);
      frac.push_back(c.colored_fraction);
      decay.push_back(c.residual_decay);
    }
    std::tie(row.mean_ratio, row.sd_ratio) = mean_sd(ratio);
    std::tie(row.mean_colored_fraction, row.sd_colored_fraction) = mean_sd(frac);
    std::tie(row.mean_residual_decay, row.sd_residual_decay) = mean_sd(decay);
    result.rows.push_back(row);
  }

  if (!options.out_dir.empty()) {
    auto out = open_out((fs::path(options.out_dir) / "aggregate.csv").string());
    write_sweep_csv(out, result);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "delta,runs,failures,mean_ratio,sd_ratio,mean_colored_fraction,sd_colored_fraction,"
         "mean_residual_decay,sd_residual_decay\n";
  const auto old = out.precision(10);
  for (const auto& r : result.rows)
    out << r.delta << ',' << r.runs << ',' << r.failures << ',' << r.mean_ratio << ','
        << r.sd_ratio << ',' << r.mean_colored_fraction << ',' << r.sd_colored_fraction << ','
        << r.mean_residual_decay << ',' << r.sd_residual_decay << '\n';
  out.precision(old);
}

}  // namespace oec
