// Command-line front end: gen, run, sweep, crs-check, expectimax, validate.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oec/crs.hpp"
#include "oec/expectimax.hpp"
#include "oec/generators.hpp"
#include "oec/graph_stream.hpp"
#include "oec/metrics.hpp"
#include "oec/rng.hpp"
#include "oec/runner.hpp"

namespace {

using oec::KeyValues;

// Flags that map one-to-one onto run config keys.
struct RunFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key=value config file (flags win)");
    const std::vector<std::pair<std::string, std::string>> opts = {
        {"algo", "greedy|partial|pipeline"},
        {"input", "instance file (JSON lines)"},
        {"gen", "generator: regular|binomial|greedy_hard"},
        {"adversary", "replay:<file>|load-attacker|greedy-killer"},
        {"n", "offline nodes for generator or adversary sources"},
        {"delta", "degree bound"},
        {"n-online", "online nodes (binomial)"},
        {"p", "edge probability (binomial)"},
        {"arrivals", "arrival budget (default n_offline)"},
        {"color-frac", "load attacker |C| / delta"},
        {"epsilon", "epsilon override for every level"},
        {"q", "per-level degree decay override"},
        {"threshold", "level stop threshold override"},
        {"threshold-frac", "stop threshold as a fraction of delta"},
        {"alpha", "alpha override"},
        {"max-levels", "cap on the number of levels"},
        {"crs", "exp-clock|uniform|none"},
        {"trace-pairs", "number of sampled (U, C) traces"},
        {"seed", "master seed (default $OEC_SEED, else 0)"},
        {"manifest", "run manifest JSON path"},
        {"metrics", "per-step loads CSV path"},
        {"coloring", "edge coloring CSV path"},
        {"trace-dir", "directory for trace CSVs"},
    };
    for (const auto& [key, help] : opts) app->add_option("--" + key, values[key], help);
    for (const std::string key : {"permissive", "monitor"})
      app->add_flag("--" + key, switches[key], key == "permissive"
                                                   ? "drop invalid neighbors instead of failing"
                                                   : "record per-step load statistics");
  }

  KeyValues merged(const CLI::App* app) const {
    KeyValues kv;
    if (!config_file.empty()) kv = oec::read_kv_file(config_file);
    for (const auto& [key, value] : values)
      if (app->count("--" + key) > 0) kv[key] = value;
    for (const auto& [key, on] : switches)
      if (app->count("--" + key) > 0) kv[key] = on ? "1" : "0";
    if (!kv.count("seed"))
      if (const char* env = std::getenv("OEC_SEED")) kv["seed"] = env;
    return kv;
  }
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw oec::ConfigError("bad integer in list: " + item);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw oec::ConfigError("bad number in list: " + item);
    }
  }
  return out;
}

void print_summary(const oec::RunConfig& cfg, const oec::metrics::RunMetrics& m) {
  std::cout << "algo=" << oec::to_string(cfg.algo) << " seed=" << cfg.seed
            << " hash=" << cfg.config_hash() << "\n";
  std::cout << "arrivals=" << m.arrivals << " edges=" << m.edges
            << " realized_delta=" << m.realized_delta << " colors=" << m.colors_used
            << " ratio=" << std::setprecision(6) << m.ratio << " bound=" << m.color_bound << "\n";
  for (std::size_t i = 0; i < m.per_level.size(); ++i) {
    const auto& lv = m.per_level[i];
    std::cout << "level " << i << ": delta_i=" << lv.delta_i << " eps=" << lv.epsilon_i
              << " palette=" << lv.palette << " in=" << lv.edges_in << " colored=" << lv.colored
              << " frac=" << lv.colored_fraction() << " residual_max_degree="
              << lv.residual_max_degree << "\n";
  }
  std::cout << "tail: edges=" << m.tail_edges << " colors=" << m.tail_colors << "\n";
  for (std::size_t k = 0; k < m.traces.size(); ++k) {
    const auto& t = m.traces[k];
    std::cout << "trace " << k << ": Z0=" << t.z0 << " drift=" << t.drift
              << " max_step=" << t.max_step << "/" << t.step_bound << " sum_sq=" << t.sum_sq
              << "/" << t.variance_budget << "\n";
  }
}

int cmd_gen(const std::string& kind, int n, int n_online, int delta, double p,
            std::uint64_t seed, const std::string& out_path) {
  oec::GenSpec spec;
  spec.kind = oec::parse_gen_kind(kind);
  spec.n_offline = n;
  spec.n_online = n_online;
  spec.delta = delta;
  spec.edge_prob = p;
  spec.seed = oec::derive_seed(seed, "gen");
  const oec::Instance inst = oec::generate(spec);
  if (out_path.empty() || out_path == "-") {
    oec::write_instance(std::cout, inst);
  } else {
    oec::save_instance_file(out_path, inst);
  }
  std::cerr << "generated " << inst.arrivals.size() << " arrivals, " << inst.edge_count()
            << " edges\n";
  return oec::kExitOk;
}

int cmd_crs_check(const std::string& x_text, int random_vectors, int max_n,
                  std::uint64_t trials, std::uint64_t seed, const std::string& scheme_name) {
  const auto scheme = oec::crs::parse_scheme(scheme_name);
  std::vector<std::vector<double>> vectors;
  if (!x_text.empty()) vectors.push_back(parse_double_list(x_text));
  oec::Rng rng(oec::derive_seed(seed, "crs-check"));
  for (int k = 0; k < random_vectors; ++k) {
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n)));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.uniform01();
    vectors.push_back(std::move(x));
  }
  int worst_exit = oec::kExitOk;
  std::cout << "vector,i,x,exact,fair,mc,stderr,z\n" << std::setprecision(8);
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const oec::crs::MarginalVector mv(vectors[k]);
    const auto exact = oec::crs::selection_prob_exact(mv);
    const auto fair = oec::crs::fair_bound(mv);
    const auto mc = oec::crs::monte_carlo_marginals(
        mv, scheme, trials, oec::derive_seed(seed, "mc:" + std::to_string(k)));
    for (std::size_t i = 0; i < mv.size(); ++i) {
      const double se = mc.stderr_[i];
      const double z = se > 0 ? (mc.mean[i] - exact[i]) / se : 0.0;
      std::cout << k << ',' << i << ',' << mv.x(i) << ',' << exact[i] << ',' << fair[i] << ','
                << mc.mean[i] << ',' << se << ',' << z << '\n';
      if (scheme == oec::crs::Scheme::kExpClock && se > 0 && std::abs(z) > 4.0)
        worst_exit = oec::kExitValidation;
    }
  }
  return worst_exit;
}

int cmd_expectimax(int n_off, int delta, int arrivals, int cap, const std::string& policy) {
  namespace ex = oec::expectimax;
  ex::SolveResult r;
  if (policy.empty()) {
    r = ex::solve_deterministic(n_off, delta, arrivals, cap);
    std::cout << "deterministic minimax";
  } else {
    const auto p = ex::make_policy(policy);
    r = ex::evaluate_randomized(*p, n_off, delta, arrivals, cap);
    std::cout << "policy " << p->name();
  }
  std::cout << " n_off=" << n_off << " delta=" << delta << " arrivals=" << arrivals
            << " color_cap=" << cap << "\n";
  std::cout << "value=" << r.value << (r.infeasible ? " (infeasible within cap)" : "")
            << " states=" << r.states << "\n";
  for (std::size_t k = 0; k < r.trace.size(); ++k)
    std::cout << "  step " << k << ": " << r.trace[k].to_string() << "\n";
  return oec::kExitOk;
}

// Rebuilds an EdgeColoring for `inst` from a t,offline,color[,stage] CSV.
oec::EdgeColoring coloring_from_csv(const std::string& path, const oec::Instance& inst) {
  std::ifstream in(path);
  if (!in) throw oec::ConfigError("cannot open " + path);
  oec::EdgeColoring col;
  col.colors.resize(inst.arrivals.size());
  for (std::size_t t = 0; t < inst.arrivals.size(); ++t)
    col.colors[t].assign(inst.arrivals[t].neighbors.size(), oec::kUncolored);
  std::string line;
  std::getline(in, line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long t = 0;
    int u = 0;
    int c = 0;
    char s1 = 0;
    char s2 = 0;
    if (!(row >> t >> s1 >> u >> s2 >> c))
      throw oec::StreamError("coloring CSV: bad row at line " + std::to_string(lineno));
    if (t < 0 || t >= static_cast<long long>(inst.arrivals.size()))
      throw oec::StreamError("coloring CSV: arrival out of range at line " +
                             std::to_string(lineno));
    const auto& nbrs = inst.arrivals[static_cast<std::size_t>(t)].neighbors;
    const auto it = std::find(nbrs.begin(), nbrs.end(), u);
    if (it == nbrs.end())
      throw oec::StreamError("coloring CSV: edge not in instance at line " +
                             std::to_string(lineno));
    col.colors[static_cast<std::size_t>(t)][static_cast<std::size_t>(it - nbrs.begin())] = c;
  }
  return col;
}

int cmd_validate(const std::string& path, bool permissive, int budget,
                 const std::string& coloring_path) {
  const oec::Instance inst = oec::load_instance_file(path);
  oec::ValidationOptions opts;
  opts.permissive = permissive;
  if (budget > 0) opts.arrival_budget = budget;
  oec::DegreeLedger ledger(inst.header.n_offline);
  std::size_t dropped = 0;
  for (const auto& a : inst.arrivals) {
    const auto accepted = oec::validate_arrival(inst.header, ledger, a, opts);
    dropped += a.neighbors.size() - accepted.neighbors.size();
  }
  std::cout << "ok: n_offline=" << inst.header.n_offline << " delta=" << inst.header.delta
            << " arrivals=" << ledger.arrivals_seen() << " edges=" << ledger.edges_seen()
            << " realized_delta=" << oec::realized_max_degree(inst);
  if (permissive) std::cout << " dropped=" << dropped;
  std::cout << "\noffline degree profile:";
  for (const auto& [d, count] : oec::degree_profile(ledger)) std::cout << " " << d << ":" << count;
  std::cout << "\n";
  if (coloring_path.empty()) return oec::kExitOk;

  const auto check = oec::check_coloring(inst, coloring_from_csv(coloring_path, inst));
  std::cout << "coloring: colors=" << check.colors_used << " conflicts=" << check.conflicts
            << " uncolored=" << check.uncolored << "\n";
  for (const auto& s : check.samples) std::cout << "  " << s << "\n";
  return check.proper() && check.total() ? oec::kExitOk : oec::kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online bipartite edge coloring laboratory"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write a generated instance");
  std::string gen_kind = "regular", gen_out;
  int gen_n = 0, gen_online = 0, gen_delta = 0;
  double gen_p = 0.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "regular|binomial|greedy_hard");
  gen->add_option("--n", gen_n, "offline nodes (budget for greedy_hard)")->required();
  gen->add_option("--n-online", gen_online, "online nodes (binomial)");
  gen->add_option("--delta", gen_delta, "degree (cap for binomial)")->required();
  gen->add_option("--p", gen_p, "edge probability (binomial)");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  auto* run = app.add_subcommand("run", "run one configuration");
  RunFlags run_flags;
  run_flags.attach(run);

  auto* sw = app.add_subcommand("sweep", "run a configuration over deltas and seeds");
  RunFlags sweep_flags;
  sweep_flags.attach(sw);
  std::string sweep_deltas, sweep_out;
  int sweep_seeds = 1, sweep_jobs = 1;
  sw->add_option("--deltas", sweep_deltas, "comma-separated delta list");
  sw->add_option("--seeds", sweep_seeds, "seeds per delta");
  sw->add_option("--jobs", sweep_jobs, "concurrent runs");
  sw->add_option("--out", sweep_out, "directory for manifests and aggregate.csv");

  auto* crs_cmd = app.add_subcommand("crs-check", "compare CRS marginals with Monte Carlo");
  std::string crs_x, crs_scheme = "exp-clock";
  int crs_random = 0, crs_max_n = 12;
  std::uint64_t crs_trials = 1000000, crs_seed = 0;
  crs_cmd->add_option("--x", crs_x, "comma-separated marginals");
  crs_cmd->add_option("--random", crs_random, "number of random vectors");
  crs_cmd->add_option("--max-n", crs_max_n, "largest random vector size");
  crs_cmd->add_option("--trials", crs_trials, "Monte Carlo trials per vector");
  crs_cmd->add_option("--seed", crs_seed, "master seed");
  crs_cmd->add_option("--scheme", crs_scheme, "exp-clock|uniform|none");

  auto* ex = app.add_subcommand("expectimax", "exact game values at micro scale");
  int ex_n = 0, ex_delta = 0, ex_arrivals = 0, ex_cap = 0;
  std::string ex_policy;
  ex->add_option("--n-off", ex_n, "offline nodes")->required();
  ex->add_option("--delta", ex_delta, "degree bound")->required();
  ex->add_option("--arrivals", ex_arrivals, "arrival budget")->required();
  ex->add_option("--color-cap", ex_cap, "palette size available to the algorithm")->required();
  ex->add_option("--policy", ex_policy, "first-fit|uniform (omit for deterministic minimax)");

  auto* val = app.add_subcommand("validate", "check an instance file (and optionally a coloring)");
  std::string val_path, val_coloring;
  bool val_permissive = false;
  int val_budget = 0;
  val->add_option("instance", val_path, "instance file")->required();
  val->add_flag("--permissive", val_permissive, "drop offending neighbors");
  val->add_option("--arrival-budget", val_budget, "max online nodes (default n_offline)");
  val->add_option("--coloring", val_coloring, "coloring CSV to check against the instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : oec::kExitConfig;
  }

  try {
    if (gen->parsed()) {
      if (gen_seed_opt->count() == 0)
        if (const char* env = std::getenv("OEC_SEED")) gen_seed = std::stoull(env, nullptr, 0);
      return cmd_gen(gen_kind, gen_n, gen_online, gen_delta, gen_p, gen_seed, gen_out);
    }
    if (run->parsed()) {
      const auto cfg = oec::RunConfig::from_kv(run_flags.merged(run));
      const auto result = oec::execute_run(cfg);
      print_summary(cfg, result.metrics);
      return oec::kExitOk;
    }
    if (sw->parsed()) {
      oec::SweepOptions opts;
      opts.deltas = parse_int_list(sweep_deltas);
      if (opts.deltas.empty()) throw oec::ConfigError("sweep needs --deltas");
      auto kv = sweep_flags.merged(sw);
      // Each cell sets its own delta; the template only needs a placeholder.
      kv.try_emplace("delta", std::to_string(opts.deltas.front()));
      const auto cfg = oec::RunConfig::from_kv(kv);
      opts.seeds = sweep_seeds;
      opts.jobs = sweep_jobs;
      opts.out_dir = sweep_out;
      const auto result = oec::sweep(cfg, opts);
      oec::write_sweep_csv(std::cout, result);
      for (const auto& c : result.cells)
        if (!c.ok)
          std::cerr << "delta=" << c.delta << " seed#" << c.seed_index << " failed (exit "
                    << c.exit_code << "): " << c.error << "\n";
      return result.failures() == 0 ? oec::kExitOk : oec::kExitRun;
    }
    if (crs_cmd->parsed())
      return cmd_crs_check(crs_x, crs_random, crs_max_n, crs_trials, crs_seed, crs_scheme);
    if (ex->parsed()) return cmd_expectimax(ex_n, ex_delta, ex_arrivals, ex_cap, ex_policy);
    if (val->parsed()) return cmd_validate(val_path, val_permissive, val_budget, val_coloring);
  } catch (const oec::GeneratorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return oec::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return oec::kExitConfig;
  } catch (...) {
    std::string msg;
    const int rc = oec::exit_code_for_current_exception(msg);
    std::cerr << "error: " << msg << "\n";
    return rc;
  }
  return oec::kExitConfig;
}
