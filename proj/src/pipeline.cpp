#include "oec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oec/rng.hpp"

namespace oec {

int LevelPlan::level_colors() const {
  int total = 0;
  for (const auto& l : levels) total += l.palette_size;
  return total;
}

InfeasibleParameters::InfeasibleParameters(double lambda, double q)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "infeasible plan: lambda = " << lambda << " gives q = " << q
           << " (needs q < 1; override --q or --epsilon)";
        return os.str();
      }()),
      lambda_(lambda),
      q_(q) {}

namespace {

void fill_constants(LevelPlan& plan, double n, int delta, const PlanOverrides& ov) {
  if (n < 3.0) throw std::invalid_argument("plan needs n >= 3");
  if (delta < 1) throw std::invalid_argument("plan needs delta >= 1");
  const double ln_n = std::log(n);
  plan.n = n;
  plan.delta = delta;
  plan.alpha = ov.alpha.value_or(10.0 / 11.0);
  plan.lambda = 3.0 * std::sqrt(2.0) * std::pow(ln_n / delta, plan.alpha / 10.0);
  plan.q = ov.q.value_or(std::exp(-1.0) + plan.lambda);
  plan.threshold =
      ov.threshold.value_or(std::pow(delta, plan.alpha) * std::pow(ln_n, 1.0 - plan.alpha));
}

LevelConfig level_for(double n, double delta_i, const PlanOverrides& ov, int base) {
  const double eps = ov.epsilon ? *ov.epsilon : epsilon_default(n, delta_i);
  return LevelConfig::make(delta_i, eps, base);
}

}  // namespace

LevelPlan plan_levels(double n, int delta, const PlanOverrides& overrides) {
  LevelPlan plan;
  fill_constants(plan, n, delta, overrides);
  if (!(plan.q < 1.0) || !(plan.q > 0.0)) throw InfeasibleParameters(plan.lambda, plan.q);

  const int cap = overrides.max_levels.value_or(1 << 20);
  int base = 0;
  for (double d = plan.delta; d >= plan.threshold && d >= 1.0 &&
                              static_cast<int>(plan.levels.size()) < cap;
       d *= plan.q) {
    plan.levels.push_back(level_for(n, d, overrides, base));
    base += plan.levels.back().palette_size;
  }
  plan.greedy_base = base;
  return plan;
}

LevelPlan single_level_plan(double n, int delta, const PlanOverrides& overrides) {
  LevelPlan plan;
  fill_constants(plan, n, delta, overrides);
  plan.levels.push_back(level_for(n, plan.delta, overrides, 0));
  plan.greedy_base = plan.levels.back().palette_size;
  return plan;
}

LevelPlan greedy_plan() {
  LevelPlan plan;
  plan.greedy_base = 0;
  return plan;
}

FirstFit::FirstFit(int n_offline, int color_base)
    : base_(color_base), used_(static_cast<std::size_t>(std::max(n_offline, 0))) {}

std::vector<int> FirstFit::color_arrival(std::span<const int> neighbors) {
  std::vector<int> out;
  out.reserve(neighbors.size());
  std::vector<char> at_v;
  for (int u : neighbors) {
    auto& at_u = used_[static_cast<std::size_t>(u)];
    int c = 0;
    while ((c < static_cast<int>(at_u.size()) && at_u[static_cast<std::size_t>(c)]) ||
           (c < static_cast<int>(at_v.size()) && at_v[static_cast<std::size_t>(c)]))
      ++c;
    const auto cc = static_cast<std::size_t>(c);
    if (at_u.size() <= cc) at_u.resize(cc + 1, 0);
    if (at_v.size() <= cc) at_v.resize(cc + 1, 0);
    if (seen_.size() <= cc) seen_.resize(cc + 1, 0);
    at_u[cc] = 1;
    at_v[cc] = 1;
    if (!seen_[cc]) {
      seen_[cc] = 1;
      ++colors_used_;
    }
    out.push_back(base_ + c);
  }
  return out;
}

bool FirstFit::used_at(int u, int color) const {
  const int c = color - base_;
  const auto& at_u = used_[static_cast<std::size_t>(u)];
  return c >= 0 && c < static_cast<int>(at_u.size()) && at_u[static_cast<std::size_t>(c)];
}

std::vector<int> FirstFit::colors_at(int u) const {
  std::vector<int> out;
  const auto& at_u = used_[static_cast<std::size_t>(u)];
  for (std::size_t c = 0; c < at_u.size(); ++c)
    if (at_u[c]) out.push_back(base_ + static_cast<int>(c));
  return out;
}

EdgeColoring greedy_color(const Instance& instance, int color_base) {
  FirstFit ff(instance.header.n_offline, color_base);
  EdgeColoring out;
  out.colors.reserve(instance.arrivals.size());
  for (const auto& a : instance.arrivals) out.colors.push_back(ff.color_arrival(a.neighbors));
  return out;
}

Instance residual_subgraph(const Transcript& transcript, int through_level) {
  Instance out;
  out.header.n_offline = transcript.header.n_offline;
  std::vector<int> deg(static_cast<std::size_t>(transcript.header.n_offline), 0);
  int max_deg = 0;
  for (std::size_t t = 0; t < transcript.arrivals.size(); ++t) {
    OnlineArrival left;
    const auto& nbrs = transcript.arrivals[t].neighbors;
    const auto& stage = transcript.stage[t];
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      if (stage[j] <= through_level) continue;
      left.neighbors.push_back(nbrs[j]);
      max_deg = std::max(max_deg, ++deg[static_cast<std::size_t>(nbrs[j])]);
    }
    if (left.neighbors.empty()) continue;
    max_deg = std::max(max_deg, static_cast<int>(left.neighbors.size()));
    out.arrivals.push_back(std::move(left));
  }
  out.header.delta = std::max(1, max_deg);
  return out;
}

CascadeColorer::CascadeColorer(InstanceHeader header, LevelPlan plan, crs::Scheme scheme,
                               std::uint64_t seed, CascadeOptions options)
    : plan_(std::move(plan)),
      scheme_(scheme),
      options_(options),
      tail_(header.n_offline, plan_.greedy_base) {
  levels_.reserve(plan_.levels.size());
  for (std::size_t i = 0; i < plan_.levels.size(); ++i) {
    const std::string idx = std::to_string(i);
    levels_.emplace_back(header.n_offline, plan_.levels[i], scheme,
                         derive_seed(seed, "level:" + idx), derive_seed(seed, "crs:" + idx));
  }
  transcript_.header = header;
  transcript_.level_count = plan_.level_count();
}

ArrivalResult CascadeColorer::process(const OnlineArrival& arrival) {
  const auto& nbrs = arrival.neighbors;
  const int t = arrivals_processed();
  const int level_count = plan_.level_count();
  ArrivalResult res;
  res.colors.assign(nbrs.size(), kUncolored);
  std::vector<int> stage(nbrs.size(), level_count);

  // Indices (into nbrs) still uncolored, passed down the cascade.
  std::vector<int> pending(nbrs.size());
  for (std::size_t j = 0; j < nbrs.size(); ++j) pending[j] = static_cast<int>(j);

  std::vector<int> sub;
  for (int i = 0; i < level_count && !pending.empty(); ++i) {
    auto& level = levels_[static_cast<std::size_t>(i)];
    sub.clear();
    for (int j : pending) sub.push_back(nbrs[static_cast<std::size_t>(j)]);
    StepOutcome step = level.process(sub, t, options_.record_snapshots);
    const int base = level.config().color_base;

    std::vector<int> next;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const auto j = static_cast<std::size_t>(pending[k]);
      if (step.picks[k] >= 0)
        transcript_.picks.push_back(
            {t, i, nbrs[j], base + step.picks[k], step.assigned[k] >= 0});
      if (step.assigned[k] >= 0) {
        res.colors[j] = base + step.assigned[k];
        stage[j] = i;
      } else {
        next.push_back(pending[k]);
      }
    }
    pending = std::move(next);
    res.steps.push_back(std::move(step));
  }

  if (!pending.empty()) {
    sub.clear();
    for (int j : pending) sub.push_back(nbrs[static_cast<std::size_t>(j)]);
    const auto colors = tail_.color_arrival(sub);
    for (std::size_t k = 0; k < pending.size(); ++k)
      res.colors[static_cast<std::size_t>(pending[k])] = colors[k];
    res.tail_edges = std::move(pending);
  }

  transcript_.arrivals.push_back(arrival);
  transcript_.coloring.colors.push_back(res.colors);
  transcript_.stage.push_back(std::move(stage));
  return res;
}

int cascade_color_bound(const Transcript& transcript, const LevelPlan& plan) {
  const Instance tail = residual_subgraph(transcript, plan.level_count() - 1);
  const int rmax = tail.arrivals.empty() ? 0 : realized_max_degree(tail);
  return plan.level_colors() + std::max(0, 2 * rmax - 1);
}

}  // namespace oec
