#include "oec/partial_coloring.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace oec {

double epsilon_default(double n, double delta) {
  if (n < 2.0 || delta < 1.0) throw std::invalid_argument("epsilon_default needs n >= 2, delta >= 1");
  return 2.0 * std::pow(std::log(n) / delta, 0.2);
}

int palette_size_for(double delta, double epsilon) {
  return static_cast<int>(std::ceil((1.0 + std::sqrt(epsilon)) * delta - 1e-9));
}

LevelConfig LevelConfig::make(double delta, double epsilon, int color_base) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("level delta must be positive");
  LevelConfig cfg;
  cfg.delta = delta;
  cfg.epsilon = epsilon;
  cfg.palette_size = palette_size_for(delta, epsilon);
  cfg.color_base = color_base;
  return cfg;
}

PaletteState::PaletteState(int n_offline, int palette_size)
    : n_(n_offline), k_(palette_size) {
  if (n_offline < 0 || palette_size < 0) throw std::invalid_argument("negative palette shape");
  const auto total = static_cast<std::size_t>(n_) * static_cast<std::size_t>(k_);
  slots_.resize(total);
  pos_.resize(total);
  size_.assign(static_cast<std::size_t>(n_), k_);
  for (int u = 0; u < n_; ++u)
    for (int c = 0; c < k_; ++c) {
      slots_[index(u, c)] = c;
      pos_[index(u, c)] = c;
    }
}

void PaletteState::remove(int u, int c) {
  assert(contains(u, c));
  auto& sz = size_[static_cast<std::size_t>(u)];
  const int last = slots_[index(u, sz - 1)];
  const int slot = pos_[index(u, c)];
  slots_[index(u, slot)] = last;
  pos_[index(u, last)] = slot;
  slots_[index(u, sz - 1)] = c;
  pos_[index(u, c)] = sz - 1;
  --sz;
}

PaletteState init_level(int n_offline, const LevelConfig& cfg) {
  return PaletteState(n_offline, cfg.palette_size);
}

double StepOutcome::x(std::size_t j, int c) const {
  if (snapshot.empty()) throw std::logic_error("StepOutcome::x needs a recorded snapshot");
  const auto& pal = snapshot[j];
  if (std::find(pal.begin(), pal.end(), c) == pal.end()) return 0.0;
  return 1.0 / static_cast<double>(pal.size());
}

StepOutcome process_arrival(PaletteState& state, std::span<const int> neighbors,
                            crs::Scheme scheme, Rng& pick_rng, Rng& crs_rng,
                            bool record_snapshot, int t) {
  const std::size_t deg = neighbors.size();
  StepOutcome out;
  out.t = t;
  out.neighbors.assign(neighbors.begin(), neighbors.end());
  out.palette_before.resize(deg);
  out.picks.assign(deg, -1);
  out.assigned.assign(deg, -1);

  // Snapshot of x^{(t)} before any pick of this step.
  for (std::size_t j = 0; j < deg; ++j) out.palette_before[j] = state.size(neighbors[j]);
  if (record_snapshot) {
    out.snapshot.resize(deg);
    for (std::size_t j = 0; j < deg; ++j) {
      const auto pal = state.colors(neighbors[j]);
      out.snapshot[j].assign(pal.begin(), pal.end());
    }
  }

  // Picks, each removed from P(u) whether or not it ends up assigned.
  std::vector<std::pair<int, int>> by_color;  // (color, neighbor index)
  by_color.reserve(deg);
  for (std::size_t j = 0; j < deg; ++j) {
    const int u = neighbors[j];
    const int size = out.palette_before[j];
    if (size == 0) {
      out.skipped.push_back(static_cast<int>(j));
      continue;
    }
    const int c = state.colors(u)[pick_rng.below(static_cast<std::uint64_t>(size))];
    state.remove(u, c);
    out.picks[j] = c;
    by_color.emplace_back(c, static_cast<int>(j));
  }
  std::sort(by_color.begin(), by_color.end());

  // One CRS call per picked color.
  crs::ActiveSet active;
  std::vector<double> xs(deg);
  for (std::size_t lo = 0; lo < by_color.size();) {
    std::size_t hi = lo;
    const int c = by_color[lo].first;
    active.members.clear();
    while (hi < by_color.size() && by_color[hi].first == c) {
      active.members.push_back(by_color[hi].second);
      ++hi;
    }
    crs::Selection sel;
    if (active.members.size() == 1 && scheme != crs::Scheme::kNone) {
      sel.winner = active.members.front();
    } else {
      // x_uc for every neighbor: c was in P(u) before the step iff it is
      // still there or u just picked it.
      for (std::size_t j = 0; j < deg; ++j) {
        const int u = neighbors[j];
        const bool had = out.picks[j] == c || (out.palette_before[j] > 0 && state.contains(u, c));
        xs[j] = had ? 1.0 / static_cast<double>(out.palette_before[j]) : 0.0;
      }
      sel = crs::select(scheme, active, crs::MarginalVector(xs), crs_rng);
    }
    if (sel.winner) {
      out.assigned[static_cast<std::size_t>(*sel.winner)] = c;
      out.winners.emplace_back(c, *sel.winner);
    }
    lo = hi;
  }
  return out;
}

PartialColoringLevel::PartialColoringLevel(int n_offline, LevelConfig cfg, crs::Scheme scheme,
                                           std::uint64_t pick_seed, std::uint64_t crs_seed)
    : cfg_(cfg),
      scheme_(scheme),
      state_(init_level(n_offline, cfg)),
      pick_rng_(pick_seed),
      crs_rng_(crs_seed) {}

StepOutcome PartialColoringLevel::process(std::span<const int> neighbors, int t,
                                          bool record_snapshot) {
  StepOutcome out =
      process_arrival(state_, neighbors, scheme_, pick_rng_, crs_rng_, record_snapshot, t);
  edges_in_ += neighbors.size();
  edges_colored_ += out.colored();
  edges_skipped_ += out.skipped.size();
  if (!out.skipped.empty() && !warned_) {
    warned_ = true;
    std::cerr << "warning: level with color base " << cfg_.color_base << ": "
              << out.skipped.size() << " edge(s) of arrival " << t
              << " met an empty palette (degree bound " << cfg_.delta
              << " violated; further warnings for this level suppressed)\n";
  }
  return out;
}

}  // namespace oec
