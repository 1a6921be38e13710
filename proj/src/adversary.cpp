#include "oec/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace oec {

std::optional<OnlineArrival> ReplaySource::next(const AdversaryView&) {
  if (cursor_ >= instance_.arrivals.size()) return std::nullopt;
  return instance_.arrivals[cursor_++];
}

LoadField::LoadField(const AdversaryView& view, int level, int delta) {
  const auto& levels = view.colorer.levels();
  if (level >= 0 && level < static_cast<int>(levels.size())) {
    palettes_ = &levels[static_cast<std::size_t>(level)].palettes();
    k_ = palettes_->palette_size();
  } else {
    tail_ = &view.colorer.tail();
    k_ = std::max(1, 2 * delta - 1);
    free_.assign(static_cast<std::size_t>(view.header.n_offline), k_);
    for (int u = 0; u < view.header.n_offline; ++u)
      for (int g : tail_->colors_at(u))
        if (g - tail_->color_base() < k_) --free_[static_cast<std::size_t>(u)];
  }
}

double LoadField::x(int u, int c) const {
  if (palettes_) return palettes_->x(u, c);
  const int global = tail_->color_base() + c;
  if (tail_->used_at(u, global)) return 0.0;
  const int free = free_[static_cast<std::size_t>(u)];
  return free > 0 ? 1.0 / free : 0.0;
}

std::vector<int> LoadField::support(int u) const {
  if (palettes_) {
    const auto cs = palettes_->colors(u);
    return {cs.begin(), cs.end()};
  }
  std::vector<int> out;
  for (int c = 0; c < k_; ++c)
    if (!tail_->used_at(u, tail_->color_base() + c)) out.push_back(c);
  return out;
}

namespace {

// Indices 0..n-1 ordered by score descending, lowest index first on ties.
std::vector<int> top_k(const std::vector<double>& score, const std::vector<int>& pool,
                       std::size_t k) {
  std::vector<int> order = pool;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

struct AttackContext {
  LoadField field;
  std::vector<int> eligible;  // nodes with spare degree, ascending
  std::vector<int> all_colors;
  std::size_t color_count;
  std::size_t node_count;
  int n_offline;
};

AttackContext make_context(const AdversaryView& view, const LoadAttackerParams& p) {
  AttackContext ctx{LoadField(view, p.level, p.delta), {}, {}, 0, 0, view.header.n_offline};
  for (int u = 0; u < view.header.n_offline; ++u)
    if (view.ledger.degree(u) < view.header.delta) ctx.eligible.push_back(u);
  ctx.all_colors.resize(static_cast<std::size_t>(ctx.field.color_count()));
  std::iota(ctx.all_colors.begin(), ctx.all_colors.end(), 0);
  const auto want_colors = static_cast<std::size_t>(std::ceil(p.color_frac * p.delta - 1e-12));
  ctx.color_count = std::min<std::size_t>(std::max<std::size_t>(want_colors, 1),
                                          ctx.all_colors.size());
  ctx.node_count = std::min<std::size_t>(static_cast<std::size_t>(p.delta), ctx.eligible.size());
  return ctx;
}

std::vector<int> best_colors(const AttackContext& ctx, const std::vector<int>& nodes) {
  std::vector<double> col(ctx.all_colors.size(), 0.0);
  for (int u : nodes)
    for (int c : ctx.field.support(u)) col[static_cast<std::size_t>(c)] += ctx.field.x(u, c);
  return top_k(col, ctx.all_colors, ctx.color_count);
}

std::vector<int> best_nodes(const AttackContext& ctx, const std::vector<int>& colors) {
  std::vector<double> row(static_cast<std::size_t>(ctx.n_offline), 0.0);
  for (int u : ctx.eligible) {
    double s = 0.0;
    for (int c : colors) s += ctx.field.x(u, c);
    row[static_cast<std::size_t>(u)] = s;
  }
  return top_k(row, ctx.eligible, ctx.node_count);
}

double pair_value(const AttackContext& ctx, const std::vector<int>& nodes,
                  const std::vector<int>& colors) {
  double v = 0.0;
  for (int u : nodes)
    for (int c : colors) v += ctx.field.x(u, c);
  return v;
}

}  // namespace

LoadPair LoadAttacker::two_stage_pair(const AdversaryView& view) const {
  const AttackContext ctx = make_context(view, params_);
  LoadPair p;
  if (ctx.eligible.empty()) return p;
  p.colors = best_colors(ctx, ctx.eligible);
  p.nodes = best_nodes(ctx, p.colors);
  p.value = pair_value(ctx, p.nodes, p.colors);
  return p;
}

namespace {

// Number of node subsets of the given size, saturating at `cap`.
std::uint64_t choose_capped(std::size_t n, std::size_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (r > static_cast<double>(cap)) return cap;
  }
  return static_cast<std::uint64_t>(std::llround(r));
}

// For a fixed U the best C is its top colors, so enumerating U is exact.
LoadPair exhaustive_pair(const AttackContext& ctx) {
  LoadPair best;
  best.value = -1.0;
  const std::size_t k = ctx.node_count;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> nodes(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) nodes[i] = ctx.eligible[idx[i]];
    auto colors = best_colors(ctx, nodes);
    const double v = pair_value(ctx, nodes, colors);
    if (v > best.value + 1e-12) best = {nodes, std::move(colors), v};
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == ctx.eligible.size() - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace

LoadPair LoadAttacker::best_pair(const AdversaryView& view) const {
  const AttackContext ctx = make_context(view, params_);
  LoadPair p;
  if (ctx.eligible.empty()) return p;
  if (choose_capped(ctx.eligible.size(), ctx.node_count, kExhaustiveLimit + 1) <=
      kExhaustiveLimit)
    return exhaustive_pair(ctx);
  p.colors = best_colors(ctx, ctx.eligible);
  p.nodes = best_nodes(ctx, p.colors);
  p.value = pair_value(ctx, p.nodes, p.colors);
  for (int round = 0; round < 16; ++round) {
    LoadPair q;
    q.colors = best_colors(ctx, p.nodes);
    q.nodes = best_nodes(ctx, q.colors);
    q.value = pair_value(ctx, q.nodes, q.colors);
    if (!(q.value > p.value + 1e-12)) break;
    p = std::move(q);
  }
  return p;
}

std::optional<OnlineArrival> LoadAttacker::next(const AdversaryView& view) {
  if (view.ledger.arrivals_seen() >= params_.arrivals_budget) return std::nullopt;
  LoadPair p = best_pair(view);
  if (p.nodes.empty()) return std::nullopt;
  OnlineArrival a{p.nodes};
  last_ = std::move(p);
  return a;
}

GreedyKiller::GreedyKiller(GreedyKillerParams params)
    : params_(params), sets_(static_cast<std::size_t>(std::max(params.n_offline, 0))) {}

void GreedyKiller::catch_up(const Transcript& transcript) {
  for (; seen_arrivals_ < transcript.arrivals.size(); ++seen_arrivals_) {
    const auto& nbrs = transcript.arrivals[seen_arrivals_].neighbors;
    const auto& cols = transcript.coloring.colors[seen_arrivals_];
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      if (cols[j] == kUncolored) continue;
      auto& s = sets_[static_cast<std::size_t>(nbrs[j])];
      s.insert(std::upper_bound(s.begin(), s.end(), cols[j]), cols[j]);
    }
  }
}

std::optional<OnlineArrival> GreedyKiller::next(const AdversaryView& view) {
  if (view.ledger.arrivals_seen() >= params_.arrivals_budget) return std::nullopt;
  catch_up(view.transcript());
  const int delta = params_.delta;
  const int top = delta - 1;
  const int n = view.header.n_offline;

  // Delta nodes one edge short of full, with identical color sets: strike.
  std::map<std::vector<int>, std::vector<int>> ready;
  std::vector<int> ready_any;
  int pool = 0;  // nodes part-way through the staircase
  for (int u = 0; u < n; ++u) {
    const int d = view.ledger.degree(u);
    if (d == top) {
      ready[sets_[static_cast<std::size_t>(u)]].push_back(u);
      ready_any.push_back(u);
    }
    if (d >= 1 && d <= top) ++pool;
  }
  for (const auto& [colors, nodes] : ready) {
    if (static_cast<int>(nodes.size()) >= delta) {
      return OnlineArrival{{nodes.begin(), nodes.begin() + delta}};
    }
  }

  // Staircase: one node per degree class below delta - 1, ascending.
  OnlineArrival stair;
  for (int d = 0; d < top; ++d) {
    if (d == 0 && pool >= delta) continue;
    for (int u = 0; u < n; ++u) {
      if (view.ledger.degree(u) == d) {
        stair.neighbors.push_back(u);
        break;
      }
    }
  }
  if (!stair.neighbors.empty()) return stair;

  // Nothing left to climb: flush whatever is one short of full.
  if (!ready_any.empty()) {
    if (static_cast<int>(ready_any.size()) > delta) ready_any.resize(static_cast<std::size_t>(delta));
    return OnlineArrival{ready_any};
  }
  return std::nullopt;
}

}  // namespace oec
