#include "oec/generators.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "oec/rng.hpp"

namespace oec {

std::string to_string(GenKind kind) {
  switch (kind) {
    case GenKind::kRegular: return "regular";
    case GenKind::kBinomial: return "binomial";
    case GenKind::kGreedyHard: return "greedy_hard";
  }
  return "?";
}

GenKind parse_gen_kind(const std::string& name) {
  if (name == "regular") return GenKind::kRegular;
  if (name == "binomial") return GenKind::kBinomial;
  if (name == "greedy_hard" || name == "greedy-hard") return GenKind::kGreedyHard;
  throw GeneratorError("unknown generator kind: " + name);
}

BudgetTooSmall::BudgetTooSmall(int required)
    : GeneratorError("budget too small: need n >= " + std::to_string(required)),
      required_(required) {}

namespace {

std::uint64_t edge_key(int v, int u) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) |
         static_cast<std::uint32_t>(u);
}

// Places one perfect matching (online v -> offline perm[v]) that avoids
// `existing`. Returns false if the swap budget runs out.
bool place_matching(std::vector<int>& perm, const std::unordered_set<std::uint64_t>& existing,
                    Rng& rng, std::uint64_t swap_budget) {
  const int n = static_cast<int>(perm.size());
  auto clashes = [&](int v) { return existing.count(edge_key(v, perm[static_cast<std::size_t>(v)])) > 0; };

  std::vector<int> bad;
  for (int v = 0; v < n; ++v)
    if (clashes(v)) bad.push_back(v);

  std::uint64_t swaps = 0;
  while (!bad.empty()) {
    if (swaps++ >= swap_budget) return false;
    const auto slot = static_cast<std::size_t>(rng.below(bad.size()));
    const int v = bad[slot];
    if (!clashes(v)) {  // fixed by an earlier swap
      bad[slot] = bad.back();
      bad.pop_back();
      continue;
    }
    const int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (w == v) continue;
    const int before = 1 + (clashes(w) ? 1 : 0);
    std::swap(perm[static_cast<std::size_t>(v)], perm[static_cast<std::size_t>(w)]);
    const int after = (clashes(v) ? 1 : 0) + (clashes(w) ? 1 : 0);
    if (after > before) {
      std::swap(perm[static_cast<std::size_t>(v)], perm[static_cast<std::size_t>(w)]);
      continue;
    }
    if (clashes(w)) bad.push_back(w);
  }
  return true;
}

}  // namespace

Instance gen_random_regular(int n, int delta, std::uint64_t seed) {
  if (n < 1 || delta < 1) throw GeneratorError("regular generator needs n, delta >= 1");
  if (delta > n) throw GeneratorError("regular generator needs delta <= n");
  Rng rng(seed);
  std::unordered_set<std::uint64_t> existing;
  existing.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(delta) * 2);
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));

  const std::uint64_t swap_budget = 2000ULL * static_cast<std::uint64_t>(n) + 100000ULL;
  constexpr int kRestarts = 64;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int layer = 0; layer < delta; ++layer) {
    bool placed = false;
    for (int attempt = 0; attempt < kRestarts && !placed; ++attempt) {
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      placed = place_matching(perm, existing, rng, swap_budget);
    }
    if (!placed)
      throw GeneratorError("regular generator: swap repair hit its iteration cap at layer " +
                           std::to_string(layer));
    for (int v = 0; v < n; ++v) {
      const int u = perm[static_cast<std::size_t>(v)];
      existing.insert(edge_key(v, u));
      nbrs[static_cast<std::size_t>(v)].push_back(u);
    }
  }

  Instance inst;
  inst.header = {n, delta};
  inst.arrivals.reserve(static_cast<std::size_t>(n));
  for (auto& list : nbrs) {
    std::sort(list.begin(), list.end());
    inst.arrivals.push_back({std::move(list)});
  }
  return inst;
}

Instance gen_binomial(int n_offline, int n_online, double p, int delta_cap, std::uint64_t seed) {
  if (n_offline < 1 || n_online < 0) throw GeneratorError("binomial generator needs n_offline >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw GeneratorError("edge probability must lie in [0,1]");
  if (delta_cap < 1) throw GeneratorError("delta cap must be >= 1");
  const int cap = std::min(delta_cap, n_offline);
  Rng rng(seed);
  std::vector<int> deg(static_cast<std::size_t>(n_offline), 0);
  Instance inst;
  inst.header = {n_offline, cap};
  for (int v = 0; v < n_online; ++v) {
    OnlineArrival a;
    for (int u = 0; u < n_offline; ++u) {
      if (!rng.bernoulli(p)) continue;
      auto& du = deg[static_cast<std::size_t>(u)];
      if (du >= cap || static_cast<int>(a.neighbors.size()) >= cap) continue;
      ++du;
      a.neighbors.push_back(u);
    }
    if (!a.neighbors.empty()) inst.arrivals.push_back(std::move(a));
  }
  return inst;
}

int greedy_hard_required_size(int delta) { return std::max(1, 2 * delta - 1); }

Instance gen_greedy_hard(int delta, int n_budget, std::uint64_t seed) {
  if (delta < 1) throw GeneratorError("greedy_hard needs delta >= 1");
  const int required = greedy_hard_required_size(delta);
  if (n_budget < required) throw BudgetTooSmall(required);

  // Under first-fit an offline node with k edges holds exactly the colors
  // {0..k-1}. An online node whose neighbors have strictly increasing
  // degrees (listed in that order) gives each of them its next color, so
  // every step advances one node per degree class, pipeline style. Once
  // all delta nodes hold {0..delta-2}, one node spanning them needs
  // colors delta-1 .. 2 delta-2.
  std::vector<int> level(static_cast<std::size_t>(delta), 0);
  std::vector<std::vector<int>> logical;
  const int top = delta - 1;
  while (std::any_of(level.begin(), level.end(), [&](int l) { return l < top; })) {
    std::vector<int> stair;
    for (int l = 0; l < top; ++l) {
      for (int u = 0; u < delta; ++u)
        if (level[static_cast<std::size_t>(u)] == l) {
          stair.push_back(u);
          break;
        }
    }
    for (int u : stair) ++level[static_cast<std::size_t>(u)];
    logical.push_back(std::move(stair));
  }
  std::vector<int> all(static_cast<std::size_t>(delta));
  std::iota(all.begin(), all.end(), 0);
  logical.push_back(all);

  Rng rng(seed);
  std::vector<int> ids(static_cast<std::size_t>(n_budget));
  std::iota(ids.begin(), ids.end(), 0);
  rng.shuffle(ids);

  Instance inst;
  inst.header = {n_budget, delta};
  for (const auto& arr : logical) {
    OnlineArrival a;
    for (int u : arr) a.neighbors.push_back(ids[static_cast<std::size_t>(u)]);
    inst.arrivals.push_back(std::move(a));
  }
  return inst;
}

Instance generate(const GenSpec& spec) {
  switch (spec.kind) {
    case GenKind::kRegular: return gen_random_regular(spec.n_offline, spec.delta, spec.seed);
    case GenKind::kBinomial:
      return gen_binomial(spec.n_offline, spec.n_online > 0 ? spec.n_online : spec.n_offline,
                          spec.edge_prob, spec.delta, spec.seed);
    case GenKind::kGreedyHard: return gen_greedy_hard(spec.delta, spec.n_offline, spec.seed);
  }
  throw GeneratorError("unknown generator kind");
}

}  // namespace oec
