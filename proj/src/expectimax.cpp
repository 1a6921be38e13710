#include "oec/expectimax.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace oec::expectimax {

namespace {

void check_limits(int n_off, int delta, int arrival_budget, int color_cap) {
  if (n_off < 1 || delta < 1 || arrival_budget < 0 || color_cap < 1)
    throw std::invalid_argument("expectimax needs n_off, delta, color_cap >= 1");
  if (delta > n_off) throw std::invalid_argument("expectimax needs delta <= n_off");
  if (n_off > kMaxOffline || delta > kMaxDelta || color_cap > kMaxColorCap) {
    std::ostringstream msg;
    msg << "expectimax limits are n_off <= " << kMaxOffline << ", delta <= " << kMaxDelta
        << ", color_cap <= " << kMaxColorCap;
    throw LimitExceeded(msg.str());
  }
}

struct Group {
  NodeSig sig;
  int first = 0;  // index of the first node with this signature
  int count = 0;
};

std::vector<Group> groups_of(const GameState& s) {
  std::vector<Group> gs;
  for (int i = 0; i < static_cast<int>(s.nodes.size()); ++i) {
    const auto& n = s.nodes[static_cast<std::size_t>(i)];
    if (!gs.empty() && gs.back().sig == n) {
      ++gs.back().count;
    } else {
      gs.push_back({n, i, 1});
    }
  }
  return gs;
}

// Node indices for each neighborhood the adversary may present. Unordered
// moves pick a multiset of signatures; ordered moves pick sequences.
std::vector<std::vector<int>> adversary_moves(const GameState& s, int delta, bool ordered) {
  const auto gs = groups_of(s);
  std::vector<std::vector<int>> out;
  std::vector<int> taken(gs.size(), 0);
  std::vector<int> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!cur.empty()) out.push_back(cur);
    if (static_cast<int>(cur.size()) == delta) return;
    for (std::size_t g = ordered ? 0 : from; g < gs.size(); ++g) {
      if (taken[g] == gs[g].count) continue;
      cur.push_back(gs[g].first + taken[g]);
      ++taken[g];
      rec(g);
      --taken[g];
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

GameState apply(const GameState& s, const std::vector<int>& nbrs, const std::vector<int>& colors) {
  GameState next = s;
  --next.arrivals_left;
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    auto& n = next.nodes[static_cast<std::size_t>(nbrs[k])];
    n.mask = static_cast<std::uint8_t>(n.mask | (1u << colors[k]));
    --n.budget;
    next.used |= 1u << colors[k];
  }
  next.canonicalize();
  return next;
}

bool terminal(const GameState& s) { return s.arrivals_left <= 0 || s.nodes.empty(); }

std::vector<NodeSig> sigs_of(const GameState& s, const std::vector<int>& nbrs) {
  std::vector<NodeSig> out;
  out.reserve(nbrs.size());
  for (int i : nbrs) out.push_back(s.nodes[static_cast<std::size_t>(i)]);
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic minimax with memoization.

class DeterministicSolver {
 public:
  DeterministicSolver(int delta, int cap) : delta_(delta), cap_(cap) {}

  int value(const GameState& s) {
    if (terminal(s)) return std::popcount(s.used);
    const std::string key = s.key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int best = -1;
    for (const auto& nbrs : adversary_moves(s, delta_, false)) {
      best = std::max(best, response(s, nbrs).first);
      if (best > cap_) break;
    }
    memo_.emplace(key, best);
    return best;
  }

  // The algorithm's best coloring of `nbrs` and the resulting value.
  std::pair<int, std::vector<int>> response(const GameState& s, const std::vector<int>& nbrs) {
    // Unused colors are interchangeable, so only the lowest |nbrs| of them
    // need to be offered.
    std::uint32_t allowed = s.used;
    int fresh = 0;
    for (int c = 0; c < cap_ && fresh < static_cast<int>(nbrs.size()); ++c)
      if (!(s.used >> c & 1u)) {
        allowed |= 1u << c;
        ++fresh;
      }
    const int floor = std::popcount(s.used);
    int best = cap_ + 1;
    std::vector<int> best_colors(nbrs.size(), -1);
    std::vector<int> cur(nbrs.size(), -1);
    std::function<bool(std::size_t, std::uint32_t)> rec = [&](std::size_t k, std::uint32_t taken) {
      if (k == nbrs.size()) {
        const int v = value(apply(s, nbrs, cur));
        if (v < best) {
          best = v;
          best_colors = cur;
        }
        return best <= floor;
      }
      const std::uint32_t blocked = taken | s.nodes[static_cast<std::size_t>(nbrs[k])].mask;
      for (int c = 0; c < cap_; ++c) {
        if (!(allowed >> c & 1u) || (blocked >> c & 1u)) continue;
        cur[k] = c;
        if (rec(k + 1, taken | (1u << c))) return true;
      }
      return false;
    };
    rec(0, 0);
    return {best, best_colors};
  }

  std::size_t states() const { return memo_.size(); }

 private:
  int delta_;
  int cap_;
  std::unordered_map<std::string, int> memo_;
};

// ---------------------------------------------------------------------------
// Expectimax against a randomized policy.

class RandomizedSolver {
 public:
  RandomizedSolver(const ColorPolicy& policy, int delta, int cap)
      : policy_(policy), delta_(delta), cap_(cap) {}

  double value(const GameState& s) {
    if (terminal(s)) return std::popcount(s.used);
    const std::string key = s.key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double best = -1.0;
    for (const auto& nbrs : adversary_moves(s, delta_, true))
      best = std::max(best, chance(s, nbrs));
    memo_.emplace(key, best);
    return best;
  }

  double chance(const GameState& s, const std::vector<int>& nbrs) {
    double ev = 0.0;
    for (const auto& [p, colors] : outcomes(s, nbrs)) ev += p * outcome_value(s, nbrs, colors);
    return ev;
  }

  double outcome_value(const GameState& s, const std::vector<int>& nbrs,
                       const std::vector<int>& colors) {
    if (std::find(colors.begin(), colors.end(), -1) != colors.end()) return cap_ + 1;
    return value(apply(s, nbrs, colors));
  }

  std::vector<std::pair<double, std::vector<int>>> outcomes(const GameState& s,
                                                            const std::vector<int>& nbrs) const {
    const auto sigs = sigs_of(s, nbrs);
    auto dist = policy_.distribution(sigs, s.used, cap_);
    double total = 0.0;
    for (const auto& [p, colors] : dist) {
      if (p < 0.0) throw PolicyError(policy_.name() + ": negative probability");
      if (colors.size() != nbrs.size()) throw PolicyError(policy_.name() + ": wrong outcome size");
      for (std::size_t k = 0; k < colors.size(); ++k) {
        const int c = colors[k];
        if (c == -1) continue;
        if (c < 0 || c >= cap_ || (sigs[k].mask >> c & 1u))
          throw PolicyError(policy_.name() + ": improper color in outcome");
        for (std::size_t k2 = 0; k2 < k; ++k2)
          if (colors[k2] == c) throw PolicyError(policy_.name() + ": repeated color in outcome");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw PolicyError(policy_.name() + ": distribution sums to " + std::to_string(total));
    return dist;
  }

  std::size_t states() const { return memo_.size(); }

 private:
  const ColorPolicy& policy_;
  int delta_;
  int cap_;
  std::unordered_map<std::string, double> memo_;
};

// ---------------------------------------------------------------------------
// Uncached raw solver.

struct RawNode {
  std::uint32_t mask = 0;
  int budget = 0;
};

int raw_value(std::vector<RawNode>& nodes, std::uint32_t used, int arrivals_left, int delta,
              int cap);

int raw_response(std::vector<RawNode>& nodes, std::uint32_t used, int arrivals_left,
                 const std::vector<int>& nbrs, std::size_t k, std::uint32_t taken, int delta,
                 int cap) {
  if (k == nbrs.size()) return raw_value(nodes, used, arrivals_left - 1, delta, cap);
  int best = cap + 1;
  auto& node = nodes[static_cast<std::size_t>(nbrs[k])];
  for (int c = 0; c < cap; ++c) {
    const std::uint32_t bit = 1u << c;
    if ((node.mask & bit) || (taken & bit)) continue;
    node.mask |= bit;
    --node.budget;
    best = std::min(best, raw_response(nodes, used | bit, arrivals_left, nbrs, k + 1, taken | bit,
                                       delta, cap));
    ++node.budget;
    node.mask &= ~bit;
  }
  return best;
}

int raw_value(std::vector<RawNode>& nodes, std::uint32_t used, int arrivals_left, int delta,
              int cap) {
  const int n = static_cast<int>(nodes.size());
  int best = std::popcount(used);
  if (arrivals_left <= 0) return best;
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    if (std::popcount(subset) > delta) continue;
    std::vector<int> nbrs;
    bool ok = true;
    for (int u = 0; u < n && ok; ++u)
      if (subset >> u & 1u) {
        ok = nodes[static_cast<std::size_t>(u)].budget > 0;
        nbrs.push_back(u);
      }
    if (!ok) continue;
    best = std::max(best, raw_response(nodes, used, arrivals_left, nbrs, 0, 0, delta, cap));
  }
  return best;
}

}  // namespace

GameState GameState::initial(int n_off, int delta, int arrival_budget) {
  GameState s;
  s.nodes.assign(static_cast<std::size_t>(n_off), NodeSig{0, static_cast<std::uint8_t>(delta)});
  s.arrivals_left = arrival_budget;
  s.canonicalize();
  return s;
}

void GameState::canonicalize() {
  std::erase_if(nodes, [](const NodeSig& n) { return n.budget == 0; });
  std::sort(nodes.begin(), nodes.end());
}

std::string GameState::key() const {
  std::string k;
  k.reserve(2 + 2 * nodes.size());
  k.push_back(static_cast<char>(arrivals_left));
  k.push_back(static_cast<char>(used));
  for (const auto& n : nodes) {
    k.push_back(static_cast<char>(n.mask));
    k.push_back(static_cast<char>(n.budget));
  }
  return k;
}

std::string TraceStep::to_string() const {
  std::ostringstream out;
  out << "present [";
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    if (k) out << ' ';
    out << '{';
    bool first = true;
    for (int c = 0; c < 8; ++c)
      if (neighbors[k].mask >> c & 1u) {
        out << (first ? "" : ",") << c;
        first = false;
      }
    out << "}/" << static_cast<int>(neighbors[k].budget);
  }
  out << "] -> colors [";
  for (std::size_t k = 0; k < colors.size(); ++k) out << (k ? " " : "") << colors[k];
  out << "] p=" << probability << " value=" << value;
  return out.str();
}

SolveResult solve_deterministic(int n_off, int delta, int arrival_budget, int color_cap) {
  check_limits(n_off, delta, arrival_budget, color_cap);
  DeterministicSolver solver(delta, color_cap);
  GameState s = GameState::initial(n_off, delta, arrival_budget);
  SolveResult r;
  r.value = solver.value(s);
  r.infeasible = r.value > color_cap;
  while (!terminal(s)) {
    const int v = solver.value(s);
    std::vector<int> best_nbrs;
    std::pair<int, std::vector<int>> best{-1, {}};
    for (const auto& nbrs : adversary_moves(s, delta, false)) {
      auto resp = solver.response(s, nbrs);
      if (resp.first > best.first) {
        best = std::move(resp);
        best_nbrs = nbrs;
      }
      if (best.first >= v) break;
    }
    r.trace.push_back({sigs_of(s, best_nbrs), best.second, 1.0, static_cast<double>(v)});
    if (std::find(best.second.begin(), best.second.end(), -1) != best.second.end()) break;
    s = apply(s, best_nbrs, best.second);
  }
  r.states = solver.states();
  return r;
}

int solve_deterministic_uncached(int n_off, int delta, int arrival_budget, int color_cap) {
  check_limits(n_off, delta, arrival_budget, color_cap);
  std::vector<RawNode> nodes(static_cast<std::size_t>(n_off), RawNode{0, delta});
  return raw_value(nodes, 0, arrival_budget, delta, color_cap);
}

std::vector<std::pair<double, std::vector<int>>> FirstFitPolicy::distribution(
    const std::vector<NodeSig>& neighbors, std::uint32_t, int color_cap) const {
  std::vector<int> colors;
  std::uint32_t taken = 0;
  for (const auto& n : neighbors) {
    int pick = -1;
    for (int c = 0; c < color_cap; ++c)
      if (!((n.mask | taken) >> c & 1u)) {
        pick = c;
        break;
      }
    if (pick >= 0) taken |= 1u << pick;
    colors.push_back(pick);
  }
  return {{1.0, colors}};
}

std::vector<std::pair<double, std::vector<int>>> UniformPolicy::distribution(
    const std::vector<NodeSig>& neighbors, std::uint32_t, int color_cap) const {
  std::vector<std::pair<double, std::vector<int>>> out;
  std::vector<int> cur;
  std::function<void(std::size_t, std::uint32_t, double)> rec = [&](std::size_t k,
                                                                    std::uint32_t taken, double p) {
    if (k == neighbors.size()) {
      out.emplace_back(p, cur);
      return;
    }
    const std::uint32_t blocked = taken | neighbors[k].mask;
    std::vector<int> valid;
    for (int c = 0; c < color_cap; ++c)
      if (!(blocked >> c & 1u)) valid.push_back(c);
    if (valid.empty()) {
      // Stuck: the remaining edges stay uncolored.
      const std::size_t keep = cur.size();
      cur.resize(neighbors.size(), -1);
      out.emplace_back(p, cur);
      cur.resize(keep);
      return;
    }
    const double share = p / static_cast<double>(valid.size());
    for (int c : valid) {
      cur.push_back(c);
      rec(k + 1, taken | (1u << c), share);
      cur.pop_back();
    }
  };
  rec(0, 0, 1.0);
  return out;
}

std::unique_ptr<ColorPolicy> make_policy(const std::string& name) {
  if (name == "first-fit" || name == "firstfit" || name == "first_fit")
    return std::make_unique<FirstFitPolicy>();
  if (name == "uniform") return std::make_unique<UniformPolicy>();
  throw std::invalid_argument("unknown policy: " + name);
}

SolveResult evaluate_randomized(const ColorPolicy& policy, int n_off, int delta,
                                int arrival_budget, int color_cap) {
  check_limits(n_off, delta, arrival_budget, color_cap);
  RandomizedSolver solver(policy, delta, color_cap);
  GameState s = GameState::initial(n_off, delta, arrival_budget);
  SolveResult r;
  r.value = solver.value(s);
  r.infeasible = r.value > color_cap;
  while (!terminal(s)) {
    const double v = solver.value(s);
    std::vector<int> best_nbrs;
    double best = -1.0;
    for (const auto& nbrs : adversary_moves(s, delta, true)) {
      const double c = solver.chance(s, nbrs);
      if (c > best + 1e-12) {
        best = c;
        best_nbrs = nbrs;
      }
    }
    auto dist = solver.outcomes(s, best_nbrs);
    const auto likely = std::max_element(dist.begin(), dist.end(), [](const auto& a, const auto& b) {
      return a.first < b.first;
    });
    r.trace.push_back({sigs_of(s, best_nbrs), likely->second, likely->first, v});
    if (std::find(likely->second.begin(), likely->second.end(), -1) != likely->second.end()) break;
    s = apply(s, best_nbrs, likely->second);
  }
  r.states = solver.states();
  return r;
}

}  // namespace oec::expectimax
