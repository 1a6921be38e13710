#include "oec/crs.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oec::crs {

MarginalVector::MarginalVector(std::vector<double> x) : x_(std::move(x)) {
  ell_.resize(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double xi = x_[i];
    if (!(xi >= 0.0 && xi <= 1.0))
      throw std::invalid_argument("marginal out of [0,1]: " + std::to_string(xi));
    sum_ += xi;
    max_x_ = std::max(max_x_, xi);
    empty_prob_ *= (1.0 - xi);
    if (xi == 1.0) {
      ell_[i] = std::numeric_limits<double>::infinity();
      ++certain_;
    } else {
      ell_[i] = -std::log1p(-xi);
      total_rate_ += ell_[i];
    }
  }
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kExpClock: return "exp-clock";
    case Scheme::kUniform: return "uniform";
    case Scheme::kNone: return "none";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "exp-clock") return Scheme::kExpClock;
  if (name == "uniform") return Scheme::kUniform;
  if (name == "none") return Scheme::kNone;
  throw std::invalid_argument("unknown CRS scheme: " + name);
}

std::vector<double> fair_bound(const MarginalVector& x) {
  std::vector<double> b(x.size(), 0.0);
  if (x.sum() <= 0.0) return b;
  const double scale = (1.0 - x.empty_prob()) / x.sum();
  for (std::size_t i = 0; i < x.size(); ++i) b[i] = x.x(i) * scale;
  return b;
}

std::vector<double> selection_prob_exact(const MarginalVector& x) {
  std::vector<double> p(x.size(), 0.0);
  if (x.certain_count() > 0) {
    const double share = 1.0 / static_cast<double>(x.certain_count());
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x.x(i) == 1.0) p[i] = share;
    return p;
  }
  const double total = x.total_rate();
  if (total <= 0.0) return p;
  const double hit = -std::expm1(-total);  // 1 - e^{-L}
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = x.rate(i) / total * hit;
  return p;
}

namespace {

void check_feasible([[maybe_unused]] const ActiveSet& active,
                    [[maybe_unused]] const Selection& s) {
#ifndef NDEBUG
  if (active.members.empty()) {
    assert(!s.winner);
  } else {
    assert(s.winner);
    bool found = false;
    for (int m : active.members) found = found || (m == *s.winner);
    assert(found);
  }
#endif
}

}  // namespace

Selection exp_clock_select(const ActiveSet& active, const MarginalVector& x, Rng& rng) {
  Selection s;
  const auto& members = active.members;
  if (members.empty()) return s;
  if (members.size() == 1) {
    s.winner = members.front();
    return s;
  }

  // Zero clocks (x_i == 1) beat everything; tie-break uniformly among them.
  int zero_count = 0;
  for (int m : members)
    if (x.x(static_cast<std::size_t>(m)) == 1.0) ++zero_count;
  if (zero_count > 0) {
    auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(zero_count)));
    for (int m : members) {
      if (x.x(static_cast<std::size_t>(m)) != 1.0) continue;
      if (pick-- == 0) {
        s.winner = m;
        break;
      }
    }
    check_feasible(active, s);
    return s;
  }

  double best = std::numeric_limits<double>::infinity();
  for (int m : members) {
    const auto i = static_cast<std::size_t>(m);
    const double rate = x.rate(i);
    const double u = rng.uniform_open();
    // Inverse CDF of Exp(rate) truncated to [0,1]; 1 - e^{-rate} == x_i.
    const double clock = rate > 0.0 ? -std::log1p(-u * x.x(i)) / rate : u;
    if (clock < best) {
      best = clock;
      s.winner = m;
    }
  }
  check_feasible(active, s);
  return s;
}

Selection uniform_select(const ActiveSet& active, Rng& rng) {
  Selection s;
  if (active.members.empty()) return s;
  const auto k = rng.below(active.members.size());
  s.winner = active.members[static_cast<std::size_t>(k)];
  return s;
}

Selection select(Scheme scheme, const ActiveSet& active, const MarginalVector& x, Rng& rng) {
  switch (scheme) {
    case Scheme::kExpClock: return exp_clock_select(active, x, rng);
    case Scheme::kUniform: return uniform_select(active, rng);
    case Scheme::kNone: return {};
  }
  return {};
}

MonteCarloResult monte_carlo_marginals(const MarginalVector& x, Scheme scheme,
                                       std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  Rng rng(seed);
  std::vector<std::uint64_t> wins(x.size(), 0);
  ActiveSet active;
  active.members.reserve(x.size());
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    active.members.clear();
    for (std::size_t i = 0; i < x.size(); ++i)
      if (rng.bernoulli(x.x(i))) active.members.push_back(static_cast<int>(i));
    const Selection s = select(scheme, active, x, rng);
    if (s.winner) ++wins[static_cast<std::size_t>(*s.winner)];
  }
  MonteCarloResult r;
  r.trials = trials;
  r.mean.resize(x.size());
  r.stderr_.resize(x.size());
  const auto n = static_cast<double>(trials);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = static_cast<double>(wins[i]) / n;
    r.mean[i] = p;
    r.stderr_[i] = std::sqrt(p * (1.0 - p) / n);
  }
  return r;
}

}  // namespace oec::crs
