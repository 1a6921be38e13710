#pragma once

// Single-item contention resolution. Elements are activated independently
// with marginals x_i; a scheme picks exactly one active element whenever
// at least one is active.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oec/rng.hpp"

namespace oec::crs {

/// Activation marginals plus the derived Poisson rates l_i = -ln(1 - x_i).
class MarginalVector {
 public:
  MarginalVector() = default;
  explicit MarginalVector(std::vector<double> x);

  std::size_t size() const { return x_.size(); }
  double x(std::size_t i) const { return x_[i]; }
  std::span<const double> values() const { return x_; }

  double sum() const { return sum_; }           // S
  double rate(std::size_t i) const { return ell_[i]; }  // +inf when x_i == 1
  double total_rate() const { return total_rate_; }      // L over x_i < 1
  std::size_t certain_count() const { return certain_; }  // #{i : x_i == 1}
  double max_x() const { return max_x_; }
  /// prod (1 - x_j), computed directly.
  double empty_prob() const { return empty_prob_; }

 private:
  std::vector<double> x_;
  std::vector<double> ell_;
  double sum_ = 0.0;
  double total_rate_ = 0.0;
  double max_x_ = 0.0;
  double empty_prob_ = 1.0;
  std::size_t certain_ = 0;
};

/// Indices of the realized active elements R.
struct ActiveSet {
  std::vector<int> members;
};

struct Selection {
  std::optional<int> winner;
};

enum class Scheme {
  kExpClock,  // truncated exponential clock race
  kUniform,   // uniform over the active set
  kNone,      // never selects; degenerate stub for ablations
};

std::string to_string(Scheme s);
/// Accepts "exp-clock", "uniform", "none".
Scheme parse_scheme(const std::string& name);

/// b_i = x_i (1 - prod(1 - x_j)) / S; all zeros when S == 0.
std::vector<double> fair_bound(const MarginalVector& x);

/// Closed-form marginals of the clock race: (l_i / L)(1 - e^{-L}), with the
/// x_i == 1 limit splitting all mass equally among the certain elements.
std::vector<double> selection_prob_exact(const MarginalVector& x);

/// Every active element draws a clock from the exponential distribution
/// with rate l_i truncated to [0, 1]; the smallest clock wins. Elements with
/// x_i == 1 get clock 0 and tie-break uniformly.
Selection exp_clock_select(const ActiveSet& active, const MarginalVector& x, Rng& rng);

Selection uniform_select(const ActiveSet& active, Rng& rng);

Selection select(Scheme scheme, const ActiveSet& active, const MarginalVector& x, Rng& rng);

struct MonteCarloResult {
  std::vector<double> mean;
  std::vector<double> stderr_;  // binomial standard error per element
  std::uint64_t trials = 0;
};

/// Empirical Pr[i selected] with activations drawn as independent
/// Bernoulli(x_i); reproducible for a fixed seed.
MonteCarloResult monte_carlo_marginals(const MarginalVector& x, Scheme scheme,
                                       std::uint64_t trials, std::uint64_t seed);

}  // namespace oec::crs
