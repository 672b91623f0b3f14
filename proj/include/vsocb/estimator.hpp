#pragma once

#include <cstdint>
#include <optional>

#include "vsocb/types.hpp"

namespace vsocb {

/// Horizon, universe size, confidence level and cost support that enter the
/// confidence radii. The online learner is assumed to know T and N.
struct EstimatorParams {
  Round horizon = 1;
  std::int64_t n_queries = 1;
  double delta = 1.0;
  CostRange cost_range;

  void validate() const;
  /// ln(8TN/delta), the cost radius log term.
  double cost_log_term() const;
  /// ln(16TN/delta), the probability radius log term.
  double prob_log_term() const;
};

/// Learner-side counters for one query.
struct QueryStats {
  std::int64_t arrivals = 0;                // every arrival
  std::int64_t misses = 0;                  // arrivals that missed the cache
  std::int64_t misses_at_last_oracle = 0;   // misses when this query last triggered
  double cum_cost = 0.0;                    // sum of costs observed on misses
  std::optional<Size> size;                 // known after the first miss
  double cost_lcb = 0.0;
  double prob_lcb = 0.0;
};

/// Empirical variance of the 0/1 arrival indicator over `round` rounds,
/// in closed form p(1-p) with p = arrivals / round.
double variance(std::int64_t arrivals, Round round);

/// Lower confidence bound on the mean cost; 0 before the first miss.
double cost_lcb(const QueryStats& stats, const EstimatorParams& params);

/// Variance-aware confidence radius on the arrival frequency.
double prob_radius(std::int64_t arrivals, Round round, const EstimatorParams& params);

/// max(0, arrivals/round - prob_radius).
double prob_lcb(const QueryStats& stats, Round round, const EstimatorParams& params);

/// Recomputes both estimates in place.
void refresh(QueryStats& stats, Round round, const EstimatorParams& params);

}  // namespace vsocb
