#include "vsocb/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsocb {

void EstimatorParams::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (n_queries < 1) throw ConfigError("n_queries must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(cost_range.hi > cost_range.lo)) throw ConfigError("cost range must satisfy c2 > c1");
}

double EstimatorParams::cost_log_term() const {
  return std::log(8.0 * static_cast<double>(horizon) * static_cast<double>(n_queries) / delta);
}

double EstimatorParams::prob_log_term() const {
  return std::log(16.0 * static_cast<double>(horizon) * static_cast<double>(n_queries) / delta);
}

double variance(std::int64_t arrivals, Round round) {
  if (round < 1) throw std::invalid_argument("round must be >= 1");
  if (arrivals < 0 || arrivals > round) throw std::invalid_argument("arrivals must lie in [0, round]");
  const double p = static_cast<double>(arrivals) / static_cast<double>(round);
  return p * (1.0 - p);
}

double cost_lcb(const QueryStats& stats, const EstimatorParams& params) {
  if (stats.misses == 0) return 0.0;
  const double n = static_cast<double>(stats.misses);
  const double radius = params.cost_range.width() * std::sqrt(params.cost_log_term() / (2.0 * n));
  return std::max(0.0, stats.cum_cost / n - radius);
}

double prob_radius(std::int64_t arrivals, Round round, const EstimatorParams& params) {
  const double t = static_cast<double>(round);
  const double log_term = params.prob_log_term();
  return std::sqrt(3.0 * variance(arrivals, round) * log_term / t) + 5.0 * log_term / t;
}

double prob_lcb(const QueryStats& stats, Round round, const EstimatorParams& params) {
  if (round < 1) throw std::invalid_argument("round must be >= 1");
  const double freq = static_cast<double>(stats.arrivals) / static_cast<double>(round);
  return std::max(0.0, freq - prob_radius(stats.arrivals, round, params));
}

void refresh(QueryStats& stats, Round round, const EstimatorParams& params) {
  stats.cost_lcb = cost_lcb(stats, params);
  stats.prob_lcb = prob_lcb(stats, round, params);
}

}  // namespace vsocb
