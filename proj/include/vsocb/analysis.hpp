#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "vsocb/types.hpp"
#include "vsocb/workload.hpp"

namespace vsocb {

inline constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

/// Sum of P(q) * C*(q) over `ids`.
double cache_value(const QueryUniverse& universe, const std::vector<QueryId>& ids);
/// Sum of P(q) * C*(q) over queries not in `ids` (ids ascending).
double complement_value(const QueryUniverse& universe, const std::vector<QueryId>& ids);
Size cache_bytes(const QueryUniverse& universe, const std::vector<QueryId>& ids);

struct OptimalCache {
  std::vector<QueryId> ids;  // ascending
  double value = 0.0;
};

/// Exact knapsack over the true values.
OptimalCache optimal_cache(const QueryUniverse& universe);

inline constexpr std::size_t kEnumerationLimit = 20;

/// Feasible caches that cannot take any further uncached query.
struct ValidSets {
  std::vector<std::vector<QueryId>> sets;  // each ascending; masks in increasing order
  std::size_t l_min = 0;
  std::size_t l_max = 0;
  std::size_t l_stat = 0;  // min(l_max, N - l_min)
};

bool is_valid_set(const QueryUniverse& universe, const std::vector<QueryId>& ids);
ValidSets enumerate_valid_sets(const QueryUniverse& universe);

struct GapTable {
  std::vector<double> per_set;    // aligned with ValidSets::sets
  std::vector<double> per_query;  // +inf when no competing valid set excludes q
  double min_gap = kInfiniteGap;  // min finite per_query value
};

GapTable complementary_gaps(const QueryUniverse& universe, const ValidSets& valid, const OptimalCache& optimal);
GapTable approximation_gaps(const QueryUniverse& universe, const ValidSets& valid, const OptimalCache& optimal,
                            double beta);

struct GapReport {
  ValidSets valid;
  OptimalCache optimal;
  GapTable gaps;
  GapTable approx_gaps;
  double beta = 0.0;
};

GapReport analyze(const QueryUniverse& universe, double beta);

/// One simulated round. `served` is the cache the arrival was checked
/// against; it is kept for regret accounting and not written to CSV.
struct RoundLog {
  Round round = 0;
  QueryId query{};
  bool hit = false;
  double charged_cost = 0.0;
  double realized_cost = 0.0;
  bool oracle_called = false;
  Size cache_bytes_used = 0;
  double cum_cost = 0.0;
  double cum_pseudo_regret = 0.0;
  double cum_realized_regret = 0.0;
  std::vector<QueryId> served;
};

struct RegretCurve {
  std::vector<Round> rounds;
  std::vector<double> realized;
  std::vector<double> pseudo;
  std::vector<double> cum_cost;
  std::vector<double> beta_regret;  // empty unless beta was given
};

RegretCurve regret_curves(const std::vector<RoundLog>& logs, const QueryUniverse& universe,
                          std::optional<double> beta = std::nullopt);

}  // namespace vsocb
