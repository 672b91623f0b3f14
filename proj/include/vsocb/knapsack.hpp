#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vsocb/types.hpp"

namespace vsocb {

/// Value/weight/capacity triple. For the min problem `capacity` is the
/// demand that the chosen weights must cover.
struct KnapsackInstance {
  std::vector<QueryId> item_ids;
  std::vector<double> values;
  std::vector<Size> weights;
  Size capacity = 0;

  std::size_t size() const { return item_ids.size(); }
  void add(QueryId id, double value, Size weight) {
    item_ids.push_back(id);
    values.push_back(value);
    weights.push_back(weight);
  }
  // Throws std::invalid_argument on mismatched lengths, weights < 1,
  // negative or non-finite values.
  void validate() const;
};

struct KnapsackSolution {
  std::vector<QueryId> chosen;  // in instance order
  double total_value = 0.0;
  Size total_weight = 0;
};

enum class Objective { Maximize, Minimize };

// Tie-breaking follows item order. Max solvers prefer including lower-index
// items (lexicographically greatest inclusion vector), so zero-valued items
// fill leftover capacity in index order. Min solvers prefer the mirror image,
// leaving low-index items in the complement.

/// Max-value subset with weight <= capacity. DP over the capacity axis.
KnapsackSolution solve_exact(const KnapsackInstance& instance);

inline constexpr std::size_t kBruteForceLimit = 20;

/// Exhaustive enumeration; test oracle. Rejects more than 20 items.
/// Minimize: min-value subset with weight >= capacity (the demand); throws
/// InfeasibleError when no subset covers it.
KnapsackSolution solve_brute(const KnapsackInstance& instance, Objective objective);

/// Heuristic min-knapsack: for every density-sorted prefix that does not yet
/// cover the demand, complete it with the cheapest single item that does,
/// keep the cheapest candidate, then drop redundant items. The k = 0 prefix
/// is the best single feasible item.
KnapsackSolution solve_min_knapsack(const KnapsackInstance& instance);

/// Learner-side view of one seen query handed to an oracle.
struct OracleInput {
  QueryId id{};
  double cost = 0.0;  // cost estimate
  double prob = 0.0;  // probability estimate
  Size size = 1;

  double value() const { return prob * cost; }
};

using Oracle = std::function<std::vector<QueryId>(std::span<const OracleInput>, Size)>;

KnapsackInstance oracle_instance(std::span<const OracleInput> seen, Size capacity);

/// Exact oracle: knapsack over values prob*cost, weights size.
std::vector<QueryId> oracle_exact(std::span<const OracleInput> seen, Size capacity);

struct ApproxOracleSplit {
  std::vector<QueryId> kept;     // recommended cache
  std::vector<QueryId> evicted;  // min-knapsack solution
  Size demand = 0;
};

/// Approximate oracle: solves the complementary min-knapsack with demand
/// sum(size) - capacity (clamped at 0) and keeps the complement.
ApproxOracleSplit oracle_approx_split(std::span<const OracleInput> seen, Size capacity);
std::vector<QueryId> oracle_approx(std::span<const OracleInput> seen, Size capacity);

}  // namespace vsocb
