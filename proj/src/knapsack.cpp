#include "vsocb/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

namespace vsocb {

namespace {

KnapsackSolution collect(const KnapsackInstance& inst, const std::vector<char>& take) {
  KnapsackSolution s;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (!take[i]) continue;
    s.chosen.push_back(inst.item_ids[i]);
    s.total_value += inst.values[i];
    s.total_weight += inst.weights[i];
  }
  return s;
}

}  // namespace

void KnapsackInstance::validate() const {
  if (values.size() != item_ids.size() || weights.size() != item_ids.size()) {
    throw std::invalid_argument("knapsack instance has mismatched lengths");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (weights[i] < 1) throw std::invalid_argument("knapsack weights must be >= 1");
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("knapsack values must be finite and non-negative");
    }
  }
}

KnapsackSolution solve_exact(const KnapsackInstance& inst) {
  inst.validate();
  if (inst.capacity < 0) throw std::invalid_argument("knapsack capacity must be non-negative");
  const std::size_t n = inst.size();
  const auto cap = static_cast<std::size_t>(inst.capacity);
  const std::size_t width = cap + 1;

  // best[i][c]: best value using items i..n-1 with capacity c. Filling from
  // the back lets the forward reconstruction decide item 0 first.
  std::vector<double> best((n + 1) * width, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const double* next = &best[(i + 1) * width];
    double* row = &best[i * width];
    const auto w = static_cast<std::size_t>(inst.weights[i]);
    for (std::size_t c = 0; c <= cap; ++c) {
      double v = next[c];
      if (w <= c) v = std::max(v, inst.values[i] + next[c - w]);
      row[c] = v;
    }
  }

  std::vector<char> take(n, 0);
  std::size_t c = cap;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = static_cast<std::size_t>(inst.weights[i]);
    if (w <= c && inst.values[i] + best[(i + 1) * width + c - w] == best[i * width + c]) {
      take[i] = 1;
      c -= w;
    }
  }
  return collect(inst, take);
}

KnapsackSolution solve_brute(const KnapsackInstance& inst, Objective objective) {
  inst.validate();
  const std::size_t n = inst.size();
  if (n > kBruteForceLimit) {
    throw std::invalid_argument("brute force is limited to " + std::to_string(kBruteForceLimit) + " items");
  }
  const bool maximize = objective == Objective::Maximize;
  if (maximize && inst.capacity < 0) throw std::invalid_argument("knapsack capacity must be non-negative");

  bool found = false;
  std::uint32_t best_mask = 0;
  double best_value = 0.0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    double value = 0.0;
    Size weight = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) {
        value += inst.values[i];
        weight += inst.weights[i];
      }
    }
    if (maximize ? weight > inst.capacity : weight < inst.capacity) continue;
    bool better = !found || (maximize ? value > best_value : value < best_value);
    if (found && value == best_value) {
      // The lowest differing index decides: included for the max problem,
      // excluded for the min problem.
      const std::uint32_t diff = mask ^ best_mask;
      const bool includes_lowest = (mask & (diff & (~diff + 1))) != 0;
      better = diff != 0 && includes_lowest == maximize;
    }
    if (better) {
      found = true;
      best_mask = mask;
      best_value = value;
    }
  }
  if (!found) throw InfeasibleError("no subset covers demand " + std::to_string(inst.capacity));

  std::vector<char> take(n, 0);
  for (std::size_t i = 0; i < n; ++i) take[i] = (best_mask >> i) & 1U;
  return collect(inst, take);
}

KnapsackSolution solve_min_knapsack(const KnapsackInstance& inst) {
  inst.validate();
  const std::size_t n = inst.size();
  const Size demand = inst.capacity;
  if (demand <= 0) return {};
  const Size total = std::accumulate(inst.weights.begin(), inst.weights.end(), Size{0});
  if (total < demand) {
    throw InfeasibleError("min-knapsack demand " + std::to_string(demand) + " exceeds total weight " +
                          std::to_string(total));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Ascending density; equal densities take the higher index first so the
  // complement keeps low-index items.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double lhs = inst.values[a] * static_cast<double>(inst.weights[b]);
    const double rhs = inst.values[b] * static_cast<double>(inst.weights[a]);
    return lhs < rhs || (lhs == rhs && a > b);
  });

  std::vector<char> best_take;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<char> prefix(n, 0);
  double prefix_value = 0.0;
  Size prefix_weight = 0;

  for (std::size_t k = 0; k <= n; ++k) {
    const Size residual = demand - prefix_weight;
    if (residual <= 0) {
      if (prefix_value < best_value) {
        best_value = prefix_value;
        best_take = prefix;
      }
      break;
    }
    // cheapest single completion outside the prefix
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (prefix[i] || inst.weights[i] < residual) continue;
      if (pick == n || inst.values[i] <= inst.values[pick]) pick = i;
    }
    if (pick != n && prefix_value + inst.values[pick] < best_value) {
      best_value = prefix_value + inst.values[pick];
      best_take = prefix;
      best_take[pick] = 1;
    }
    if (k == n) break;
    const std::size_t next = order[k];
    prefix[next] = 1;
    prefix_value += inst.values[next];
    prefix_weight += inst.weights[next];
  }

  // Drop items that are not needed for coverage, most valuable first.
  Size weight = 0;
  for (std::size_t i = 0; i < n; ++i) weight += best_take[i] ? inst.weights[i] : 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (best_take[*it] && weight - inst.weights[*it] >= demand) {
      best_take[*it] = 0;
      weight -= inst.weights[*it];
    }
  }
  return collect(inst, best_take);
}

KnapsackInstance oracle_instance(std::span<const OracleInput> seen, Size capacity) {
  KnapsackInstance inst;
  inst.capacity = capacity;
  inst.item_ids.reserve(seen.size());
  inst.values.reserve(seen.size());
  inst.weights.reserve(seen.size());
  for (const auto& q : seen) inst.add(q.id, q.value(), q.size);
  return inst;
}

std::vector<QueryId> oracle_exact(std::span<const OracleInput> seen, Size capacity) {
  return solve_exact(oracle_instance(seen, capacity)).chosen;
}

ApproxOracleSplit oracle_approx_split(std::span<const OracleInput> seen, Size capacity) {
  auto inst = oracle_instance(seen, capacity);
  const Size total = std::accumulate(inst.weights.begin(), inst.weights.end(), Size{0});
  ApproxOracleSplit out;
  out.demand = std::max<Size>(0, total - capacity);
  inst.capacity = out.demand;
  const auto evict = solve_min_knapsack(inst);

  std::vector<char> evicted(seen.size(), 0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < seen.size() && j < evict.chosen.size(); ++i) {
    if (seen[i].id == evict.chosen[j]) {
      evicted[i] = 1;
      ++j;
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    (evicted[i] ? out.evicted : out.kept).push_back(seen[i].id);
  }
  return out;
}

std::vector<QueryId> oracle_approx(std::span<const OracleInput> seen, Size capacity) {
  return oracle_approx_split(seen, capacity).kept;
}

}  // namespace vsocb
