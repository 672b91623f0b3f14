#include "vsocb/analysis.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "vsocb/knapsack.hpp"

namespace vsocb {

double cache_value(const QueryUniverse& u, const std::vector<QueryId>& ids) {
  double v = 0.0;
  for (const auto id : ids) v += u[id].value();
  return v;
}

double complement_value(const QueryUniverse& u, const std::vector<QueryId>& ids) {
  double v = 0.0;
  auto it = ids.begin();
  for (const auto& q : u.queries) {
    if (it != ids.end() && *it == q.id) {
      ++it;
      continue;
    }
    v += q.value();
  }
  return v;
}

Size cache_bytes(const QueryUniverse& u, const std::vector<QueryId>& ids) {
  Size s = 0;
  for (const auto id : ids) s += u[id].total_size;
  return s;
}

OptimalCache optimal_cache(const QueryUniverse& u) {
  KnapsackInstance inst;
  inst.capacity = u.cache_capacity;
  for (const auto& q : u.queries) inst.add(q.id, q.value(), q.total_size);
  auto sol = solve_exact(inst);
  return OptimalCache{std::move(sol.chosen), sol.total_value};
}

bool is_valid_set(const QueryUniverse& u, const std::vector<QueryId>& ids) {
  const Size used = cache_bytes(u, ids);
  if (used > u.cache_capacity) return false;
  Size min_outside = 0;
  bool any_outside = false;
  for (const auto& q : u.queries) {
    if (std::find(ids.begin(), ids.end(), q.id) != ids.end()) continue;
    min_outside = any_outside ? std::min(min_outside, q.total_size) : q.total_size;
    any_outside = true;
  }
  // With nothing outside, the minimum is +inf and the lower bound holds.
  return !any_outside || u.cache_capacity - min_outside < used;
}

ValidSets enumerate_valid_sets(const QueryUniverse& u) {
  const std::size_t n = u.size();
  if (n > kEnumerationLimit) {
    throw std::invalid_argument("valid-set enumeration is limited to " + std::to_string(kEnumerationLimit) +
                                " queries");
  }
  ValidSets out;
  bool first = true;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    Size used = 0;
    Size min_outside = 0;
    bool any_outside = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Size s = u.queries[i].total_size;
      if (mask & (std::uint32_t{1} << i)) {
        used += s;
      } else {
        min_outside = any_outside ? std::min(min_outside, s) : s;
        any_outside = true;
      }
    }
    if (used > u.cache_capacity || (any_outside && u.cache_capacity - min_outside >= used)) continue;
    std::vector<QueryId> set;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) set.push_back(query_id(static_cast<std::uint32_t>(i)));
    }
    out.l_min = first ? set.size() : std::min(out.l_min, set.size());
    out.l_max = first ? set.size() : std::max(out.l_max, set.size());
    first = false;
    out.sets.push_back(std::move(set));
  }
  out.l_stat = std::min(out.l_max, n - out.l_min);
  return out;
}

namespace {

GapTable per_query_minima(const QueryUniverse& u, const ValidSets& valid, const OptimalCache& optimal,
                          std::vector<double> per_set) {
  GapTable t;
  t.per_query.assign(u.size(), kInfiniteGap);
  for (std::size_t k = 0; k < valid.sets.size(); ++k) {
    const auto& set = valid.sets[k];
    if (set == optimal.ids) continue;
    auto it = set.begin();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto id = query_id(static_cast<std::uint32_t>(i));
      if (it != set.end() && *it == id) {
        ++it;
        continue;
      }
      t.per_query[i] = std::min(t.per_query[i], per_set[k]);
    }
  }
  for (const double g : t.per_query) t.min_gap = std::min(t.min_gap, g);
  t.per_set = std::move(per_set);
  return t;
}

}  // namespace

GapTable complementary_gaps(const QueryUniverse& u, const ValidSets& valid, const OptimalCache& optimal) {
  std::vector<double> per_set;
  per_set.reserve(valid.sets.size());
  for (const auto& set : valid.sets) per_set.push_back(optimal.value - cache_value(u, set));
  return per_query_minima(u, valid, optimal, std::move(per_set));
}

GapTable approximation_gaps(const QueryUniverse& u, const ValidSets& valid, const OptimalCache& optimal,
                            double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  const double optimal_complement = complement_value(u, optimal.ids);
  std::vector<double> per_set;
  per_set.reserve(valid.sets.size());
  for (const auto& set : valid.sets) {
    per_set.push_back(complement_value(u, set) - (1.0 + beta) * optimal_complement);
  }
  return per_query_minima(u, valid, optimal, std::move(per_set));
}

GapReport analyze(const QueryUniverse& u, double beta) {
  GapReport r;
  r.beta = beta;
  r.optimal = optimal_cache(u);
  r.valid = enumerate_valid_sets(u);
  r.gaps = complementary_gaps(u, r.valid, r.optimal);
  r.approx_gaps = approximation_gaps(u, r.valid, r.optimal, beta);
  return r;
}

RegretCurve regret_curves(const std::vector<RoundLog>& logs, const QueryUniverse& u, std::optional<double> beta) {
  const auto optimal = optimal_cache(u);
  std::vector<char> in_optimal(u.size(), 0);
  for (const auto id : optimal.ids) in_optimal[index(id)] = 1;
  const double optimal_complement = complement_value(u, optimal.ids);

  RegretCurve c;
  c.rounds.reserve(logs.size());
  c.realized.reserve(logs.size());
  c.pseudo.reserve(logs.size());
  c.cum_cost.reserve(logs.size());
  double realized = 0.0;
  double pseudo = 0.0;
  double cost = 0.0;
  double beta_regret = 0.0;
  for (const auto& log : logs) {
    const bool served = std::binary_search(log.served.begin(), log.served.end(), log.query);
    realized += log.realized_cost * ((in_optimal[index(log.query)] ? 1.0 : 0.0) - (served ? 1.0 : 0.0));
    pseudo += optimal.value - cache_value(u, log.served);
    cost += log.charged_cost;
    c.rounds.push_back(log.round);
    c.realized.push_back(realized);
    c.pseudo.push_back(pseudo);
    c.cum_cost.push_back(cost);
    if (beta) {
      beta_regret += complement_value(u, log.served) - (1.0 + *beta) * optimal_complement;
      c.beta_regret.push_back(beta_regret);
    }
  }
  return c;
}

}  // namespace vsocb
