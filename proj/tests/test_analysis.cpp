#include <doctest.h>

#include <cmath>
#include <random>

#include "vsocb/analysis.hpp"
#include "vsocb/knapsack.hpp"

using namespace vsocb;

namespace {

QueryUniverse universe(const std::vector<double>& probs, const std::vector<double>& costs,
                       const std::vector<Size>& sizes, Size capacity) {
  QueryUniverse u;
  u.cache_capacity = capacity;
  u.cost_range = {0.0, 2.0};
  for (std::size_t i = 0; i < probs.size(); ++i) {
    QuerySpec q;
    q.id = query_id(static_cast<std::uint32_t>(i));
    q.label = "q" + std::to_string(i + 1);
    q.total_size = sizes[i];
    q.input_size = sizes[i];
    q.answer_size = 0;
    q.true_mean_cost = costs[i];
    q.sample_prob = probs[i];
    u.queries.push_back(q);
  }
  return u;
}

std::vector<QueryId> ids(std::initializer_list<std::uint32_t> xs) {
  std::vector<QueryId> out;
  for (auto x : xs) out.push_back(query_id(x));
  return out;
}

RoundLog log_entry(Round t, QueryId q, double cost, std::vector<QueryId> served) {
  RoundLog l;
  l.round = t;
  l.query = q;
  l.realized_cost = cost;
  l.hit = std::binary_search(served.begin(), served.end(), q);
  l.charged_cost = l.hit ? 0.0 : cost;
  l.served = std::move(served);
  return l;
}

}  // namespace

TEST_CASE("optimal cache examples") {
  const auto all_fit = universe({0.5, 0.3, 0.2}, {1, 1, 1}, {1, 2, 3}, 6);
  CHECK(optimal_cache(all_fit).ids == ids({0, 1, 2}));

  const auto none_fit = universe({0.5, 0.5}, {1, 1}, {3, 4}, 2);
  CHECK(optimal_cache(none_fit).ids.empty());
  CHECK(optimal_cache(none_fit).value == 0.0);

  const auto four = universe({0.4, 0.3, 0.2, 0.1}, {1.0, 1.8, 1.5, 1.9}, {3, 2, 2, 1}, 4);
  KnapsackInstance inst;
  inst.capacity = 4;
  for (const auto& q : four.queries) inst.add(q.id, q.value(), q.total_size);
  const auto brute = solve_brute(inst, Objective::Maximize);
  CHECK(optimal_cache(four).ids == brute.chosen);
  CHECK(optimal_cache(four).value == doctest::Approx(brute.total_value).epsilon(1e-12));
}

TEST_CASE("valid set examples") {
  const auto homogeneous = universe({0.3, 0.2, 0.1}, {1, 1, 1}, {1, 1, 1}, 2);
  const auto v = enumerate_valid_sets(homogeneous);
  CHECK(v.sets == std::vector<std::vector<QueryId>>{ids({0, 1}), ids({0, 2}), ids({1, 2})});
  CHECK(v.l_min == 2);
  CHECK(v.l_max == 2);
  CHECK(v.l_stat == 1);

  const auto uneven = universe({0.5, 0.5}, {1, 1}, {2, 3}, 3);
  CHECK(is_valid_set(uneven, ids({0})));
  CHECK(is_valid_set(uneven, ids({1})));
  CHECK_FALSE(is_valid_set(uneven, ids({0, 1})));
  CHECK_FALSE(is_valid_set(uneven, {}));
  const auto w = enumerate_valid_sets(uneven);
  CHECK(w.sets == std::vector<std::vector<QueryId>>{ids({0}), ids({1})});
  CHECK(w.l_min == 1);
  CHECK(w.l_max == 1);

  const auto roomy = universe({0.5, 0.3, 0.2}, {1, 1, 1}, {1, 2, 3}, 7);
  CHECK(enumerate_valid_sets(roomy).sets == std::vector<std::vector<QueryId>>{ids({0, 1, 2})});
}

TEST_CASE("enumerated sets agree with the predicate") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    std::vector<double> probs(n, 1.0 / static_cast<double>(n));
    std::vector<double> costs(n, 1.0);
    std::vector<Size> sizes(n);
    for (auto& s : sizes) s = std::uniform_int_distribution<Size>(1, 5)(rng);
    const auto u = universe(probs, costs, sizes, std::uniform_int_distribution<Size>(1, 12)(rng));
    const auto v = enumerate_valid_sets(u);
    std::size_t count = 0;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      std::vector<QueryId> set;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (mask & (1U << i)) set.push_back(query_id(i));
      }
      count += is_valid_set(u, set) ? 1 : 0;
    }
    CHECK(v.sets.size() == count);
    for (const auto& s : v.sets) CHECK(is_valid_set(u, s));
  }
}

TEST_CASE("complementary gap table") {
  const auto u = universe({0.3, 0.2, 0.1}, {1, 1, 1}, {1, 1, 1}, 2);
  const auto r = analyze(u, 0.0);
  CHECK(r.optimal.ids == ids({0, 1}));
  REQUIRE(r.gaps.per_set.size() == 3);
  CHECK(r.gaps.per_set[0] == 0.0);
  CHECK(r.gaps.per_set[1] == doctest::Approx(0.1).epsilon(1e-12));  // {1,3}
  CHECK(r.gaps.per_set[2] == doctest::Approx(0.2).epsilon(1e-12));  // {2,3}
  // Competitors excluding q1: {2,3}. Excluding q2: {1,3}. None excludes q3.
  CHECK(r.gaps.per_query[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.gaps.per_query[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::isinf(r.gaps.per_query[2]));
  CHECK(r.gaps.min_gap == doctest::Approx(0.1).epsilon(1e-12));

  // The minimum gap is the smallest nonzero per-set gap.
  double smallest = kInfiniteGap;
  for (double g : r.gaps.per_set) {
    if (g > 0.0) smallest = std::min(smallest, g);
  }
  CHECK(r.gaps.min_gap == smallest);
}

TEST_CASE("a unique valid set has infinite gaps") {
  const auto u = universe({0.5, 0.3, 0.2}, {1, 1, 1}, {1, 2, 3}, 10);
  const auto r = analyze(u, 0.0);
  for (double g : r.gaps.per_query) CHECK(std::isinf(g));
  CHECK(std::isinf(r.gaps.min_gap));
}

TEST_CASE("approximation gaps") {
  // Dyadic values make every sum exact, so the identity holds bit for bit.
  const auto u = universe({0.5, 0.25, 0.125, 0.125}, {1.5, 1.25, 1.75, 1.0}, {2, 1, 1, 2}, 3);
  const auto r = analyze(u, 0.0);
  REQUIRE(r.gaps.per_set.size() == r.approx_gaps.per_set.size());
  for (std::size_t k = 0; k < r.gaps.per_set.size(); ++k) CHECK(r.approx_gaps.per_set[k] == r.gaps.per_set[k]);

  // Independent summation of one entry.
  const double full = 0.5 * 1.5 + 0.25 * 1.25 + 0.125 * 1.75 + 0.125 * 1.0;
  const double beta = 0.5;
  const auto approx = approximation_gaps(u, r.valid, r.optimal, beta);
  for (std::size_t k = 0; k < r.valid.sets.size(); ++k) {
    const double expected = (full - cache_value(u, r.valid.sets[k])) - 1.5 * (full - r.optimal.value);
    CHECK(approx.per_set[k] == doctest::Approx(expected).epsilon(1e-12));
  }

  const auto huge = approximation_gaps(u, r.valid, r.optimal, 100.0);
  CHECK(huge.min_gap < 0.0);
  CHECK_THROWS(approximation_gaps(u, r.valid, r.optimal, -0.1));
}

TEST_CASE("the optimal cache dominates every valid set") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 9)(rng);
    std::vector<double> probs(n);
    std::vector<double> costs(n);
    std::vector<Size> sizes(n);
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
      costs[i] = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
      sizes[i] = std::uniform_int_distribution<Size>(1, 5)(rng);
    }
    const auto u = universe(probs, costs, sizes, std::uniform_int_distribution<Size>(1, 15)(rng));
    const auto r = analyze(u, 0.0);
    for (double g : r.gaps.per_set) CHECK(g >= -1e-12);
    CHECK(r.valid.l_min <= r.valid.l_max);
  }
}

TEST_CASE("regret curve examples") {
  const auto u = universe({0.5, 0.3, 0.2}, {1.0, 1.5, 2.0}, {1, 1, 1}, 2);
  const auto opt = optimal_cache(u);

  SUBCASE("serving the optimal cache accrues no regret") {
    std::vector<RoundLog> logs;
    for (Round t = 1; t <= 50; ++t) logs.push_back(log_entry(t, query_id(t % 3), 1.25, opt.ids));
    const auto c = regret_curves(logs, u);
    for (std::size_t i = 0; i < logs.size(); ++i) {
      CHECK(c.pseudo[i] == 0.0);
      CHECK(c.realized[i] == 0.0);
    }
  }

  SUBCASE("an empty cache accrues the full value each round") {
    const auto roomy = universe({0.5, 0.3, 0.2}, {1.0, 1.5, 2.0}, {1, 1, 1}, 3);
    std::vector<RoundLog> logs;
    for (Round t = 1; t <= 40; ++t) logs.push_back(log_entry(t, query_id(t % 3), 1.0, {}));
    const auto c = regret_curves(logs, roomy);
    const double total = 0.5 * 1.0 + 0.3 * 1.5 + 0.2 * 2.0;
    CHECK(c.pseudo.back() == doctest::Approx(40.0 * total).epsilon(1e-12));
  }

  SUBCASE("scripted run matches an independent recomputation") {
    std::mt19937_64 rng(100);
    const std::vector<std::vector<QueryId>> candidates{{}, ids({0}), ids({1}), ids({0, 1}), ids({0, 2}), ids({1, 2})};
    std::vector<RoundLog> logs;
    for (Round t = 1; t <= 100; ++t) {
      const auto q = query_id(static_cast<std::uint32_t>(std::uniform_int_distribution<int>(0, 2)(rng)));
      const double cost = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
      logs.push_back(log_entry(t, q, cost, candidates[std::uniform_int_distribution<std::size_t>(0, 5)(rng)]));
    }
    const auto c = regret_curves(logs, u, 0.0);
    REQUIRE(c.rounds.size() == 100);

    // Per-query values spelled out: 0.5, 0.45, 0.4; the optimal pair is {q1, q2}.
    const double v[3] = {0.5, 0.45, 0.4};
    double realized = 0.0;
    double pseudo = 0.0;
    double cost = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const auto& l = logs[i];
      double served_value = 0.0;
      bool served_q = false;
      for (auto id : l.served) {
        served_value += v[index(id)];
        served_q |= id == l.query;
      }
      pseudo += 0.95 - served_value;
      const double opt_cost = index(l.query) == 2 ? l.realized_cost : 0.0;
      const double our_cost = served_q ? 0.0 : l.realized_cost;
      realized += our_cost - opt_cost;
      cost += our_cost;
      CHECK(c.pseudo[i] == doctest::Approx(pseudo).epsilon(1e-12));
      CHECK(c.realized[i] == doctest::Approx(realized).epsilon(1e-12));
      CHECK(c.cum_cost[i] == doctest::Approx(cost).epsilon(1e-12));
      CHECK(c.beta_regret[i] == doctest::Approx(pseudo).epsilon(1e-9));
    }
  }
}
