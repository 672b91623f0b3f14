#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "vsocb/estimator.hpp"

using namespace vsocb;

namespace {

EstimatorParams small_params() {
  EstimatorParams p;
  p.horizon = 100;
  p.n_queries = 10;
  p.delta = 0.01;
  p.cost_range = {1.0, 2.0};
  return p;
}

EstimatorParams synthetic_params() {
  EstimatorParams p;
  p.horizon = 20000;
  p.n_queries = 100;
  p.delta = 1.0 / 20000.0;
  p.cost_range = {1.0, 2.0};
  return p;
}

QueryStats with_costs(double cum_cost, std::int64_t misses) {
  QueryStats s;
  s.cum_cost = cum_cost;
  s.misses = misses;
  s.arrivals = misses;
  return s;
}

QueryStats with_arrivals(std::int64_t arrivals) {
  QueryStats s;
  s.arrivals = arrivals;
  return s;
}

double definitional_variance(const std::vector<int>& xs) {
  double mean = 0.0;
  for (int x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (int x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("variance examples") {
  CHECK(variance(0, 10) == 0.0);
  CHECK(variance(10, 10) == 0.0);
  CHECK(variance(200, 1000) == doctest::Approx(0.16).epsilon(1e-14));
  CHECK_THROWS(variance(1, 0));
  CHECK_THROWS(variance(11, 10));
  CHECK_THROWS(variance(-1, 10));
}

TEST_CASE("variance equals the definitional sum of squares") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 3000)(rng);
    const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::bernoulli_distribution coin(p);
    std::vector<int> xs(len);
    std::int64_t ones = 0;
    for (auto& x : xs) {
      x = coin(rng) ? 1 : 0;
      ones += x;
    }
    CHECK(std::abs(variance(ones, static_cast<Round>(len)) - definitional_variance(xs)) <= 1e-12);
  }
}

TEST_CASE("cost_lcb examples") {
  const auto p = small_params();
  CHECK(cost_lcb(QueryStats{}, p) == 0.0);
  // 1 - sqrt(ln(800000)/20), evaluated at 30 digits.
  CHECK(cost_lcb(with_costs(10.0, 10), p) == doctest::Approx(0.175610316456772236).epsilon(1e-12));
  CHECK(cost_lcb(with_costs(0.5, 1), p) == 0.0);
  CHECK(p.cost_log_term() == doctest::Approx(std::log(800000.0)).epsilon(1e-15));
}

TEST_CASE("prob_lcb examples") {
  const auto p = synthetic_params();
  CHECK(prob_lcb(with_arrivals(0), 1, p) == 0.0);
  CHECK(prob_lcb(with_arrivals(0), 5000, p) == 0.0);
  CHECK(p.prob_log_term() == doctest::Approx(27.18473401330012869).epsilon(1e-14));
  CHECK(prob_radius(200, 1000, p) == doctest::Approx(0.25015445543710055).epsilon(1e-12));
  CHECK(prob_lcb(with_arrivals(200), 1000, p) == 0.0);
  CHECK(prob_radius(4000, 20000, p) == doctest::Approx(0.03233896362451002).epsilon(1e-12));
  CHECK(prob_lcb(with_arrivals(4000), 20000, p) == doctest::Approx(0.16766103637548998).epsilon(1e-12));
}

TEST_CASE("estimates are one-sided and bounded") {
  std::mt19937_64 rng(8);
  const auto p = small_params();
  const auto q = synthetic_params();
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t misses = std::uniform_int_distribution<std::int64_t>(1, 5000)(rng);
    const double mean = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
    const auto s = with_costs(mean * static_cast<double>(misses), misses);
    const double c = cost_lcb(s, p);
    CHECK(c >= 0.0);
    CHECK(c <= s.cum_cost / static_cast<double>(s.misses));

    const Round round = std::uniform_int_distribution<Round>(1, 20000)(rng);
    const std::int64_t arrivals = std::uniform_int_distribution<std::int64_t>(0, round)(rng);
    const double pr = prob_lcb(with_arrivals(arrivals), round, q);
    CHECK(pr >= 0.0);
    CHECK(pr <= 1.0);
    CHECK(pr <= static_cast<double>(arrivals) / static_cast<double>(round));
  }
}

TEST_CASE("confidence radii shrink with more information") {
  const auto p = small_params();
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 1; n <= 2000; ++n) {
    // cost radius = empirical mean - lcb before clamping; use a mean above any radius.
    const double mean = 1e6;
    const double radius = mean - cost_lcb(with_costs(mean * static_cast<double>(n), n), p);
    CHECK(radius < prev);
    prev = radius;
  }
  const auto q = synthetic_params();
  double prev_p = std::numeric_limits<double>::infinity();
  for (Round t = 10; t <= 20000; t += 10) {
    const double r = prob_radius(t / 5, t, q);  // fixed p-hat 0.2
    CHECK(r <= prev_p);
    prev_p = r;
  }
}

TEST_CASE("refresh writes both estimates") {
  const auto p = synthetic_params();
  auto s = with_arrivals(4000);
  s.misses = 40;
  s.cum_cost = 60.0;
  refresh(s, 20000, p);
  CHECK(s.prob_lcb == prob_lcb(s, 20000, p));
  CHECK(s.cost_lcb == cost_lcb(s, p));
}

TEST_CASE("estimator params validation") {
  auto p = small_params();
  CHECK_NOTHROW(p.validate());
  p.delta = 0.0;
  CHECK_THROWS(p.validate());
  p.delta = 1.5;
  CHECK_THROWS(p.validate());
  p = small_params();
  p.horizon = 0;
  CHECK_THROWS(p.validate());
  p = small_params();
  p.n_queries = 0;
  CHECK_THROWS(p.validate());
}
