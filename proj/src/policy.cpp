#include "vsocb/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace vsocb {

namespace {

// Ids in `after` but not `before`, and vice versa. Both ascending.
void diff_sets(const std::vector<QueryId>& before, const std::vector<QueryId>& after, PolicyDecision& d) {
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(d.admitted));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(d.evicted));
}

}  // namespace

CacheStore::CacheStore(std::size_t n_queries) : answers_(n_queries), sizes_(n_queries, 0) {}

void CacheStore::insert(QueryId id, Size size, Round answer_round) {
  auto& slot = answers_[index(id)];
  if (slot) return;
  slot = answer_round;
  sizes_[index(id)] = size;
  used_ += size;
  ++count_;
}

void CacheStore::erase(QueryId id) {
  auto& slot = answers_[index(id)];
  if (!slot) return;
  slot.reset();
  used_ -= sizes_[index(id)];
  --count_;
}

void CacheStore::clear() {
  std::fill(answers_.begin(), answers_.end(), std::nullopt);
  used_ = 0;
  count_ = 0;
}

std::vector<QueryId> CacheStore::ids() const {
  std::vector<QueryId> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < answers_.size(); ++i) {
    if (answers_[i]) out.push_back(query_id(static_cast<std::uint32_t>(i)));
  }
  return out;
}

PolicyKind parse_policy_kind(std::string_view text) {
  if (text == "vsocb") return PolicyKind::Vsocb;
  if (text == "vsocb-apx") return PolicyKind::VsocbApprox;
  if (text == "baseline") return PolicyKind::Baseline;
  if (text == "offline") return PolicyKind::Offline;
  throw ConfigError("unknown policy: " + std::string(text));
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Vsocb: return "vsocb";
    case PolicyKind::VsocbApprox: return "vsocb-apx";
    case PolicyKind::Baseline: return "baseline";
    case PolicyKind::Offline: return "offline";
  }
  return "?";
}

// ---------------------------------------------------------------------------

CachePolicy::CachePolicy(std::size_t n_queries, Size capacity, EstimatorParams params)
    : cache_(n_queries), stats_(n_queries), seen_flag_(n_queries, 0), capacity_(capacity), params_(params) {
  if (capacity < 1) throw ConfigError("cache capacity must be positive");
  params_.validate();
}

bool CachePolicy::observe(const ArrivalEvent& a) {
  if (a.round != round_ + 1) {
    throw std::invalid_argument("arrival round " + std::to_string(a.round) + " does not follow round " +
                                std::to_string(round_));
  }
  if (index(a.query) >= stats_.size()) throw std::out_of_range("arrival query id out of range");
  round_ = a.round;

  if (!seen_flag_[index(a.query)]) {
    seen_flag_[index(a.query)] = 1;
    seen_.push_back(a.query);
  }
  auto& st = stats_[index(a.query)];
  ++st.arrivals;
  const bool hit = cache_.contains(a.query);
  if (!hit) {
    st.cum_cost += a.realized_cost;
    ++st.misses;
    st.size = a.input_size + a.answer_size;
  }
  return hit;
}

void CachePolicy::refresh_estimates() {
  for (const auto id : seen_) refresh(stats_[index(id)], round_, params_);
}

double CachePolicy::arrival_density(QueryId id) const {
  const auto& st = stats_[index(id)];
  return static_cast<double>(st.arrivals) / static_cast<double>(st.size.value_or(1));
}

std::vector<OracleInput> CachePolicy::oracle_inputs() const {
  std::vector<OracleInput> in;
  in.reserve(seen_.size());
  for (const auto id : seen_) {
    const auto& st = stats_[index(id)];
    in.push_back(OracleInput{id, st.cost_lcb, st.prob_lcb, st.size.value()});
  }
  // Oracles break value ties by item order. Most LCB values are exactly zero
  // until a query has been observed often, so order items by observed
  // arrivals per unit size, then by first arrival.
  std::stable_sort(in.begin(), in.end(), [&](const OracleInput& a, const OracleInput& b) {
    return arrival_density(a.id) > arrival_density(b.id);
  });
  return in;
}

std::vector<QueryId> CachePolicy::call_oracle(const Oracle& oracle) {
  ++oracle_calls_;
  const auto in = oracle_inputs();
  auto out = oracle(in, capacity_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  Size used = 0;
  for (const auto id : out) {
    if (index(id) >= stats_.size() || !seen_flag_[index(id)]) {
      throw std::logic_error("oracle returned an unseen query");
    }
    used += *stats_[index(id)].size;
  }
  if (used > capacity_) {
    throw std::logic_error("oracle returned a set of size " + std::to_string(used) + " over capacity " +
                           std::to_string(capacity_));
  }
  return out;
}

void CachePolicy::check_invariants() const {
  if (cache_.bytes_used() > capacity_) throw std::logic_error("cache over capacity");
  Size used = 0;
  for (const auto id : cache_.ids()) {
    if (!is_seen(id)) throw std::logic_error("cached query was never seen");
    if (!cache_.answer_round(id) || *cache_.answer_round(id) > round_) {
      throw std::logic_error("cached query lacks a valid answer");
    }
    used += cache_.size_of(id);
  }
  if (used != cache_.bytes_used()) throw std::logic_error("cache byte accounting drifted");
  for (const auto id : seen_) {
    const auto& st = stats_[index(id)];
    if (!(0 <= st.misses_at_last_oracle && st.misses_at_last_oracle <= st.misses && st.misses <= st.arrivals)) {
      throw std::logic_error("query counters out of order");
    }
    const double m = static_cast<double>(st.misses);
    const double slack = 1e-9 * (1.0 + st.cum_cost);
    if (st.cum_cost < params_.cost_range.lo * m - slack || st.cum_cost > params_.cost_range.hi * m + slack) {
      throw std::logic_error("cumulative cost outside [c1*misses, c2*misses]");
    }
    if (st.cost_lcb < 0.0 || st.prob_lcb < 0.0 || st.prob_lcb > 1.0) {
      throw std::logic_error("estimate out of range");
    }
  }
}

// ---------------------------------------------------------------------------

VsocbPolicy::VsocbPolicy(std::size_t n_queries, Size capacity, EstimatorParams params, double alpha,
                         Oracle oracle, PolicyKind kind)
    : CachePolicy(n_queries, capacity, params),
      alpha_(alpha),
      oracle_(std::move(oracle)),
      kind_(kind),
      recommended_(n_queries, 0) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
}

bool VsocbPolicy::should_invoke_oracle(QueryId id, Round round) const {
  const auto& st = stats_[index(id)];
  const double factor = 1.0 + alpha_;
  return static_cast<double>(st.misses) >= factor * static_cast<double>(st.misses_at_last_oracle) ||
         static_cast<double>(round) >= factor * static_cast<double>(last_oracle_round_);
}

std::vector<QueryId> VsocbPolicy::recommended() const {
  std::vector<QueryId> out;
  for (std::size_t i = 0; i < recommended_.size(); ++i) {
    if (recommended_[i]) out.push_back(query_id(static_cast<std::uint32_t>(i)));
  }
  return out;
}

void VsocbPolicy::set_recommended(const std::vector<QueryId>& ids) {
  std::fill(recommended_.begin(), recommended_.end(), 0);
  recommended_used_ = 0;
  for (const auto id : ids) {
    recommended_[index(id)] = 1;
    recommended_used_ += *stats_[index(id)].size;
  }
}

PolicyDecision VsocbPolicy::step(const ArrivalEvent& arrival) {
  const auto before = cache_.ids();
  PolicyDecision d;
  const QueryId q = arrival.query;
  d.hit = observe(arrival);
  refresh_estimates();

  // Fill: admit the arrival when it is recommended or still fits the
  // recommended cache. On a miss its answer was produced this round.
  const Size size = *stats_[index(q)].size;
  if (recommended_contains(q) || size <= capacity_ - recommended_used_) {
    if (!recommended_contains(q)) {
      recommended_[index(q)] = 1;
      recommended_used_ += size;
    }
    cache_.insert(q, size, round_);
  }

  if (should_invoke_oracle(q, round_)) {
    auto& st = stats_[index(q)];
    st.misses_at_last_oracle = st.misses;
    last_oracle_round_ = round_;
    const auto rec = call_oracle(oracle_);
    set_recommended(rec);
    // Keep only cached entries that are still recommended.
    for (const auto id : cache_.ids()) {
      if (!recommended_contains(id)) cache_.erase(id);
    }
    d.oracle_called = true;
  }

  diff_sets(before, cache_.ids(), d);
  return d;
}

void VsocbPolicy::check_invariants() const {
  CachePolicy::check_invariants();
  if (recommended_used_ > capacity_) throw std::logic_error("recommended cache over capacity");
  Size used = 0;
  for (const auto id : recommended()) {
    if (!is_seen(id)) throw std::logic_error("recommended query was never seen");
    used += *stats_[index(id)].size;
  }
  if (used != recommended_used_) throw std::logic_error("recommended byte accounting drifted");
  for (const auto id : cache_.ids()) {
    if (!recommended_contains(id)) throw std::logic_error("cached query is not recommended");
  }
}

// ---------------------------------------------------------------------------

BaselinePolicy::BaselinePolicy(std::size_t n_queries, Size capacity, EstimatorParams params)
    : CachePolicy(n_queries, capacity, params) {}

double BaselinePolicy::score(QueryId id) const {
  const auto& st = stats_[index(id)];
  return st.prob_lcb * st.cost_lcb / static_cast<double>(st.size.value_or(1));
}

PolicyDecision BaselinePolicy::step(const ArrivalEvent& arrival) {
  PolicyDecision d;
  const QueryId q = arrival.query;
  d.hit = observe(arrival);
  refresh_estimates();
  if (d.hit) return d;

  const Size size = *stats_[index(q)].size;
  if (size > capacity_) return d;
  Size free = capacity_ - cache_.bytes_used();
  if (size > free) {
    const double incoming = score(q);
    auto cached = cache_.ids();
    std::stable_sort(cached.begin(), cached.end(),
                     [&](QueryId a, QueryId b) { return score(a) < score(b); });
    std::vector<QueryId> victims;
    for (const auto id : cached) {
      if (free >= size || !(score(id) < incoming)) break;
      victims.push_back(id);
      free += cache_.size_of(id);
    }
    if (free < size) return d;
    for (const auto id : victims) cache_.erase(id);
    std::sort(victims.begin(), victims.end());
    d.evicted = std::move(victims);
  }
  cache_.insert(q, size, round_);
  d.admitted.push_back(q);
  return d;
}

// ---------------------------------------------------------------------------

OfflinePolicy::OfflinePolicy(std::size_t n_queries, Size capacity, EstimatorParams params, Oracle oracle)
    : CachePolicy(n_queries, capacity, params), oracle_(std::move(oracle)) {}

PolicyDecision OfflinePolicy::step(const ArrivalEvent& arrival) {
  const auto before = cache_.ids();
  PolicyDecision d;
  d.hit = observe(arrival);
  refresh_estimates();
  const auto target = call_oracle(oracle_);
  d.oracle_called = true;
  for (const auto id : before) {
    if (!std::binary_search(target.begin(), target.end(), id)) cache_.erase(id);
  }
  for (const auto id : target) {
    if (!cache_.contains(id)) cache_.insert(id, *stats_[index(id)].size, round_);
  }
  diff_sets(before, cache_.ids(), d);
  return d;
}

// ---------------------------------------------------------------------------

std::unique_ptr<CachePolicy> make_policy(PolicyKind kind, std::size_t n_queries, Size capacity,
                                         const EstimatorParams& params, double alpha) {
  switch (kind) {
    case PolicyKind::Vsocb:
      return std::make_unique<VsocbPolicy>(n_queries, capacity, params, alpha, oracle_exact);
    case PolicyKind::VsocbApprox:
      return std::make_unique<VsocbPolicy>(n_queries, capacity, params, alpha, oracle_approx,
                                           PolicyKind::VsocbApprox);
    case PolicyKind::Baseline:
      return std::make_unique<BaselinePolicy>(n_queries, capacity, params);
    case PolicyKind::Offline:
      return std::make_unique<OfflinePolicy>(n_queries, capacity, params, oracle_exact);
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace vsocb
