#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsocb/estimator.hpp"
#include "vsocb/knapsack.hpp"
#include "vsocb/types.hpp"
#include "vsocb/workload.hpp"

namespace vsocb {

/// Stored (query, answer) pairs. An answer marker records the round in which
/// the answer was produced; a query is cached iff it has a marker.
class CacheStore {
 public:
  explicit CacheStore(std::size_t n_queries = 0);

  bool contains(QueryId id) const { return index(id) < answers_.size() && answers_[index(id)].has_value(); }
  std::optional<Round> answer_round(QueryId id) const { return answers_[index(id)]; }
  Size bytes_used() const { return used_; }
  std::size_t count() const { return count_; }

  void insert(QueryId id, Size size, Round answer_round);
  void erase(QueryId id);
  void clear();

  /// Cached ids in ascending order.
  std::vector<QueryId> ids() const;
  Size size_of(QueryId id) const { return sizes_[index(id)]; }

 private:
  std::vector<std::optional<Round>> answers_;
  std::vector<Size> sizes_;
  Size used_ = 0;
  std::size_t count_ = 0;
};

/// Per-round audit record.
struct PolicyDecision {
  bool hit = false;
  bool oracle_called = false;
  std::vector<QueryId> evicted;
  std::vector<QueryId> admitted;
};

enum class PolicyKind { Vsocb, VsocbApprox, Baseline, Offline };

PolicyKind parse_policy_kind(std::string_view text);
std::string_view to_string(PolicyKind kind);

/// State shared by every learner: counters and LCB estimates for seen
/// queries, the current cache, and round bookkeeping.
class CachePolicy {
 public:
  CachePolicy(std::size_t n_queries, Size capacity, EstimatorParams params);
  virtual ~CachePolicy() = default;

  CachePolicy(const CachePolicy&) = delete;
  CachePolicy& operator=(const CachePolicy&) = delete;

  /// Serves one arrival; `arrival.round` must be the previous round + 1.
  virtual PolicyDecision step(const ArrivalEvent& arrival) = 0;
  virtual PolicyKind kind() const = 0;
  /// Throws std::logic_error when a state invariant is broken.
  virtual void check_invariants() const;

  const CacheStore& cache() const { return cache_; }
  const QueryStats& stats(QueryId id) const { return stats_[index(id)]; }
  const std::vector<QueryId>& seen() const { return seen_; }
  bool is_seen(QueryId id) const { return seen_flag_[index(id)] != 0; }
  Size capacity() const { return capacity_; }
  Round round() const { return round_; }
  std::int64_t oracle_calls() const { return oracle_calls_; }
  const EstimatorParams& params() const { return params_; }

 protected:
  /// Records the arrival and, on a miss, its cost and size. Returns hit.
  bool observe(const ArrivalEvent& arrival);
  void refresh_estimates();
  double arrival_density(QueryId id) const;
  /// Seen queries with their current estimates, in tie-break order.
  std::vector<OracleInput> oracle_inputs() const;
  std::vector<QueryId> call_oracle(const Oracle& oracle);

  CacheStore cache_;
  std::vector<QueryStats> stats_;
  std::vector<QueryId> seen_;  // first-arrival order
  std::vector<char> seen_flag_;
  Size capacity_;
  EstimatorParams params_;
  Round round_ = 0;
  std::int64_t oracle_calls_ = 0;
};

/// Online learner with an accumulation-triggered oracle and a recommended
/// cache that the current cache follows as recommended queries re-arrive.
class VsocbPolicy final : public CachePolicy {
 public:
  VsocbPolicy(std::size_t n_queries, Size capacity, EstimatorParams params, double alpha, Oracle oracle,
              PolicyKind kind = PolicyKind::Vsocb);

  PolicyDecision step(const ArrivalEvent& arrival) override;
  PolicyKind kind() const override { return kind_; }
  void check_invariants() const override;

  /// Trigger predicate: the query's misses grew by (1 + alpha) since it last
  /// triggered, or the round grew by (1 + alpha) since the last oracle call.
  bool should_invoke_oracle(QueryId id, Round round) const;

  bool recommended_contains(QueryId id) const { return recommended_[index(id)] != 0; }
  std::vector<QueryId> recommended() const;
  Size recommended_bytes() const { return recommended_used_; }
  Round last_oracle_round() const { return last_oracle_round_; }
  double alpha() const { return alpha_; }

  // Test hooks for scripted scenarios.
  void set_oracle(Oracle oracle) { oracle_ = std::move(oracle); }

 private:
  void set_recommended(const std::vector<QueryId>& ids);

  double alpha_;
  Oracle oracle_;
  PolicyKind kind_;
  std::vector<char> recommended_;
  Size recommended_used_ = 0;
  Round last_oracle_round_ = 0;
};

/// Single-replacement baseline: on a miss, evicts the lowest per-size score
/// entries (prob * cost / size) while they score strictly below the incoming
/// query, committing only when that frees enough space.
class BaselinePolicy final : public CachePolicy {
 public:
  BaselinePolicy(std::size_t n_queries, Size capacity, EstimatorParams params);

  PolicyDecision step(const ArrivalEvent& arrival) override;
  PolicyKind kind() const override { return PolicyKind::Baseline; }

  double score(QueryId id) const;
};

/// Full-knowledge comparator: calls the oracle every round and installs its
/// output directly, as if every answer were available.
class OfflinePolicy final : public CachePolicy {
 public:
  OfflinePolicy(std::size_t n_queries, Size capacity, EstimatorParams params, Oracle oracle);

  PolicyDecision step(const ArrivalEvent& arrival) override;
  PolicyKind kind() const override { return PolicyKind::Offline; }

 private:
  Oracle oracle_;
};

std::unique_ptr<CachePolicy> make_policy(PolicyKind kind, std::size_t n_queries, Size capacity,
                                         const EstimatorParams& params, double alpha);

}  // namespace vsocb
