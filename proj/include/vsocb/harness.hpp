#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsocb/analysis.hpp"
#include "vsocb/estimator.hpp"
#include "vsocb/policy.hpp"
#include "vsocb/workload.hpp"

namespace vsocb {

struct ExperimentConfig {
  std::int64_t n_queries = 100;
  Size cache_capacity = 60;
  Round horizon = 20000;
  double alpha = 1.0;
  std::optional<double> delta;  // nullopt means 1/T
  CostRange cost_range{1.0, 2.0};
  double noise_sigma = 0.1;
  ProbDist prob_dist{};
  SizeDist size_dist{};
  PolicyKind policy = PolicyKind::Vsocb;
  std::uint64_t seed = 0;
  std::int64_t repeats = 1;
  std::optional<std::filesystem::path> trace_path;

  void validate() const;
  double resolved_delta() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Reads the keys of `j` over `base`; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const QueryUniverse& universe);
QueryUniverse universe_from_json(const nlohmann::json& j);
QueryUniverse load_universe(const std::filesystem::path& path);

struct RunSummary {
  double total_cost = 0.0;
  double final_pseudo_regret = 0.0;
  double final_realized_regret = 0.0;
  std::int64_t oracle_calls = 0;
  double hit_rate = 0.0;
  ExperimentConfig config;
  std::chrono::duration<double> wall_time{};
};

struct RunResult {
  std::vector<RoundLog> logs;
  RunSummary summary;
  QueryUniverse universe;
};

/// Observer invoked after every round; used by fuzz tests to audit policy
/// state. Arguments: the policy after the step, the arrival, the decision.
using RoundObserver = std::function<void(const CachePolicy&, const ArrivalEvent&, const PolicyDecision&)>;

/// Builds the universe and arrival stream for `config` (synthetic or trace).
struct Workload {
  QueryUniverse universe;
  std::vector<ArrivalEvent> arrivals;
};
Workload build_workload(const ExperimentConfig& config);

RunResult run_experiment(const ExperimentConfig& config, const RoundObserver& observer = {});

struct SweepResult {
  std::vector<RunResult> runs;  // seeds seed, seed+1, ...
  std::vector<Round> rounds;
  std::vector<double> mean_cost, se_cost;
  std::vector<double> mean_pseudo, se_pseudo;
  std::vector<double> mean_realized, se_realized;
};

SweepResult run_repeats(const ExperimentConfig& config);

inline constexpr std::string_view kRoundsHeader =
    "round,query_id,hit,charged_cost,realized_cost,oracle_called,cache_bytes_used,cum_cost,cum_pseudo_regret,"
    "cum_realized_regret";

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_rounds_csv(const std::filesystem::path& path, const std::vector<RoundLog>& logs,
                      const QueryUniverse& universe);
nlohmann::json to_json(const RunSummary& summary);

/// Writes rounds.csv, summary.json, config.json and universe.json.
void emit(const RunResult& result, const std::filesystem::path& out_dir);
/// Writes aggregate.csv, sweep.json, and one emit() directory per seed.
void emit_sweep(const SweepResult& result, const std::filesystem::path& out_dir);

}  // namespace vsocb
