#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vsocb/types.hpp"

namespace vsocb {

using Rng = std::mt19937_64;

/// Distribution of arrival probabilities across the query universe.
/// Text form: "uniform", "zipf:<exponent>", "dirichlet:<alpha>".
struct ProbDist {
  enum class Kind { Uniform, Zipf, Dirichlet };
  Kind kind = Kind::Zipf;
  double param = 1.0;

  static ProbDist parse(std::string_view text);
  std::string to_string() const;
};

/// Distribution of total query sizes S(q).
/// Text form: "constant:<k>", "uniform_int:<lo>:<hi>".
struct SizeDist {
  enum class Kind { Constant, UniformInt };
  Kind kind = Kind::UniformInt;
  Size lo = 1;
  Size hi = 5;

  static SizeDist parse(std::string_view text);
  std::string to_string() const;
  Size min() const { return lo; }
};

/// Ground truth for one query. Hidden from the policies.
struct QuerySpec {
  QueryId id{};
  std::string label;
  Size input_size = 1;
  Size answer_size = 0;
  Size total_size = 1;
  double true_mean_cost = 0.0;
  double sample_prob = 0.0;

  double value() const { return sample_prob * true_mean_cost; }
};

struct QueryUniverse {
  std::vector<QuerySpec> queries;
  CostRange cost_range;
  Size cache_capacity = 1;

  std::size_t size() const { return queries.size(); }
  const QuerySpec& operator[](QueryId id) const { return queries[index(id)]; }

  // Throws ConfigError when an invariant is broken.
  void validate() const;
};

struct UniverseParams {
  std::int64_t n_queries = 100;
  Size cache_capacity = 60;
  CostRange cost_range{1.0, 2.0};
  ProbDist prob_dist{};
  SizeDist size_dist{};
  std::uint64_t seed = 0;
};

QueryUniverse generate_universe(const UniverseParams& params);

struct ArrivalEvent {
  Round round = 0;
  QueryId query{};
  double realized_cost = 0.0;
  Size input_size = 0;
  // Known to the environment up front; a policy may only read it on a miss.
  Size answer_size = 0;
};

/// Categorical sampler over a universe plus clamped Gaussian cost noise.
/// A cost is drawn on every round, hit or miss.
class ArrivalSampler {
 public:
  ArrivalSampler(const QueryUniverse& universe, double noise_sigma);

  ArrivalEvent sample(Round round, Rng& rng) const;

 private:
  const QueryUniverse* universe_;
  double noise_sigma_;
  std::vector<double> cdf_;
};

struct TraceRecord {
  Round round = 0;
  std::string query_id;
  Size input_size = 0;
  Size answer_size = 0;
  double cost = 0.0;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kTraceHeader = "round,query_id,input_size,answer_size,cost";

std::vector<TraceRecord> load_trace(const std::filesystem::path& path);
std::vector<TraceRecord> parse_trace(std::string_view text);
void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records);

/// Draws `rounds` arrivals and records them with labels "q<index>".
std::vector<TraceRecord> synthesize_trace(const QueryUniverse& universe, double noise_sigma,
                                          Round rounds, std::uint64_t seed);

/// A recorded trace mapped onto dense ids, with the empirical universe
/// (frequencies, mean costs, observed sizes) standing in for ground truth.
struct TraceWorkload {
  QueryUniverse universe;
  std::vector<ArrivalEvent> arrivals;
};

TraceWorkload replay_workload(const std::vector<TraceRecord>& records, Size cache_capacity);

}  // namespace vsocb
