#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace vsocb {

// Dense query index. Workloads and traces map their external labels onto
// 0..N-1 so that per-query state can live in flat vectors.
enum class QueryId : std::uint32_t {};

constexpr std::uint32_t index(QueryId id) { return static_cast<std::uint32_t>(id); }
constexpr QueryId query_id(std::uint32_t i) { return static_cast<QueryId>(i); }

using Size = std::int64_t;
using Round = std::int64_t;

struct CostRange {
  double lo = 1.0;  // c1
  double hi = 2.0;  // c2

  double width() const { return hi - lo; }
  bool valid() const { return hi > lo && lo > 0.0; }
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsocb

template <>
struct std::hash<vsocb::QueryId> {
  std::size_t operator()(vsocb::QueryId id) const noexcept {
    return std::hash<std::uint32_t>{}(vsocb::index(id));
  }
};
