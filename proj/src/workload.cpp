#include "vsocb/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace vsocb {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string format_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ProbDist ProbDist::parse(std::string_view text) {
  const auto parts = split(trim(text), ':');
  ProbDist d;
  if (parts[0] == "uniform" && parts.size() == 1) {
    d.kind = Kind::Uniform;
    d.param = 0.0;
    return d;
  }
  if ((parts[0] == "zipf" || parts[0] == "dirichlet") && parts.size() <= 2) {
    d.kind = parts[0] == "zipf" ? Kind::Zipf : Kind::Dirichlet;
    d.param = 1.0;
    if (parts.size() == 2 && !parse_number(parts[1], d.param)) {
      throw ConfigError("bad probability distribution parameter: " + std::string(text));
    }
    if (!(d.param > 0.0) && d.kind == Kind::Dirichlet) {
      throw ConfigError("dirichlet concentration must be positive");
    }
    if (!(d.param >= 0.0)) throw ConfigError("zipf exponent must be non-negative");
    return d;
  }
  throw ConfigError("unknown probability distribution: " + std::string(text));
}

std::string ProbDist::to_string() const {
  switch (kind) {
    case Kind::Uniform: return "uniform";
    case Kind::Zipf: return "zipf:" + format_param(param);
    case Kind::Dirichlet: return "dirichlet:" + format_param(param);
  }
  return {};
}

SizeDist SizeDist::parse(std::string_view text) {
  const auto parts = split(trim(text), ':');
  SizeDist d;
  if (parts[0] == "constant" && parts.size() == 2) {
    d.kind = Kind::Constant;
    if (!parse_number(parts[1], d.lo)) throw ConfigError("bad constant size: " + std::string(text));
    d.hi = d.lo;
  } else if (parts[0] == "uniform_int" && parts.size() == 3) {
    d.kind = Kind::UniformInt;
    if (!parse_number(parts[1], d.lo) || !parse_number(parts[2], d.hi)) {
      throw ConfigError("bad uniform_int bounds: " + std::string(text));
    }
  } else {
    throw ConfigError("unknown size distribution: " + std::string(text));
  }
  if (d.lo < 1 || d.hi < d.lo) throw ConfigError("sizes must satisfy 1 <= lo <= hi");
  return d;
}

std::string SizeDist::to_string() const {
  if (kind == Kind::Constant) return "constant:" + std::to_string(lo);
  return "uniform_int:" + std::to_string(lo) + ":" + std::to_string(hi);
}

void QueryUniverse::validate() const {
  if (queries.empty()) throw ConfigError("universe has no queries");
  if (cache_capacity < 1) throw ConfigError("cache capacity must be positive");
  if (!(cost_range.hi > cost_range.lo)) throw ConfigError("cost range must satisfy c2 > c1");
  double total = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    if (index(q.id) != i) throw ConfigError("query ids must be dense and ordered");
    if (q.input_size < 1 || q.answer_size < 0 || q.total_size != q.input_size + q.answer_size) {
      throw ConfigError("query " + q.label + " has inconsistent sizes");
    }
    if (!(q.sample_prob > 0.0)) throw ConfigError("query " + q.label + " has non-positive probability");
    if (q.true_mean_cost < cost_range.lo || q.true_mean_cost > cost_range.hi) {
      throw ConfigError("query " + q.label + " mean cost outside the cost range");
    }
    total += q.sample_prob;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("probabilities do not sum to 1");
  std::vector<std::string> labels;
  labels.reserve(queries.size());
  for (const auto& q : queries) labels.push_back(q.label);
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw ConfigError("duplicate query labels");
  }
}

QueryUniverse generate_universe(const UniverseParams& params) {
  if (params.n_queries < 1) throw ConfigError("n_queries must be >= 1");
  if (params.cache_capacity < 1) throw ConfigError("cache capacity must be positive");
  if (!params.cost_range.valid()) throw ConfigError("cost range must satisfy c2 > c1 > 0");
  if (params.size_dist.min() > params.cache_capacity) {
    throw ConfigError("size distribution cannot produce a query that fits the cache");
  }

  Rng rng(params.seed);
  const auto n = static_cast<std::size_t>(params.n_queries);
  QueryUniverse u;
  u.cost_range = params.cost_range;
  u.cache_capacity = params.cache_capacity;
  u.queries.resize(n);

  std::uniform_real_distribution<double> cost(params.cost_range.lo, params.cost_range.hi);
  for (std::size_t i = 0; i < n; ++i) {
    auto& q = u.queries[i];
    q.id = query_id(static_cast<std::uint32_t>(i));
    q.label = "q" + std::to_string(i);
    q.true_mean_cost = cost(rng);
  }

  std::vector<double> weights(n, 1.0);
  switch (params.prob_dist.kind) {
    case ProbDist::Kind::Uniform:
      break;
    case ProbDist::Kind::Zipf: {
      // Popularity ranks are shuffled onto ids so that ids carry no
      // information about popularity.
      std::vector<std::size_t> rank(n);
      std::iota(rank.begin(), rank.end(), 0);
      std::shuffle(rank.begin(), rank.end(), rng);
      for (std::size_t i = 0; i < n; ++i) {
        weights[i] = 1.0 / std::pow(static_cast<double>(rank[i] + 1), params.prob_dist.param);
      }
      break;
    }
    case ProbDist::Kind::Dirichlet: {
      std::gamma_distribution<double> gamma(params.prob_dist.param, 1.0);
      for (auto& w : weights) {
        do {
          w = gamma(rng);
        } while (!(w > 0.0));
      }
      break;
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) u.queries[i].sample_prob = weights[i] / total;

  std::uniform_int_distribution<Size> size(params.size_dist.lo, params.size_dist.hi);
  for (auto& q : u.queries) {
    q.total_size = params.size_dist.kind == SizeDist::Kind::Constant ? params.size_dist.lo : size(rng);
    q.input_size = (q.total_size + 1) / 2;
    q.answer_size = q.total_size - q.input_size;
  }
  return u;
}

ArrivalSampler::ArrivalSampler(const QueryUniverse& universe, double noise_sigma)
    : universe_(&universe), noise_sigma_(noise_sigma) {
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
  if (universe.queries.empty()) throw ConfigError("universe has no queries");
  cdf_.reserve(universe.size());
  double acc = 0.0;
  for (const auto& q : universe.queries) {
    acc += q.sample_prob;
    cdf_.push_back(acc);
  }
}

ArrivalEvent ArrivalSampler::sample(Round round, Rng& rng) const {
  if (round < 1) throw std::invalid_argument("round must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, cdf_.back());
  const double u = unit(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  const auto& q = universe_->queries[static_cast<std::size_t>(it - cdf_.begin())];

  double cost = q.true_mean_cost;
  if (noise_sigma_ > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma_);
    cost += noise(rng);
  }
  cost = std::clamp(cost, universe_->cost_range.lo, universe_->cost_range.hi);
  return ArrivalEvent{round, q.id, cost, q.input_size, q.answer_size};
}

TraceError::TraceError(std::size_t line, const std::string& what)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<TraceRecord> parse_trace(std::string_view text) {
  std::vector<TraceRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!header_seen) {
      if (line != kTraceHeader) throw TraceError(line_no, "expected header '" + std::string(kTraceHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 5) throw TraceError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    TraceRecord r;
    if (!parse_number(fields[0], r.round)) throw TraceError(line_no, "bad round");
    r.query_id = std::string(trim(fields[1]));
    if (r.query_id.empty()) throw TraceError(line_no, "empty query_id");
    if (!parse_number(fields[2], r.input_size) || r.input_size < 1) throw TraceError(line_no, "bad input_size");
    if (!parse_number(fields[3], r.answer_size) || r.answer_size < 1) throw TraceError(line_no, "bad answer_size");
    if (!parse_number(fields[4], r.cost) || !(r.cost >= 0.0) || !std::isfinite(r.cost)) {
      throw TraceError(line_no, "bad cost");
    }
    if (out.empty() ? r.round != 1 : r.round <= out.back().round) {
      throw TraceError(line_no, out.empty() ? "rounds must start at 1"
                                            : "round " + std::to_string(r.round) + " does not increase");
    }
    out.push_back(std::move(r));
    if (end == text.size()) break;
  }
  if (!header_seen) throw TraceError(1, "missing header");
  return out;
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write trace file " + path.string());
  out << kTraceHeader << '\n';
  char buf[64];
  for (const auto& r : records) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.cost);
    out << r.round << ',' << r.query_id << ',' << r.input_size << ',' << r.answer_size << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing trace file " + path.string());
}

std::vector<TraceRecord> synthesize_trace(const QueryUniverse& universe, double noise_sigma,
                                          Round rounds, std::uint64_t seed) {
  // Traces need positive answer sizes; a size-1 query is recorded as 1+1.
  ArrivalSampler sampler(universe, noise_sigma);
  Rng rng(seed);
  std::vector<TraceRecord> out;
  out.reserve(static_cast<std::size_t>(std::max<Round>(rounds, 0)));
  for (Round t = 1; t <= rounds; ++t) {
    const auto a = sampler.sample(t, rng);
    const auto& q = universe[a.query];
    out.push_back({t, q.label, q.input_size, std::max<Size>(q.answer_size, 1), a.realized_cost});
  }
  return out;
}

TraceWorkload replay_workload(const std::vector<TraceRecord>& records, Size cache_capacity) {
  if (records.empty()) throw ConfigError("trace is empty");
  if (cache_capacity < 1) throw ConfigError("cache capacity must be positive");

  TraceWorkload w;
  auto& u = w.universe;
  u.cache_capacity = cache_capacity;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::size_t> counts;
  std::vector<double> cost_sums;
  double lo = records.front().cost;
  double hi = lo;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto [it, inserted] = ids.try_emplace(r.query_id, static_cast<std::uint32_t>(u.queries.size()));
    if (inserted) {
      QuerySpec q;
      q.id = query_id(it->second);
      q.label = r.query_id;
      q.input_size = r.input_size;
      q.answer_size = r.answer_size;
      q.total_size = r.input_size + r.answer_size;
      u.queries.push_back(std::move(q));
      counts.push_back(0);
      cost_sums.push_back(0.0);
    } else {
      const auto& q = u.queries[it->second];
      if (q.input_size != r.input_size || q.answer_size != r.answer_size) {
        throw TraceError(i + 2, "sizes of query " + r.query_id + " change between records");
      }
    }
    ++counts[it->second];
    cost_sums[it->second] += r.cost;
    lo = std::min(lo, r.cost);
    hi = std::max(hi, r.cost);
    w.arrivals.push_back(ArrivalEvent{static_cast<Round>(i + 1), query_id(it->second), r.cost,
                                      r.input_size, r.answer_size});
  }

  // Zero-noise traces collapse the range; keep it non-degenerate.
  if (!(hi > lo)) hi = lo + std::max(1e-12, std::abs(lo) * 1e-9);
  u.cost_range = CostRange{lo, hi};
  const double n = static_cast<double>(records.size());
  for (std::size_t i = 0; i < u.queries.size(); ++i) {
    u.queries[i].sample_prob = static_cast<double>(counts[i]) / n;
    u.queries[i].true_mean_cost =
        std::clamp(cost_sums[i] / static_cast<double>(counts[i]), lo, hi);
  }
  return w;
}

}  // namespace vsocb
