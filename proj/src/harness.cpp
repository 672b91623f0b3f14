#include "vsocb/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vsocb {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

void ExperimentConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (cache_capacity < 1) throw ConfigError("cache capacity must be positive");
  if ((policy == PolicyKind::Vsocb || policy == PolicyKind::VsocbApprox) && !(alpha > 0.0)) {
    throw ConfigError("alpha must be positive for vsocb policies");
  }
  if (delta && !(*delta > 0.0 && *delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
  if (!trace_path) {
    if (n_queries < 1) throw ConfigError("n_queries must be >= 1");
    if (!cost_range.valid()) throw ConfigError("cost range must satisfy c2 > c1 > 0");
  }
}

double ExperimentConfig::resolved_delta() const {
  if (delta) return *delta;
  // 1/T; a single-round run would give delta = 1, outside (0, 1).
  return horizon > 1 ? 1.0 / static_cast<double>(horizon) : 0.5;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["n_queries"] = c.n_queries;
  j["cache_capacity"] = c.cache_capacity;
  j["horizon"] = c.horizon;
  j["alpha"] = c.alpha;
  if (c.delta) {
    j["delta"] = *c.delta;
  } else {
    j["delta"] = "1/T";
  }
  j["cost_range"] = {c.cost_range.lo, c.cost_range.hi};
  j["noise_sigma"] = c.noise_sigma;
  j["prob_dist"] = c.prob_dist.to_string();
  j["size_dist"] = c.size_dist.to_string();
  j["policy"] = std::string(to_string(c.policy));
  j["seed"] = c.seed;
  j["repeats"] = c.repeats;
  j["trace_path"] = c.trace_path ? json(c.trace_path->string()) : json(nullptr);
  return j;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n_queries") {
        c.n_queries = v.get<std::int64_t>();
      } else if (key == "cache_capacity") {
        c.cache_capacity = v.get<Size>();
      } else if (key == "horizon") {
        c.horizon = v.get<Round>();
      } else if (key == "alpha") {
        c.alpha = v.get<double>();
      } else if (key == "delta") {
        if (v.is_string()) {
          if (v.get<std::string>() != "1/T") throw ConfigError("delta must be a number or \"1/T\"");
          c.delta.reset();
        } else {
          c.delta = v.get<double>();
        }
      } else if (key == "cost_range") {
        if (!v.is_array() || v.size() != 2) throw ConfigError("cost_range must be [c1, c2]");
        c.cost_range = CostRange{v[0].get<double>(), v[1].get<double>()};
      } else if (key == "noise_sigma") {
        c.noise_sigma = v.get<double>();
      } else if (key == "prob_dist") {
        c.prob_dist = ProbDist::parse(v.get<std::string>());
      } else if (key == "size_dist") {
        c.size_dist = SizeDist::parse(v.get<std::string>());
      } else if (key == "policy") {
        c.policy = parse_policy_kind(v.get<std::string>());
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "repeats") {
        c.repeats = v.get<std::int64_t>();
      } else if (key == "trace_path") {
        if (v.is_null()) {
          c.trace_path.reset();
        } else {
          c.trace_path = v.get<std::string>();
        }
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

json to_json(const QueryUniverse& u) {
  json queries = json::array();
  for (const auto& q : u.queries) {
    queries.push_back({{"id", q.label},
                       {"input_size", q.input_size},
                       {"answer_size", q.answer_size},
                       {"true_mean_cost", q.true_mean_cost},
                       {"sample_prob", q.sample_prob}});
  }
  return {{"cache_capacity", u.cache_capacity}, {"cost_range", {u.cost_range.lo, u.cost_range.hi}},
          {"queries", queries}};
}

QueryUniverse universe_from_json(const json& j) {
  QueryUniverse u;
  try {
    u.cache_capacity = j.at("cache_capacity").get<Size>();
    const auto& range = j.at("cost_range");
    u.cost_range = CostRange{range.at(0).get<double>(), range.at(1).get<double>()};
    for (const auto& item : j.at("queries")) {
      QuerySpec q;
      q.id = query_id(static_cast<std::uint32_t>(u.queries.size()));
      q.label = item.at("id").is_string() ? item.at("id").get<std::string>() : item.at("id").dump();
      q.input_size = item.at("input_size").get<Size>();
      q.answer_size = item.at("answer_size").get<Size>();
      q.total_size = q.input_size + q.answer_size;
      q.true_mean_cost = item.at("true_mean_cost").get<double>();
      q.sample_prob = item.at("sample_prob").get<double>();
      u.queries.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed universe: ") + e.what());
  }
  u.validate();
  return u;
}

QueryUniverse load_universe(const std::filesystem::path& path) { return universe_from_json(read_json(path)); }

// ---------------------------------------------------------------------------
// execution

Workload build_workload(const ExperimentConfig& config) {
  config.validate();
  Workload w;
  if (config.trace_path) {
    auto records = load_trace(*config.trace_path);
    if (static_cast<Round>(records.size()) < config.horizon) {
      throw ConfigError("trace has " + std::to_string(records.size()) + " rounds, shorter than horizon " +
                        std::to_string(config.horizon));
    }
    records.resize(static_cast<std::size_t>(config.horizon));
    auto replay = replay_workload(records, config.cache_capacity);
    w.universe = std::move(replay.universe);
    w.arrivals = std::move(replay.arrivals);
  } else {
    UniverseParams p;
    p.n_queries = config.n_queries;
    p.cache_capacity = config.cache_capacity;
    p.cost_range = config.cost_range;
    p.prob_dist = config.prob_dist;
    p.size_dist = config.size_dist;
    p.seed = config.seed;
    w.universe = generate_universe(p);

    ArrivalSampler sampler(w.universe, config.noise_sigma);
    std::seed_seq seq{config.seed, std::uint64_t{0xA11CE}};
    Rng rng(seq);
    w.arrivals.reserve(static_cast<std::size_t>(config.horizon));
    for (Round t = 1; t <= config.horizon; ++t) w.arrivals.push_back(sampler.sample(t, rng));
  }
  const bool any_fits = std::any_of(w.universe.queries.begin(), w.universe.queries.end(),
                                    [&](const QuerySpec& q) { return q.total_size <= w.universe.cache_capacity; });
  if (!any_fits) throw InfeasibleError("every query is larger than the cache capacity");
  return w;
}

RunResult run_experiment(const ExperimentConfig& config, const RoundObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  auto workload = build_workload(config);

  EstimatorParams params;
  params.horizon = config.horizon;
  params.n_queries = static_cast<std::int64_t>(workload.universe.size());
  params.delta = config.resolved_delta();
  params.cost_range = workload.universe.cost_range;
  auto policy = make_policy(config.policy, workload.universe.size(), config.cache_capacity, params, config.alpha);

  RunResult result;
  result.logs.reserve(workload.arrivals.size());
  std::int64_t hits = 0;
  for (const auto& arrival : workload.arrivals) {
    RoundLog log;
    log.served = policy->cache().ids();
    const auto decision = policy->step(arrival);
    if (observer) observer(*policy, arrival, decision);
    log.round = arrival.round;
    log.query = arrival.query;
    log.hit = decision.hit;
    log.realized_cost = arrival.realized_cost;
    log.charged_cost = decision.hit ? 0.0 : arrival.realized_cost;
    log.oracle_called = decision.oracle_called;
    log.cache_bytes_used = policy->cache().bytes_used();
    hits += decision.hit ? 1 : 0;
    result.logs.push_back(std::move(log));
  }

  const auto curve = regret_curves(result.logs, workload.universe);
  for (std::size_t i = 0; i < result.logs.size(); ++i) {
    result.logs[i].cum_cost = curve.cum_cost[i];
    result.logs[i].cum_pseudo_regret = curve.pseudo[i];
    result.logs[i].cum_realized_regret = curve.realized[i];
  }

  auto& s = result.summary;
  if (!result.logs.empty()) {
    s.total_cost = result.logs.back().cum_cost;
    s.final_pseudo_regret = result.logs.back().cum_pseudo_regret;
    s.final_realized_regret = result.logs.back().cum_realized_regret;
    s.hit_rate = static_cast<double>(hits) / static_cast<double>(result.logs.size());
  }
  s.oracle_calls = policy->oracle_calls();
  s.config = config;
  result.universe = std::move(workload.universe);
  s.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

SweepResult run_repeats(const ExperimentConfig& config) {
  config.validate();
  SweepResult out;
  for (std::int64_t k = 0; k < config.repeats; ++k) {
    auto c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(k);
    c.repeats = 1;
    out.runs.push_back(run_experiment(c));
  }

  const std::size_t rounds = out.runs.front().logs.size();
  const double n = static_cast<double>(out.runs.size());
  auto aggregate = [&](auto field, std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(rounds, 0.0);
    se.assign(rounds, 0.0);
    for (std::size_t t = 0; t < rounds; ++t) {
      double sum = 0.0;
      for (const auto& r : out.runs) sum += field(r.logs[t]);
      const double m = sum / n;
      double ss = 0.0;
      for (const auto& r : out.runs) {
        const double d = field(r.logs[t]) - m;
        ss += d * d;
      }
      mean[t] = m;
      se[t] = out.runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    }
  };
  out.rounds.resize(rounds);
  for (std::size_t t = 0; t < rounds; ++t) out.rounds[t] = out.runs.front().logs[t].round;
  aggregate([](const RoundLog& l) { return l.cum_cost; }, out.mean_cost, out.se_cost);
  aggregate([](const RoundLog& l) { return l.cum_pseudo_regret; }, out.mean_pseudo, out.se_pseudo);
  aggregate([](const RoundLog& l) { return l.cum_realized_regret; }, out.mean_realized, out.se_realized);
  return out;
}

// ---------------------------------------------------------------------------
// output

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_rounds_csv(const std::filesystem::path& path, const std::vector<RoundLog>& logs,
                      const QueryUniverse& universe) {
  std::string out;
  out.reserve(logs.size() * 96 + 128);
  out += kRoundsHeader;
  out += '\n';
  for (const auto& l : logs) {
    out += std::to_string(l.round);
    out += ',';
    out += index(l.query) < universe.size() ? universe[l.query].label : std::to_string(index(l.query));
    out += l.hit ? ",1," : ",0,";
    out += format_double(l.charged_cost);
    out += ',';
    out += format_double(l.realized_cost);
    out += l.oracle_called ? ",1," : ",0,";
    out += std::to_string(l.cache_bytes_used);
    out += ',';
    out += format_double(l.cum_cost);
    out += ',';
    out += format_double(l.cum_pseudo_regret);
    out += ',';
    out += format_double(l.cum_realized_regret);
    out += '\n';
  }
  write_file(path, out);
}

json to_json(const RunSummary& s) {
  return {{"total_cost", s.total_cost},
          {"final_pseudo_regret", s.final_pseudo_regret},
          {"final_realized_regret", s.final_realized_regret},
          {"oracle_calls", s.oracle_calls},
          {"hit_rate", s.hit_rate},
          {"config", to_json(s.config)},
          {"wall_time_seconds", s.wall_time.count()}};
}

void emit(const RunResult& result, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_rounds_csv(out_dir / "rounds.csv", result.logs, result.universe);
  write_file(out_dir / "summary.json", to_json(result.summary).dump(2) + "\n");
  write_file(out_dir / "config.json", to_json(result.summary.config).dump(2) + "\n");
  write_file(out_dir / "universe.json", to_json(result.universe).dump(2) + "\n");
}

void emit_sweep(const SweepResult& result, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::string csv =
      "round,mean_cum_cost,se_cum_cost,mean_cum_pseudo_regret,se_cum_pseudo_regret,mean_cum_realized_regret,"
      "se_cum_realized_regret\n";
  for (std::size_t t = 0; t < result.rounds.size(); ++t) {
    csv += std::to_string(result.rounds[t]);
    for (const double v : {result.mean_cost[t], result.se_cost[t], result.mean_pseudo[t], result.se_pseudo[t],
                           result.mean_realized[t], result.se_realized[t]}) {
      csv += ',';
      csv += format_double(v);
    }
    csv += '\n';
  }
  write_file(out_dir / "aggregate.csv", csv);

  json runs = json::array();
  for (const auto& run : result.runs) {
    const auto dir = out_dir / ("seed_" + std::to_string(run.summary.config.seed));
    emit(run, dir);
    runs.push_back(to_json(run.summary));
  }
  write_file(out_dir / "sweep.json", json{{"runs", runs}}.dump(2) + "\n");
}

}  // namespace vsocb
