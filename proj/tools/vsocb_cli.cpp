// Command-line front end: run, sweep, analyze, solve, gen-trace.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vsocb/analysis.hpp"
#include "vsocb/harness.hpp"
#include "vsocb/knapsack.hpp"

namespace {

using namespace vsocb;

// Flags shared by the experiment subcommands. Only flags given on the
// command line override the config file.
struct ExperimentFlags {
  std::string config_path;
  std::int64_t n_queries = 0;
  Size capacity = 0;
  Round horizon = 0;
  double alpha = 0.0;
  std::string delta;
  std::vector<double> cost_range;
  double noise_sigma = 0.0;
  std::string prob_dist;
  std::string size_dist;
  std::string policy;
  std::uint64_t seed = 0;
  std::int64_t repeats = 0;
  std::string trace;

  std::vector<CLI::Option*> generation_opts;
  CLI::Option* n_opt = nullptr;
  CLI::Option* capacity_opt = nullptr;
  CLI::Option* horizon_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* cost_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* prob_opt = nullptr;
  CLI::Option* size_opt = nullptr;
  CLI::Option* policy_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* repeats_opt = nullptr;
  CLI::Option* trace_opt = nullptr;

  void attach(CLI::App& app, bool with_policy) {
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    n_opt = app.add_option("--n-queries", n_queries, "number of distinct queries");
    capacity_opt = app.add_option("--capacity", capacity, "cache capacity in size units");
    horizon_opt = app.add_option("--horizon", horizon, "number of rounds T");
    seed_opt = app.add_option("--seed", seed, "base seed");
    cost_opt = app.add_option("--cost-range", cost_range, "c1 c2")->expected(2);
    sigma_opt = app.add_option("--noise-sigma", noise_sigma, "std-dev of cost noise");
    prob_opt = app.add_option("--prob-dist", prob_dist, "uniform | zipf:<s> | dirichlet:<a>");
    size_opt = app.add_option("--size-dist", size_dist, "constant:<k> | uniform_int:<lo>:<hi>");
    generation_opts = {n_opt, cost_opt, sigma_opt, prob_opt, size_opt};
    if (with_policy) {
      alpha_opt = app.add_option("--alpha", alpha, "accumulation factor (> 0)");
      delta_opt = app.add_option("--delta", delta, "confidence level or 1/T");
      policy_opt = app.add_option("--policy", policy, "vsocb | vsocb-apx | baseline | offline");
      repeats_opt = app.add_option("--repeats", repeats, "number of seeds for sweep");
      trace_opt = app.add_option("--trace", trace, "replay a recorded trace")->check(CLI::ExistingFile);
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(n_opt)) c.n_queries = n_queries;
    if (given(capacity_opt)) c.cache_capacity = capacity;
    if (given(horizon_opt)) c.horizon = horizon;
    if (given(alpha_opt)) c.alpha = alpha;
    if (given(delta_opt)) {
      if (delta == "1/T") {
        c.delta.reset();
      } else {
        c.delta = std::stod(delta);
      }
    }
    if (given(cost_opt)) c.cost_range = CostRange{cost_range[0], cost_range[1]};
    if (given(sigma_opt)) c.noise_sigma = noise_sigma;
    if (given(prob_opt)) c.prob_dist = ProbDist::parse(prob_dist);
    if (given(size_opt)) c.size_dist = SizeDist::parse(size_dist);
    if (given(policy_opt)) c.policy = parse_policy_kind(policy);
    if (given(seed_opt)) c.seed = seed;
    if (given(repeats_opt)) c.repeats = repeats;
    if (given(trace_opt)) {
      for (const auto* o : generation_opts) {
        if (given(o)) throw ConfigError("--trace cannot be combined with " + o->get_name());
      }
      c.trace_path = trace;
    }
    c.validate();
    return c;
  }
};

void print_summary(const RunSummary& s) {
  std::cout << "policy=" << to_string(s.config.policy) << " seed=" << s.config.seed << " rounds=" << s.config.horizon
            << "\n"
            << "total_cost=" << format_double(s.total_cost) << "\n"
            << "final_pseudo_regret=" << format_double(s.final_pseudo_regret) << "\n"
            << "final_realized_regret=" << format_double(s.final_realized_regret) << "\n"
            << "oracle_calls=" << s.oracle_calls << "\n"
            << "hit_rate=" << format_double(s.hit_rate) << "\n"
            << "wall_time_seconds=" << s.wall_time.count() << "\n";
}

std::string join_labels(const QueryUniverse& u, const std::vector<QueryId>& ids) {
  std::string out;
  for (const auto id : ids) {
    if (!out.empty()) out += ' ';
    out += u[id].label;
  }
  return out;
}

std::string gap_text(double g) { return std::isinf(g) ? "inf" : format_double(g); }

void print_report(const QueryUniverse& u, const GapReport& r) {
  std::cout << "# gap report\n"
            << "queries: " << u.size() << "  capacity: " << u.cache_capacity << "\n"
            << "optimal cache: {" << join_labels(u, r.optimal.ids) << "}  value " << format_double(r.optimal.value)
            << "\n"
            << "valid sets: " << r.valid.sets.size() << "  l_min " << r.valid.l_min << "  l_max " << r.valid.l_max
            << "  l " << r.valid.l_stat << "\n"
            << "beta: " << format_double(r.beta) << "\n"
            << "query        size        P*C      gap   approx_gap\n";
  for (const auto& q : u.queries) {
    std::cout << q.label << "  " << q.total_size << "  " << format_double(q.value()) << "  "
              << gap_text(r.gaps.per_query[index(q.id)]) << "  " << gap_text(r.approx_gaps.per_query[index(q.id)])
              << "\n";
  }
  std::cout << "\n# key=value\n"
            << "n_queries=" << u.size() << "\n"
            << "capacity=" << u.cache_capacity << "\n"
            << "optimal_cache=" << join_labels(u, r.optimal.ids) << "\n"
            << "optimal_value=" << format_double(r.optimal.value) << "\n"
            << "valid_sets=" << r.valid.sets.size() << "\n"
            << "l_min=" << r.valid.l_min << "\n"
            << "l_max=" << r.valid.l_max << "\n"
            << "l_stat=" << r.valid.l_stat << "\n"
            << "min_gap=" << gap_text(r.gaps.min_gap) << "\n"
            << "beta=" << format_double(r.beta) << "\n"
            << "min_approx_gap=" << gap_text(r.approx_gaps.min_gap) << "\n";
  for (const auto& q : u.queries) {
    std::cout << "gap." << q.label << "=" << gap_text(r.gaps.per_query[index(q.id)]) << "\n";
    std::cout << "approx_gap." << q.label << "=" << gap_text(r.approx_gaps.per_query[index(q.id)]) << "\n";
  }
}

// Parses `id,value,weight` lines; blank lines and '#' comments are skipped.
std::pair<KnapsackInstance, std::vector<std::string>> read_instance(std::istream& in) {
  KnapsackInstance inst;
  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string id, value, weight;
    if (!std::getline(ss, id, ',') || !std::getline(ss, value, ',') || !std::getline(ss, weight)) {
      throw ConfigError("instance line " + std::to_string(line_no) + ": expected id,value,weight");
    }
    try {
      inst.add(query_id(static_cast<std::uint32_t>(labels.size())), std::stod(value), std::stoll(weight));
    } catch (const std::logic_error&) {
      throw ConfigError("instance line " + std::to_string(line_no) + ": bad number");
    }
    labels.push_back(id);
  }
  return {inst, labels};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-size online cache bandit simulator"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  std::string run_out;
  auto* run = app.add_subcommand("run", "run one experiment");
  run_flags.attach(*run, true);
  run->add_option("--out", run_out, "output directory");

  ExperimentFlags sweep_flags;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run seeds seed..seed+repeats-1 and aggregate");
  sweep_flags.attach(*sweep, true);
  sweep->add_option("--out", sweep_out, "output directory")->required();

  ExperimentFlags analyze_flags;
  std::string universe_path;
  double beta = 0.0;
  auto* analyze_cmd = app.add_subcommand("analyze", "gap report for a small universe (N <= 20)");
  analyze_flags.attach(*analyze_cmd, false);
  analyze_cmd->add_option("--universe", universe_path, "universe JSON file")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--beta", beta, "approximation factor for the approximation gap");

  std::string instance_path = "-";
  Size solve_capacity = 0;
  std::string mode = "exact";
  auto* solve = app.add_subcommand("solve", "standalone knapsack solver");
  solve->add_option("--input", instance_path, "file of id,value,weight lines ('-' for stdin)");
  solve->add_option("--capacity", solve_capacity, "capacity (or demand for min modes)")->required();
  solve->add_option("--mode", mode, "exact | min | brute | brute-min")
      ->check(CLI::IsMember({"exact", "min", "brute", "brute-min"}));

  ExperimentFlags trace_flags;
  std::string trace_out;
  auto* gen_trace = app.add_subcommand("gen-trace", "write a synthetic trace file");
  trace_flags.attach(*gen_trace, false);
  gen_trace->add_option("--out", trace_out, "trace file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = run_flags.resolve();
      const auto result = run_experiment(config);
      if (!run_out.empty()) emit(result, run_out);
      print_summary(result.summary);
    } else if (sweep->parsed()) {
      const auto config = sweep_flags.resolve();
      const auto result = run_repeats(config);
      emit_sweep(result, sweep_out);
      for (const auto& r : result.runs) print_summary(r.summary);
      std::cout << "mean_final_pseudo_regret=" << format_double(result.mean_pseudo.back()) << "\n"
                << "se_final_pseudo_regret=" << format_double(result.se_pseudo.back()) << "\n"
                << "mean_total_cost=" << format_double(result.mean_cost.back()) << "\n";
    } else if (analyze_cmd->parsed()) {
      QueryUniverse u;
      if (!universe_path.empty()) {
        u = load_universe(universe_path);
      } else {
        ExperimentConfig c = analyze_flags.resolve();
        UniverseParams p{c.n_queries, c.cache_capacity, c.cost_range, c.prob_dist, c.size_dist, c.seed};
        u = generate_universe(p);
      }
      print_report(u, analyze(u, beta));
    } else if (solve->parsed()) {
      std::ifstream file;
      if (instance_path != "-") {
        file.open(instance_path);
        if (!file) throw std::runtime_error("cannot open " + instance_path);
      }
      auto [inst, labels] = read_instance(instance_path == "-" ? std::cin : file);
      inst.capacity = solve_capacity;
      KnapsackSolution sol;
      if (mode == "exact") {
        sol = solve_exact(inst);
      } else if (mode == "min") {
        sol = solve_min_knapsack(inst);
      } else {
        sol = solve_brute(inst, mode == "brute" ? Objective::Maximize : Objective::Minimize);
      }
      for (const auto id : sol.chosen) std::cout << labels[index(id)] << "\n";
      std::cout << "# value=" << format_double(sol.total_value) << " weight=" << sol.total_weight << "\n";
    } else if (gen_trace->parsed()) {
      const ExperimentConfig c = trace_flags.resolve();
      UniverseParams p{c.n_queries, c.cache_capacity, c.cost_range, c.prob_dist, c.size_dist, c.seed};
      const auto u = generate_universe(p);
      write_trace(trace_out, synthesize_trace(u, c.noise_sigma, c.horizon, c.seed));
      std::cout << "wrote " << c.horizon << " rounds to " << trace_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
