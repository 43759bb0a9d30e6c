// Command-line front end: scenario generation, solving, checking, AoI
// analysis, weight sweeps, Monte-Carlo campaigns and LP export.
//
// Every flag can also be given in the JSON file passed with --config; flags
// win over the file. Exit codes: 0 success, 1 usage error, 2 infeasible or
// invalid input, 3 internal limit reached.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hybrid_aoi/aoi.hpp"
#include "hybrid_aoi/campaign.hpp"
#include "hybrid_aoi/csv.hpp"
#include "hybrid_aoi/json_io.hpp"
#include "hybrid_aoi/linear_model.hpp"
#include "hybrid_aoi/lp_format.hpp"
#include "hybrid_aoi/model.hpp"
#include "hybrid_aoi/scenario.hpp"
#include "hybrid_aoi/solver.hpp"
#include "hybrid_aoi/sweep.hpp"

namespace {

using nlohmann::json;
namespace ha = hybrid_aoi;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitLimit = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_config(const std::optional<std::string>& path) {
  if (!path) return json::object();
  json j = ha::read_json_file(*path);
  if (!j.is_object()) throw InvalidInput(*path + ": config must be an object");
  return j;
}

template <typename T>
void take(std::optional<T>& flag, const json& config, const char* key) {
  if (flag) return;
  if (auto it = config.find(key); it != config.end()) flag = it->get<T>();
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + *path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + *path);
}

std::array<double, 3> parse_alpha(const std::vector<double>& values) {
  if (values.size() != 3) {
    throw UsageError("--alpha takes exactly three comma-separated weights");
  }
  return {values[0], values[1], values[2]};
}

// Options shared by the verbs that act on one scenario.
struct InstanceOptions {
  std::optional<std::string> config;
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> alpha;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--scenario", scenario, "scenario JSON file");
    app->add_option("--seed", seed,
                    "generate the scenario from the config with this seed");
    app->add_option("--alpha", alpha, "objective weights a1,a2,a3")
        ->delimiter(',');
    app->add_option("--out", out, "output file (stdout when omitted)");
  }

  json merge() {
    json file = load_config(config);
    take(scenario, file, "scenario");
    take(seed, file, "seed");
    take(alpha, file, "alpha");
    take(out, file, "out");
    return file;
  }

  ha::Scenario load(const json& file) const {
    if (scenario) return ha::load_scenario(*scenario);
    if (!seed) {
      throw UsageError("give --scenario, or --seed with an optional --config");
    }
    ha::GenerationConfig g;
    if (auto it = file.find("generation"); it != file.end()) it->get_to(g);
    return ha::generate_scenario(g, *seed);
  }

  ha::ObjectiveConfig objective(const ha::Scenario& s) const {
    const std::array<double, 3> a =
        alpha ? parse_alpha(*alpha) : std::array<double, 3>{0.1, 0.1, 0.8};
    ha::ObjectiveConfig cfg = ha::ObjectiveConfig::for_scenario(s, a);
    cfg.validate();
    return cfg;
  }
};

ha::Schedule load_schedule(const std::string& path, const ha::Scenario& s) {
  json j = ha::read_json_file(path);
  // Accept a solution document as well as a bare schedule.
  if (j.is_object() && !j.contains("kind") && j.contains("schedule")) {
    j = j.at("schedule");
  }
  return ha::schedule_from_json(j, s);
}

// ---------------------------------------------------------------- scenario gen

struct ScenarioGen {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> nodes;
  std::optional<int> aps;
  std::optional<int> types;
  std::optional<int> horizon;
  std::optional<double> pair_probability;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--seed", seed, "generator seed");
    app->add_option("--out", out, "scenario file (stdout when omitted)");
    app->add_option("--nodes", nodes, "number of IoT nodes");
    app->add_option("--aps", aps, "number of access points");
    app->add_option("--types", types, "number of data types");
    app->add_option("--horizon", horizon, "number of time steps");
    app->add_option("--pair-probability", pair_probability,
                    "probability that an ordered pair communicates");
  }

  int run() {
    const json file = load_config(config);
    take(seed, file, "seed");
    take(out, file, "out");
    ha::GenerationConfig g;
    // The generation block may be nested or be the whole file.
    file.contains("generation") ? file.at("generation").get_to(g)
                                : file.get_to(g);
    if (nodes) g.n_nodes = *nodes;
    if (aps) g.n_aps = *aps;
    if (types) g.n_types = *types;
    if (horizon) g.horizon = *horizon;
    if (pair_probability) g.pair_probability = *pair_probability;
    const ha::Scenario s = ha::generate_scenario(g, seed.value_or(0));
    write_text(out, ha::scenario_to_string(s));
    return kExitOk;
  }
};

// ----------------------------------------------------------------------- solve

struct Solve {
  InstanceOptions instance;
  std::optional<std::string> solver;
  std::optional<double> gap;
  std::optional<std::int64_t> node_limit;
  std::optional<double> time_limit;

  void attach(CLI::App* app) {
    instance.attach(app);
    app->add_option("--solver", solver, "bnb (default), greedy or bruteforce")
        ->check(CLI::IsMember({"bnb", "greedy", "bruteforce"}));
    app->add_option("--gap", gap, "relative gap target for bnb");
    app->add_option("--node-limit", node_limit, "node cap for bnb");
    app->add_option("--time-limit", time_limit, "time cap in seconds for bnb");
  }

  int run() {
    const json file = instance.merge();
    const json solver_block = file.value("solver", json::object());
    take(solver, solver_block, "kind");
    take(gap, solver_block, "gap_target");
    take(node_limit, solver_block, "node_limit");
    take(time_limit, solver_block, "time_limit_seconds");
    const ha::Scenario s = instance.load(file);
    const ha::ObjectiveConfig cfg = instance.objective(s);
    const std::string kind = solver.value_or("bnb");
    ha::Solution sol;
    ha::BnbOptions options;
    if (kind == "bruteforce") {
      sol = ha::solve_bruteforce(s, cfg);
    } else if (kind == "greedy") {
      sol = ha::solve_greedy(s, cfg);
    } else if (kind == "bnb") {
      options.gap_target = gap.value_or(0.0);
      if (node_limit) options.node_limit = *node_limit;
      if (time_limit) options.time_limit_seconds = *time_limit;
      sol = ha::solve_bnb(s, cfg, options);
    } else {
      throw UsageError("unknown solver '" + kind + "'");
    }
    write_text(instance.out, ha::solution_to_json(sol).dump(1) + "\n");
    if (kind == "bnb" && sol.gap > options.gap_target + 1e-12) {
      std::cerr << "search limit reached with gap " << sol.gap << "\n";
      return kExitLimit;
    }
    return kExitOk;
  }
};

// ----------------------------------------------------------------------- check

struct Check {
  InstanceOptions instance;
  std::optional<std::string> schedule;

  void attach(CLI::App* app) {
    instance.attach(app);
    app->add_option("--schedule", schedule, "schedule or solution JSON file");
  }

  int run() {
    const json file = instance.merge();
    take(schedule, file, "schedule");
    if (!schedule) throw UsageError("check needs --schedule");
    const ha::Scenario s = instance.load(file);
    const ha::Schedule x = load_schedule(*schedule, s);
    const ha::FeasibilityReport report = ha::check_constraints(s, x);
    json out = ha::report_to_json(report);
    if (report.feasible()) {
      const ha::ObjectiveBreakdown b =
          ha::evaluate_schedule(s, x, instance.objective(s));
      out["objective"] = b.total;
    }
    write_text(instance.out, out.dump(1) + "\n");
    return report.feasible() ? kExitOk : kExitInvalid;
  }
};

// ------------------------------------------------------------------------- aoi

struct Aoi {
  InstanceOptions instance;
  std::optional<std::string> schedule;
  std::optional<std::string> trajectories;

  void attach(CLI::App* app) {
    instance.attach(app);
    app->add_option("--schedule", schedule, "schedule or solution JSON file");
    app->add_option("--trajectories", trajectories,
                    "write per-stream ages to this CSV file");
  }

  int run() {
    const json file = instance.merge();
    take(schedule, file, "schedule");
    take(trajectories, file, "trajectories");
    if (!schedule) throw UsageError("aoi needs --schedule");
    const ha::Scenario s = instance.load(file);
    const ha::Schedule x = load_schedule(*schedule, s);
    const ha::FeasibilityReport report = ha::check_constraints(s, x);
    if (!report.feasible()) throw ha::InfeasibleSchedule(report);
    write_text(instance.out,
               ha::aoi_to_json(ha::system_metrics(s, x)).dump(1) + "\n");
    if (trajectories) {
      std::string csv = "receiver,data_type,step,age\n";
      for (const ha::StreamKey& key : ha::receiver_streams(s)) {
        const ha::AoITrajectory t = ha::aoi_trajectory(s, x, key);
        for (std::size_t k = 0; k < t.age.size(); ++k) {
          csv += std::to_string(key.receiver) + "," +
                 std::to_string(key.data_type) + "," + std::to_string(k) +
                 "," + std::to_string(t.age[k]) + "\n";
        }
      }
      write_text(trajectories, csv);
    }
    return kExitOk;
  }
};

// ----------------------------------------------------------------------- sweep

struct SweepCommon {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<std::string> out;
  std::optional<std::vector<double>> grid;
  std::optional<double> gap;
  std::optional<unsigned> workers;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--seed", seed, "first seed");
    app->add_option("--seeds", seeds, "number of seeds");
    app->add_option("--out", out, "output directory")->required(false);
    app->add_option("--grid", grid, "comma-separated weight grid")
        ->delimiter(',');
    app->add_option("--gap", gap, "relative gap target");
    app->add_option("--workers", workers, "worker threads");
  }

  ha::SweepSettings settings(const json& file, const char* grid_key) {
    take(out, file, "out");
    take(grid, file, grid_key);
    ha::SweepSettings st;
    file.get_to(st);
    if (seed || seeds) {
      const std::uint64_t base =
          seed.value_or(st.seeds.empty() ? 0 : st.seeds.front());
      const int count = seeds.value_or(
          st.seeds.empty() ? 10 : static_cast<int>(st.seeds.size()));
      if (count < 1) throw UsageError("--seeds must be >= 1");
      st.seeds.clear();
      for (int t = 0; t < count; ++t) st.seeds.push_back(base + t);
    }
    if (st.seeds.empty()) {
      for (std::uint64_t t = 0; t < 10; ++t) st.seeds.push_back(t);
    }
    if (gap) st.gap_target = *gap;
    if (workers) st.workers = *workers;
    if (!out) throw UsageError("sweep needs --out");
    std::filesystem::create_directories(*out);
    return st;
  }
};

struct SweepAlpha1 {
  SweepCommon common;
  std::optional<std::string> tech;

  void attach(CLI::App* app) {
    common.attach(app);
    app->add_option("--tech", tech, "RF or OC")
        ->check(CLI::IsMember({"RF", "OC"}));
  }

  int run() {
    const json file = load_config(common.config);
    take(tech, file, "technology");
    const ha::SweepSettings st = common.settings(file, "alpha1_grid");
    const auto points = ha::pareto_sweep_alpha1(
        st, ha::technology_from_name(tech.value_or("RF")),
        common.grid.value_or(ha::default_alpha1_grid()));
    ha::write_pareto_csv(points,
                         std::filesystem::path(*common.out) / "pareto.csv");
    return kExitOk;
  }
};

struct SweepAlpha2 {
  SweepCommon common;
  std::optional<double> alpha1;
  std::optional<double> threshold;

  void attach(CLI::App* app) {
    common.attach(app);
    app->add_option("--alpha1", alpha1, "fixed energy weight (default 0.1)");
    app->add_option("--threshold", threshold,
                    "accepted deviation in percent (default 5)");
  }

  int run() {
    const json file = load_config(common.config);
    take(alpha1, file, "alpha1");
    take(threshold, file, "threshold_pct");
    const ha::SweepSettings st = common.settings(file, "alpha2_grid");
    const double a1 = alpha1.value_or(0.1);
    const auto results = ha::grid_search_alpha2(
        st, a1, threshold.value_or(5.0),
        common.grid.value_or(ha::default_alpha2_grid()));
    ha::write_alpha2_csv(
        results, std::filesystem::path(*common.out) / "alpha2_search.csv");
    for (const ha::Alpha2Result& r : results) {
      if (std::abs(a1 - 0.1) < 1e-12 && std::abs(r.alpha2 - 0.1) < 1e-12 &&
          r.accepted) {
        std::cout << "recommended weights (0.1, 0.1, 0.8) accepted\n";
      }
    }
    return kExitOk;
  }
};

// -------------------------------------------------------------------- campaign

ha::ExperimentConfig experiment_from(const json& j) {
  // A run manifest nests the experiment under "config".
  const json& body = j.contains("config") ? j.at("config") : j;
  ha::ExperimentConfig cfg;
  body.get_to(cfg);
  return cfg;
}

struct CampaignOverrides {
  std::optional<std::string> mode;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<double> gap;

  void attach(CLI::App* app) {
    app->add_option("--mode", mode, "RFOnly, OCOnly or Hybrid")
        ->check(CLI::IsMember({"RFOnly", "OCOnly", "Hybrid"}));
    app->add_option("--iterations", iterations, "Monte-Carlo iterations");
    app->add_option("--seed", seed, "seed of iteration 0");
    app->add_option("--workers", workers, "worker threads");
    app->add_option("--gap", gap, "relative gap target");
  }

  void apply(ha::ExperimentConfig& cfg, bool with_mode) const {
    if (with_mode && mode) cfg.mode = ha::mode_from_name(*mode);
    if (iterations) cfg.iterations = *iterations;
    if (seed) cfg.seed_base = *seed;
    if (workers) cfg.workers = *workers;
    if (gap) cfg.gap_target = *gap;
  }
};

struct CampaignRun {
  std::optional<std::string> config;
  std::optional<std::string> out;
  CampaignOverrides overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "experiment config or run manifest");
    app->add_option("--out", out, "output directory");
    overrides.attach(app);
  }

  int run() {
    const json file = load_config(config);
    take(out, file, "out");
    if (!out) throw UsageError("campaign run needs --out");
    ha::ExperimentConfig cfg = experiment_from(file);
    overrides.apply(cfg, true);
    const ha::CampaignResult result = ha::run_campaign(cfg);
    ha::emit_outputs(result, *out);
    int failed = 0;
    for (const auto& r : result.records) failed += r.ok ? 0 : 1;
    if (failed > 0) std::cerr << failed << " iteration(s) failed\n";
    return kExitOk;
  }
};

struct CampaignCompare {
  std::vector<std::string> configs;
  std::optional<std::string> out;
  bool paired = false;
  CampaignOverrides overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", configs,
                    "experiment configs (repeat), or one file with a "
                    "\"configs\" list")
        ->required();
    app->add_option("--out", out, "output directory");
    app->add_flag("--paired", paired, "run every config on the same seeds");
    overrides.attach(app);
  }

  int run() {
    std::vector<ha::ExperimentConfig> cfgs;
    for (const std::string& path : configs) {
      const json file = ha::read_json_file(path);
      take(out, file, "out");
      if (auto it = file.find("paired_seeds"); it != file.end()) {
        paired = paired || it->get<bool>();
      }
      if (auto it = file.find("configs"); it != file.end()) {
        for (const json& entry : *it) cfgs.push_back(experiment_from(entry));
      } else if (auto c = file.find("campaigns"); c != file.end()) {
        for (const json& entry : *c) cfgs.push_back(experiment_from(entry));
      } else {
        cfgs.push_back(experiment_from(file));
      }
    }
    if (!out) throw UsageError("campaign compare needs --out");
    if (cfgs.size() < 2) throw UsageError("campaign compare needs two configs");
    for (ha::ExperimentConfig& cfg : cfgs) overrides.apply(cfg, false);
    ha::emit_outputs(ha::compare_modes(cfgs, paired), *out);
    return kExitOk;
  }
};

// ------------------------------------------------------------------- export lp

struct ExportLp {
  InstanceOptions instance;

  void attach(CLI::App* app) { instance.attach(app); }

  int run() {
    const json file = instance.merge();
    const ha::Scenario s = instance.load(file);
    const ha::LinearModel model = ha::build_milp(s, instance.objective(s));
    if (instance.out) {
      ha::export_lp(model, *instance.out);
    } else {
      ha::write_lp(model, std::cout);
    }
    return kExitOk;
  }
};

int classify(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const ha::SolverLimitError*>(&e) ||
      dynamic_cast<const std::bad_alloc*>(&e)) {
    return kExitLimit;
  }
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid RF/OC IoT scheduling and Age-of-Information toolkit"};
  app.require_subcommand(1);

  ScenarioGen scenario_gen;
  Solve solve;
  Check check;
  Aoi aoi;
  SweepAlpha1 sweep_alpha1;
  SweepAlpha2 sweep_alpha2;
  CampaignRun campaign_run;
  CampaignCompare campaign_compare;
  ExportLp export_lp;

  auto* scenario = app.add_subcommand("scenario", "scenario files");
  scenario->require_subcommand(1);
  scenario_gen.attach(scenario->add_subcommand("gen", "generate a scenario"));
  solve.attach(app.add_subcommand("solve", "compute a schedule"));
  check.attach(app.add_subcommand("check", "check a schedule's constraints"));
  aoi.attach(app.add_subcommand("aoi", "AoI metrics of a schedule"));
  auto* sweep = app.add_subcommand("sweep", "objective weight sweeps");
  sweep->require_subcommand(1);
  sweep_alpha1.attach(sweep->add_subcommand("alpha1", "energy/delay front"));
  sweep_alpha2.attach(sweep->add_subcommand("alpha2", "switching weight search"));
  auto* campaign = app.add_subcommand("campaign", "Monte-Carlo campaigns");
  campaign->require_subcommand(1);
  campaign_run.attach(campaign->add_subcommand("run", "run one experiment"));
  campaign_compare.attach(
      campaign->add_subcommand("compare", "compare experiments"));
  auto* export_cmd = app.add_subcommand("export", "model export");
  export_cmd->require_subcommand(1);
  export_lp.attach(export_cmd->add_subcommand("lp", "write the MILP as LP"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (scenario->got_subcommand("gen")) return scenario_gen.run();
    if (app.got_subcommand("solve")) return solve.run();
    if (app.got_subcommand("check")) return check.run();
    if (app.got_subcommand("aoi")) return aoi.run();
    if (sweep->got_subcommand("alpha1")) return sweep_alpha1.run();
    if (sweep->got_subcommand("alpha2")) return sweep_alpha2.run();
    if (campaign->got_subcommand("run")) return campaign_run.run();
    if (campaign->got_subcommand("compare")) return campaign_compare.run();
    if (export_cmd->got_subcommand("lp")) return export_lp.run();
  } catch (const json::exception& e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  }
  std::cerr << app.help();
  return kExitUsage;
}
