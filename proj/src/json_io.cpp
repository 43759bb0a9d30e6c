#include "hybrid_aoi/json_io.hpp"

#include <fstream>
#include <sstream>

namespace hybrid_aoi {

using nlohmann::json;

namespace {

json per_technology(const std::array<double, kNumTechnologies>& v) {
  return json{{"RF", v[0]}, {"OC", v[1]}};
}

std::array<double, kNumTechnologies> per_technology_from(const json& j) {
  return {j.at("RF").get<double>(), j.at("OC").get<double>()};
}

json enabled_list(const std::array<bool, kNumTechnologies>& enabled) {
  json out = json::array();
  for (Technology m : kAllTechnologies) {
    if (enabled[index_of(m)]) out.push_back(technology_name(m));
  }
  return out;
}

std::array<bool, kNumTechnologies> enabled_from(const json& j) {
  std::array<bool, kNumTechnologies> enabled{false, false};
  for (const auto& name : j) {
    enabled[index_of(technology_from_name(name.get<std::string>()))] = true;
  }
  return enabled;
}

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void read_optional_per_technology(const json& j, const char* key,
                                  std::array<double, kNumTechnologies>& out) {
  if (auto it = j.find(key); it != j.end()) out = per_technology_from(*it);
}

}  // namespace

void to_json(json& j, const GenerationConfig& c) {
  j = json{{"n_nodes", c.n_nodes},
           {"n_aps", c.n_aps},
           {"n_types", c.n_types},
           {"horizon", c.horizon},
           {"visibility_mean", per_technology(c.visibility_mean)},
           {"visibility_std", c.visibility_std},
           {"thresholds", per_technology(c.thresholds)},
           {"budget_min", c.budget_min},
           {"budget_max", c.budget_max},
           {"send_cost", per_technology(c.send_cost)},
           {"receive_cost", per_technology(c.receive_cost)},
           {"split_energy_accounting", c.split_energy_accounting},
           {"pair_probability", c.pair_probability},
           {"messages_per_pair_min", c.messages_per_pair_min},
           {"messages_per_pair_max", c.messages_per_pair_max},
           {"window_length_min", c.window_length_min},
           {"window_length_max", c.window_length_max},
           {"enabled", enabled_list(c.enabled)}};
}

void from_json(const json& j, GenerationConfig& c) {
  read_optional(j, "n_nodes", c.n_nodes);
  read_optional(j, "n_aps", c.n_aps);
  read_optional(j, "n_types", c.n_types);
  read_optional(j, "horizon", c.horizon);
  read_optional_per_technology(j, "visibility_mean", c.visibility_mean);
  read_optional(j, "visibility_std", c.visibility_std);
  read_optional_per_technology(j, "thresholds", c.thresholds);
  read_optional(j, "budget_min", c.budget_min);
  read_optional(j, "budget_max", c.budget_max);
  read_optional_per_technology(j, "send_cost", c.send_cost);
  read_optional_per_technology(j, "receive_cost", c.receive_cost);
  read_optional(j, "split_energy_accounting", c.split_energy_accounting);
  read_optional(j, "pair_probability", c.pair_probability);
  read_optional(j, "messages_per_pair_min", c.messages_per_pair_min);
  read_optional(j, "messages_per_pair_max", c.messages_per_pair_max);
  read_optional(j, "window_length_min", c.window_length_min);
  read_optional(j, "window_length_max", c.window_length_max);
  if (auto it = j.find("enabled"); it != j.end()) c.enabled = enabled_from(*it);
}

json scenario_to_json(const Scenario& s) {
  const int n = s.n_devices();
  json budget = json::array();
  for (Technology m : kAllTechnologies) {
    for (double b : s.energy.budget[index_of(m)]) budget.push_back(b);
  }
  json messages = json::array();
  for (const Message& msg : s.messages) {
    messages.push_back({{"sender", msg.sender},
                        {"receiver", msg.receiver},
                        {"ordinal", msg.ordinal},
                        {"data_type", msg.data_type},
                        {"window", {msg.window_start, msg.window_end}}});
  }
  return json{
      {"schema_version", kSchemaVersion},
      {"kind", "scenario"},
      {"n_nodes", s.n_nodes},
      {"n_aps", s.n_aps},
      {"n_types", s.n_types},
      {"horizon", s.horizon},
      {"tau", s.tau},
      {"thresholds", per_technology(s.thresholds)},
      {"enabled", enabled_list(s.enabled)},
      {"energy",
       {{"send_cost", per_technology(s.energy.send_cost)},
        {"receive_cost", per_technology(s.energy.receive_cost)},
        {"split_accounting", s.energy.split_accounting},
        {"budget",
         {{"shape", {kNumTechnologies, n}},
          {"order", "m,i"},
          {"data", std::move(budget)}}}}},
      {"visibility",
       {{"shape", {kNumTechnologies, n, n, s.horizon}},
        {"order", "m,i,j,k"},
        {"data", s.visibility.raw()}}},
      {"messages", std::move(messages)}};
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ScenarioError("file.schema_version",
                          "unsupported version " + j["schema_version"].dump());
    }
    if (j.at("kind").get<std::string>() != "scenario") {
      throw ScenarioError("file.schema", "document kind is not 'scenario'");
    }
    s.n_nodes = j.at("n_nodes").get<int>();
    s.n_aps = j.at("n_aps").get<int>();
    s.n_types = j.at("n_types").get<int>();
    s.horizon = j.at("horizon").get<int>();
    s.tau = j.at("tau").get<int>();
    s.thresholds = per_technology_from(j.at("thresholds"));
    s.enabled = enabled_from(j.at("enabled"));
    const int n = s.n_devices();
    if (n < 1 || s.horizon < 1) {
      throw ScenarioError("file.schema", "N and T must be positive");
    }

    const json& energy = j.at("energy");
    s.energy.send_cost = per_technology_from(energy.at("send_cost"));
    s.energy.receive_cost = per_technology_from(energy.at("receive_cost"));
    s.energy.split_accounting = energy.at("split_accounting").get<bool>();
    const json& budget = energy.at("budget");
    if (budget.at("shape") != json{kNumTechnologies, n}) {
      throw ScenarioError("energy.shape", "budget shape header mismatch");
    }
    const auto budget_data = budget.at("data").get<std::vector<double>>();
    if (budget_data.size() != static_cast<std::size_t>(kNumTechnologies) * n) {
      throw ScenarioError("energy.shape", "budget data length mismatch");
    }
    for (int t = 0; t < kNumTechnologies; ++t) {
      s.energy.budget[t].assign(budget_data.begin() + t * n,
                                budget_data.begin() + (t + 1) * n);
    }

    const json& vis = j.at("visibility");
    if (vis.at("shape") != json{kNumTechnologies, n, n, s.horizon}) {
      throw ScenarioError("visibility.shape", "shape header mismatch");
    }
    s.visibility = VisibilityTensor(n, s.horizon);
    auto data = vis.at("data").get<std::vector<double>>();
    if (data.size() != s.visibility.raw().size()) {
      throw ScenarioError("visibility.shape", "data length mismatch");
    }
    s.visibility.raw() = std::move(data);

    for (const json& m : j.at("messages")) {
      Message msg;
      msg.sender = m.at("sender").get<int>();
      msg.receiver = m.at("receiver").get<int>();
      msg.ordinal = m.at("ordinal").get<int>();
      msg.data_type = m.at("data_type").get<int>();
      const auto window = m.at("window").get<std::vector<int>>();
      if (window.size() != 2) {
        throw ScenarioError("file.schema", "window must be [start, end]");
      }
      msg.window_start = window[0];
      msg.window_end = window[1];
      s.messages.push_back(msg);
    }
  } catch (const json::exception& e) {
    throw ScenarioError("file.schema", e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("file.schema", e.what());
  }
  s.validate();
  return s;
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"label", c.label},
           {"generation", c.generation},
           {"mode", mode_name(c.mode)},
           {"alpha", c.alpha},
           {"solver",
            {{"gap_target", c.gap_target},
             {"node_limit", c.node_limit},
             {"time_limit_seconds", c.time_limit_seconds}}},
           {"iterations", c.iterations},
           {"seed_base", c.seed_base},
           {"workers", c.workers},
           {"sweep",
            {{"vary_nodes", c.sweep.vary_nodes},
             {"vary_aps", c.sweep.vary_aps}}},
           {"record_trajectories", c.record_trajectories}};
}

void from_json(const json& j, ExperimentConfig& c) {
  try {
    read_optional(j, "label", c.label);
    if (auto it = j.find("generation"); it != j.end()) {
      it->get_to(c.generation);
    }
    if (auto it = j.find("mode"); it != j.end()) {
      c.mode = mode_from_name(it->get<std::string>());
    }
    read_optional(j, "alpha", c.alpha);
    if (auto it = j.find("solver"); it != j.end()) {
      read_optional(*it, "gap_target", c.gap_target);
      read_optional(*it, "node_limit", c.node_limit);
      read_optional(*it, "time_limit_seconds", c.time_limit_seconds);
    }
    read_optional(j, "iterations", c.iterations);
    read_optional(j, "seed_base", c.seed_base);
    read_optional(j, "workers", c.workers);
    if (auto it = j.find("sweep"); it != j.end()) {
      read_optional(*it, "vary_nodes", c.sweep.vary_nodes);
      read_optional(*it, "vary_aps", c.sweep.vary_aps);
    }
    read_optional(j, "record_trajectories", c.record_trajectories);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
}

void to_json(json& j, const SweepSettings& c) {
  j = json{{"generation", c.generation},
           {"seeds", c.seeds},
           {"gap_target", c.gap_target},
           {"node_limit", c.node_limit},
           {"time_limit_seconds", c.time_limit_seconds},
           {"workers", c.workers}};
}

void from_json(const json& j, SweepSettings& c) {
  try {
    if (auto it = j.find("generation"); it != j.end()) {
      it->get_to(c.generation);
    }
    if (auto it = j.find("seeds"); it != j.end()) {
      c.seeds = it->get<std::vector<std::uint64_t>>();
    } else if (j.contains("seed_base") || j.contains("seed_count")) {
      std::uint64_t base = 0;
      int count = 1;
      read_optional(j, "seed_base", base);
      read_optional(j, "seed_count", count);
      if (count < 1) throw std::invalid_argument("seed_count must be >= 1");
      c.seeds.clear();
      for (int t = 0; t < count; ++t) c.seeds.push_back(base + t);
    }
    read_optional(j, "gap_target", c.gap_target);
    read_optional(j, "node_limit", c.node_limit);
    read_optional(j, "time_limit_seconds", c.time_limit_seconds);
    read_optional(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
}

json schedule_to_json(const Schedule& x) {
  json tx = json::array();
  for (const Transmission& t : x.transmissions()) {
    tx.push_back({{"sender", t.sender},
                  {"receiver", t.receiver},
                  {"tech", technology_name(t.tech)},
                  {"step", t.step}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"kind", "schedule"},
              {"n_devices", x.n_devices()},
              {"horizon", x.horizon()},
              {"transmissions", std::move(tx)}};
}

Schedule schedule_from_json(const json& j, const Scenario& s) {
  try {
    if (j.at("kind").get<std::string>() != "schedule") {
      throw ScenarioError("file.schema", "document kind is not 'schedule'");
    }
    if (j.at("n_devices").get<int>() != s.n_devices() ||
        j.at("horizon").get<int>() != s.horizon) {
      throw ScenarioError("file.schema",
                          "schedule shape does not match the scenario");
    }
    Schedule x = Schedule::empty_for(s);
    for (const json& t : j.at("transmissions")) {
      const Transmission tx{
          t.at("sender").get<int>(), t.at("receiver").get<int>(),
          technology_from_name(t.at("tech").get<std::string>()),
          t.at("step").get<int>()};
      if (!x.add(tx)) {
        throw ScenarioError("file.schema", "duplicate transmission");
      }
    }
    return x;
  } catch (const json::exception& e) {
    throw ScenarioError("file.schema", e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("file.schema", e.what());
  }
}

json report_to_json(const FeasibilityReport& report) {
  json violations = json::array();
  for (const Violation& v : report.violations) {
    json indices = json::object();
    for (const auto& [name, value] : v.indices) indices[name] = value;
    violations.push_back({{"constraint", static_cast<int>(v.id)},
                          {"name", constraint_name(v.id)},
                          {"indices", std::move(indices)},
                          {"detail", v.detail}});
  }
  return json{{"feasible", report.feasible()},
              {"violations", std::move(violations)}};
}

json solution_to_json(const Solution& sol) {
  const ObjectiveBreakdown& b = sol.objective;
  return json{
      {"schedule", schedule_to_json(sol.schedule)},
      {"objective",
       {{"total", b.total},
        {"energy_raw", b.energy_raw},
        {"switching_raw", b.switching_raw},
        {"delay_raw", b.delay_raw},
        {"energy_normalized", b.energy_normalized},
        {"switching_normalized", b.switching_normalized},
        {"delay_normalized", b.delay_normalized}}},
      {"proof", proof_name(sol.proof)},
      {"gap", sol.gap},
      {"nodes", sol.stats.nodes},
      {"best_bound", sol.stats.best_bound}};
}

json aoi_to_json(const AoIMetrics& m) {
  json per_type = json::array();
  for (const auto& [type, summary] : m.per_type) {
    per_type.push_back(
        {{"data_type", type}, {"mean", summary.mean}, {"peak", summary.peak}});
  }
  json per_stream = json::array();
  for (const auto& [key, summary] : m.per_stream) {
    json entry{{"receiver", key.receiver},
               {"data_type", key.data_type},
               {"mean", summary.mean},
               {"peak", summary.peak}};
    if (key.sender) entry["sender"] = *key.sender;
    per_stream.push_back(std::move(entry));
  }
  return json{{"mean_aoi", m.mean_aoi},
              {"peak_aoi", m.peak_aoi},
              {"per_type", std::move(per_type)},
              {"per_stream", std::move(per_stream)}};
}

std::string scenario_to_string(const Scenario& s) {
  return scenario_to_json(s).dump(1) + "\n";
}

Scenario scenario_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("file.syntax", e.what());
  }
  return scenario_from_json(j);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("file.syntax", path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_string(s);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_string(buffer.str());
}

}  // namespace hybrid_aoi
