#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "hybrid_aoi/campaign.hpp"
#include "hybrid_aoi/json_io.hpp"

using namespace hybrid_aoi;

namespace {

ExperimentConfig small_config(Mode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.generation.n_nodes = 4;
  cfg.generation.n_aps = 2;
  cfg.generation.horizon = 8;
  cfg.generation.pair_probability = 0.4;
  cfg.generation.messages_per_pair_max = 2;
  cfg.iterations = 4;
  cfg.seed_base = 100;
  cfg.gap_target = 0.0;
  return cfg;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(split(line));
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir =
      std::filesystem::temp_directory_path() / "hybrid_aoi_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::optional<double> metric(const IterationRecord& r, const std::string& name,
                             int n_types) {
  for (const auto& [key, value] : record_metrics(r, n_types)) {
    if (key == name) return value;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(std::string(mode_name(Mode::kRFOnly)) == "RFOnly");
  CHECK(mode_from_name("Hybrid") == Mode::kHybrid);
  CHECK_THROWS_AS(mode_from_name("Optical"), std::invalid_argument);
  CHECK(mode_technologies(Mode::kOCOnly) == std::array<bool, 2>{false, true});
}

TEST_CASE("config validation and sweep points") {
  ExperimentConfig cfg = small_config(Mode::kHybrid);
  CHECK_NOTHROW(cfg.validate());
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config(Mode::kHybrid);
  cfg.alpha = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config(Mode::kHybrid);
  CHECK(sweep_points(cfg) == std::vector<SweepPoint>{{4, 2}});
  cfg.sweep.vary_nodes = {3, 5};
  cfg.sweep.vary_aps = {1, 2};
  CHECK(sweep_points(cfg) ==
        std::vector<SweepPoint>{{3, 1}, {3, 2}, {5, 1}, {5, 2}});
  CHECK(cfg.display_label() == "Hybrid");
}

TEST_CASE("campaign records are deterministic across worker counts") {
  ExperimentConfig cfg = small_config(Mode::kHybrid);
  cfg.sweep.vary_aps = {1, 2};
  const CampaignResult a = run_campaign(cfg);
  cfg.workers = 3;
  const CampaignResult b = run_campaign(cfg);
  REQUIRE(a.records.size() == 8u);
  REQUIRE(b.records.size() == 8u);
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    CHECK(a.records[r].seed == b.records[r].seed);
    CHECK(a.records[r].objective.total == b.records[r].objective.total);
    CHECK(a.records[r].aoi.mean_aoi == b.records[r].aoi.mean_aoi);
    CHECK(a.records[r].seed == cfg.seed_base + a.records[r].iteration);
  }
  const auto da = fresh_dir("det_a");
  const auto db = fresh_dir("det_b");
  emit_outputs(a, da);
  emit_outputs(b, db);
  for (const char* name : {"iterations.csv", "aggregates.csv",
                           "aoi_trajectories.csv"}) {
    CHECK(read_file(da / name) == read_file(db / name));
  }
}

TEST_CASE("OC-only campaigns never use RF") {
  const CampaignResult result = run_campaign(small_config(Mode::kOCOnly));
  for (const IterationRecord& r : result.records) {
    REQUIRE(r.ok);
    CHECK(r.n_rf == 0);
    CHECK(r.n_oc == r.n_sent);
    CHECK(r.transmission_rate >= 0.0);
    CHECK(r.transmission_rate <= 1.0);
  }
}

TEST_CASE("campaign fails when no iteration can be solved") {
  ExperimentConfig cfg = small_config(Mode::kHybrid);
  cfg.generation.messages_per_pair_min = 0;
  cfg.generation.messages_per_pair_max = 0;
  CHECK_THROWS_AS(run_campaign(cfg), CampaignError);
}

TEST_CASE("comparing a config with itself gives zero deltas") {
  const ExperimentConfig cfg = small_config(Mode::kHybrid);
  const ComparisonTable table = compare_modes({cfg, cfg}, true);
  REQUIRE(!table.deltas.empty());
  for (const PairedDelta& d : table.deltas) CHECK(d.delta == 0.0);
  for (const SignSummary& s : table.signs) {
    CHECK(s.negative == 0);
    CHECK(s.positive == 0);
  }
}

TEST_CASE("swapping the reference negates the deltas") {
  const ExperimentConfig rf = small_config(Mode::kRFOnly);
  const ExperimentConfig hybrid = small_config(Mode::kHybrid);
  const ComparisonTable forward = compare_modes({rf, hybrid}, true);
  const ComparisonTable backward = compare_modes({hybrid, rf}, true);
  REQUIRE(forward.deltas.size() == backward.deltas.size());
  std::map<std::pair<std::uint64_t, std::string>, double> by_key;
  for (const PairedDelta& d : forward.deltas) by_key[{d.seed, d.metric}] = d.delta;
  for (const PairedDelta& d : backward.deltas) {
    CHECK(by_key.at({d.seed, d.metric}) == -d.delta);
  }
  // Hybrid can only do at least as well on the objective.
  for (const PairedDelta& d : forward.deltas) {
    if (d.metric == "objective_total") CHECK(d.delta <= 1e-12);
  }
}

TEST_CASE("comparisons reject mismatched sweeps") {
  ExperimentConfig a = small_config(Mode::kRFOnly);
  ExperimentConfig b = small_config(Mode::kHybrid);
  b.sweep.vary_aps = {1, 2};
  CHECK_THROWS_AS(compare_modes({a, b}, true), std::invalid_argument);
  CHECK_THROWS_AS(compare_modes({a}, true), std::invalid_argument);
}

TEST_CASE("aggregates match the per-iteration file") {
  ExperimentConfig cfg = small_config(Mode::kHybrid);
  cfg.iterations = 5;
  const CampaignResult result = run_campaign(cfg);
  const auto dir = fresh_dir("aggregates");
  emit_outputs(result, dir);

  const auto rows = read_csv(dir / "iterations.csv");
  REQUIRE(rows.size() == 6u);
  const std::vector<std::string>& header = rows[0];
  std::map<std::string, std::vector<double>> columns;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r].size() == header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!rows[r][c].empty()) {
        char* end = nullptr;
        const double v = std::strtod(rows[r][c].c_str(), &end);
        if (*end == '\0') columns[header[c]].push_back(v);
      }
    }
  }

  const auto aggregates = read_csv(dir / "aggregates.csv");
  REQUIRE(aggregates[0] == std::vector<std::string>{
                               "point", "n_nodes", "n_aps", "mode", "metric",
                               "mean", "std", "count", "failed"});
  int checked = 0;
  for (std::size_t r = 1; r < aggregates.size(); ++r) {
    const std::string& name = aggregates[r][4];
    const std::vector<double>& values = columns[name];
    REQUIRE(static_cast<int>(values.size()) == std::stoi(aggregates[r][7]));
    if (values.empty()) continue;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd =
        values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
    CHECK(std::abs(std::stod(aggregates[r][5]) - mean) <= 1e-9);
    CHECK(std::abs(std::stod(aggregates[r][6]) - sd) <= 1e-9);
    ++checked;
  }
  CHECK(checked >= 11);
}

TEST_CASE("trajectory file holds every stream for every step") {
  const ExperimentConfig cfg = small_config(Mode::kHybrid);
  const CampaignResult result = run_campaign(cfg);
  const auto dir = fresh_dir("trajectories");
  emit_outputs(result, dir);
  std::size_t expected = 0;
  for (const IterationRecord& r : result.records) {
    CHECK(r.trajectories.size() == r.aoi.per_stream.size());
    expected += r.trajectories.size() * cfg.generation.horizon;
  }
  CHECK(read_csv(dir / "aoi_trajectories.csv").size() == expected + 1);
}

TEST_CASE("record metrics follow the fixed order") {
  const CampaignResult result = run_campaign(small_config(Mode::kRFOnly));
  const IterationRecord& r = result.records.front();
  const auto metrics = record_metrics(r, 2);
  REQUIRE(metrics.size() == 15u);
  CHECK(metrics[0].first == "objective_total");
  CHECK(metrics[10].first == "peak_aoi");
  CHECK(metrics[11].first == "mean_aoi_type0");
  CHECK(*metric(r, "mean_aoi", 2) == r.aoi.mean_aoi);
  CHECK(*metric(r, "switches", 2) == r.switches);

  IterationRecord failed = r;
  failed.ok = false;
  for (const auto& [name, value] : record_metrics(failed, 2)) {
    CHECK(!value.has_value());
  }
}

TEST_CASE("a manifest reproduces its campaign") {
  ExperimentConfig cfg = small_config(Mode::kHybrid);
  cfg.label = "repro";
  const auto first = fresh_dir("manifest_a");
  emit_outputs(run_campaign(cfg), first);
  std::ifstream in(first / "manifest.json");
  const nlohmann::json manifest = nlohmann::json::parse(in);
  CHECK(manifest.at("artifact_version") == kArtifactVersion);
  const ExperimentConfig back =
      manifest.at("config").get<ExperimentConfig>();
  const auto second = fresh_dir("manifest_b");
  emit_outputs(run_campaign(back), second);
  for (const char* name : {"iterations.csv", "aggregates.csv",
                           "aoi_trajectories.csv", "manifest.json"}) {
    CHECK(read_file(first / name) == read_file(second / name));
  }
}
