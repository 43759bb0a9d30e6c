#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "hybrid_aoi/json_io.hpp"
#include "hybrid_aoi/scenario.hpp"
#include "support.hpp"

using namespace hybrid_aoi;
using hybrid_aoi::testing::add_message;
using hybrid_aoi::testing::blank_scenario;

namespace {

std::string invariant_of(const std::string& text) {
  try {
    scenario_from_string(text);
  } catch (const ScenarioError& e) {
    return e.invariant();
  }
  return "";
}

// Mean of Normal(mu, sigma) truncated to [0, 1], in closed form.
double truncated_normal_mean(double mu, double sigma) {
  auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); };
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double a = (0.0 - mu) / sigma;
  const double b = (1.0 - mu) / sigma;
  return mu + sigma * (pdf(a) - pdf(b)) / (cdf(b) - cdf(a));
}

}  // namespace

TEST_CASE("generated scenario has the configured shape") {
  GenerationConfig cfg;
  cfg.n_nodes = 8;
  cfg.n_aps = 5;
  cfg.horizon = 20;
  const Scenario s = generate_scenario(cfg, 1);
  CHECK(s.n_devices() == 13);
  CHECK(s.horizon == 20);
  CHECK(s.visibility.raw().size() == 2u * 13 * 13 * 20);
  CHECK(s.energy.budget[0].size() == 13u);
}

TEST_CASE("zero messages per pair yields a valid empty instance") {
  GenerationConfig cfg;
  cfg.messages_per_pair_min = 0;
  cfg.messages_per_pair_max = 0;
  cfg.pair_probability = 1.0;
  const Scenario s = generate_scenario(cfg, 5);
  CHECK(s.messages.empty());
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("same seed gives a byte-identical serialized scenario") {
  const GenerationConfig cfg;
  CHECK(scenario_to_string(generate_scenario(cfg, 42)) ==
        scenario_to_string(generate_scenario(cfg, 42)));
  CHECK(scenario_to_string(generate_scenario(cfg, 42)) !=
        scenario_to_string(generate_scenario(cfg, 43)));
}

TEST_CASE("demand tensor covers exactly the message windows") {
  Scenario s = blank_scenario(3, 0, 8);
  add_message(s, 0, 2, 3, 5);
  const DemandTensor rho = derive_demand(s);
  for (int k = 0; k < 8; ++k) {
    CHECK(rho.at(0, 2, k) == (k >= 3 && k <= 5 ? 1 : 0));
  }
  CHECK(rho.count() == 3u);

  CHECK(derive_demand(blank_scenario(3, 0, 8)).count() == 0u);

  Scenario two = blank_scenario(2, 0, 6);
  add_message(two, 0, 1, 0, 1);
  add_message(two, 0, 1, 4, 4);
  const DemandTensor rho2 = derive_demand(two);
  int ones = 0;
  for (int k = 0; k < 6; ++k) ones += rho2.at(0, 1, k);
  CHECK(ones == 3);
}

TEST_CASE("scenario round-trips through its file format") {
  const auto dir = std::filesystem::temp_directory_path() / "hybrid_aoi_tests";
  std::filesystem::create_directories(dir);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenerationConfig cfg;
    cfg.split_energy_accounting = seed % 2 == 1;
    cfg.enabled = {true, seed != 3};
    const Scenario s = generate_scenario(cfg, seed);
    const auto path = dir / ("scenario_" + std::to_string(seed) + ".json");
    save_scenario(s, path);
    CHECK(load_scenario(path) == s);
    CHECK(scenario_from_string(scenario_to_string(s)) == s);
  }
}

TEST_CASE("malformed scenario files name the violated invariant") {
  Scenario s = blank_scenario(2, 1, 4);
  add_message(s, 0, 2, 0, 1);
  const std::string good = scenario_to_string(s);
  CHECK(invariant_of(good).empty());

  SUBCASE("optical link between two nodes") {
    Scenario bad = s;
    bad.visibility.set_symmetric(Technology::kOC, 0, 1, 2, 0.5);
    CHECK(invariant_of(scenario_to_string(bad)) == "visibility.oc_node_node_zero");
  }
  SUBCASE("overlapping windows of one pair") {
    nlohmann::json j = nlohmann::json::parse(good);
    j["messages"].push_back({{"sender", 0}, {"receiver", 2}, {"ordinal", 1},
                             {"data_type", 0}, {"window", {1, 2}}});
    CHECK(invariant_of(j.dump()) == "messages.windows_disjoint");
  }
  SUBCASE("asymmetric visibility") {
    Scenario bad = s;
    bad.visibility.set(Technology::kRF, 0, 1, 0, 0.3);
    CHECK(invariant_of(scenario_to_string(bad)) == "visibility.symmetric");
  }
  SUBCASE("link between access points") {
    Scenario bad = blank_scenario(1, 2, 3);
    bad.visibility.set_symmetric(Technology::kRF, 1, 2, 0, 0.9);
    CHECK(invariant_of(scenario_to_string(bad)) == "visibility.ap_ap_zero");
  }
  SUBCASE("tau not above the longest window") {
    nlohmann::json j = nlohmann::json::parse(good);
    j["tau"] = 2;
    CHECK(invariant_of(j.dump()) == "tau.exceeds_longest_window");
  }
  SUBCASE("data type out of range") {
    nlohmann::json j = nlohmann::json::parse(good);
    j["messages"][0]["data_type"] = 3;
    CHECK(invariant_of(j.dump()) == "messages.data_type_range");
  }
  SUBCASE("missing field") {
    nlohmann::json j = nlohmann::json::parse(good);
    j.erase("visibility");
    CHECK(invariant_of(j.dump()) == "file.schema");
  }
  SUBCASE("not JSON") {
    CHECK(invariant_of("{ nope") == "file.syntax");
  }
}

TEST_CASE("generated instances satisfy every invariant") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GenerationConfig cfg;
    cfg.pair_probability = 0.6;
    const Scenario s = generate_scenario(cfg, seed);
    CHECK_NOTHROW(s.validate());
    // Disjoint windows per pair, checked independently of validate().
    std::map<std::pair<int, int>, std::vector<int>> used;
    for (const Message& m : s.messages) {
      auto& steps = used[{m.sender, m.receiver}];
      for (int k = m.window_start; k <= m.window_end; ++k) {
        CHECK(std::find(steps.begin(), steps.end(), k) == steps.end());
        steps.push_back(k);
      }
      CHECK(m.window_length() >= 1);
      CHECK(m.window_length() <= 4);
    }
    CHECK(s.tau == s.max_window_length() + 1);
  }
}

TEST_CASE("RF visibility follows the truncated normal") {
  GenerationConfig cfg;
  cfg.n_nodes = 20;
  cfg.n_aps = 0;
  cfg.horizon = 60;
  const Scenario s = generate_scenario(cfg, 7);
  double sum = 0.0;
  int count = 0;
  const int n = s.n_devices();
  for (int k = 0; k < s.horizon; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double v = s.visibility.at(Technology::kRF, i, j, k);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
        ++count;
      }
    }
  }
  REQUIRE(count >= 10000);
  CHECK(std::abs(sum / count - truncated_normal_mean(0.85, 0.1)) < 0.02);

  // Direct rejection sampler as a second oracle.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.85, 0.1);
  double oracle = 0.0;
  for (int t = 0; t < count; ++t) {
    double v;
    do {
      v = normal(rng);
    } while (v < 0.0 || v > 1.0);
    oracle += v;
  }
  CHECK(std::abs(sum / count - oracle / count) < 0.02);
}

TEST_CASE("generation rejects windows that cannot fit the horizon") {
  GenerationConfig cfg;
  cfg.horizon = 4;
  cfg.pair_probability = 1.0;
  cfg.messages_per_pair_min = 2;
  cfg.messages_per_pair_max = 2;
  cfg.window_length_min = 3;
  cfg.window_length_max = 3;
  CHECK_THROWS_WITH_AS(generate_scenario(cfg, 0),
                       doctest::Contains("windows of pair"),
                       std::invalid_argument);
}

TEST_CASE("generation config validation") {
  GenerationConfig cfg;
  cfg.pair_probability = 1.5;
  CHECK_THROWS_AS(generate_scenario(cfg, 0), std::invalid_argument);
  cfg = GenerationConfig{};
  cfg.horizon = 0;
  CHECK_THROWS_AS(generate_scenario(cfg, 0), std::invalid_argument);
}

TEST_CASE("technology restriction only changes the enabled flags") {
  const Scenario s = generate_scenario(GenerationConfig{}, 3);
  const Scenario rf = restrict_technologies(s, {true, false});
  CHECK(rf.visibility == s.visibility);
  CHECK(rf.messages == s.messages);
  CHECK(!rf.link_usable(Technology::kOC, 0, s.n_nodes, 0));
}

TEST_CASE("generation config JSON keeps defaults for missing keys") {
  GenerationConfig cfg;
  nlohmann::json j = nlohmann::json::parse(R"({"n_nodes": 4,
      "visibility_mean": {"RF": 0.5, "OC": 0.6}, "enabled": ["OC"]})");
  j.get_to(cfg);
  CHECK(cfg.n_nodes == 4);
  CHECK(cfg.n_aps == 2);
  CHECK(cfg.visibility_mean[0] == 0.5);
  CHECK(cfg.enabled == std::array<bool, 2>{false, true});
  GenerationConfig back;
  nlohmann::json(cfg).get_to(back);
  CHECK(nlohmann::json(back) == nlohmann::json(cfg));
}
