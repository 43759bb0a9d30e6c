#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hybrid_aoi/sweep.hpp"
#include "support.hpp"

using namespace hybrid_aoi;
using hybrid_aoi::testing::add_message;
using hybrid_aoi::testing::blank_scenario;
using hybrid_aoi::testing::open_link;

namespace {

constexpr Technology RF = Technology::kRF;
constexpr Technology OC = Technology::kOC;

SweepSettings small_settings() {
  SweepSettings settings;
  settings.generation.n_nodes = 4;
  settings.generation.n_aps = 2;
  settings.generation.horizon = 8;
  settings.generation.pair_probability = 0.4;
  settings.generation.messages_per_pair_max = 2;
  settings.seeds = {1, 2, 3};
  return settings;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("energy and delay percentages") {
  Scenario s = blank_scenario(2, 1, 8);
  add_message(s, 0, 2, 2, 4);
  add_message(s, 1, 2, 0, 0);
  open_link(s, RF, 0, 2);
  open_link(s, OC, 1, 2);
  s.energy.budget[0] = {160.0, 0.0, 400.0};
  s.energy.budget[1] = {0.0, 214.0, 0.0};
  REQUIRE(s.tau == 4);

  Schedule x = Schedule::empty_for(s);
  CHECK(energy_percent(s, x, RF) == 0.0);
  CHECK(delay_percent(s, x) == 100.0);
  CHECK(!all_sent_at_window_start(s, x));

  x.add({0, 2, RF, 3});
  // Device 0 spends 80 of 160; device 2 has budget but spends nothing.
  CHECK(energy_percent(s, x, RF) == doctest::Approx(25.0));
  // Message 0 has delta 2 of tau 4, message 1 is unsent.
  CHECK(delay_percent(s, x) == doctest::Approx((100.0 / 3 + 100.0) / 2));
  CHECK(!all_sent_at_window_start(s, x));

  x.add({1, 2, OC, 0});
  CHECK(energy_percent(s, x, OC) == doctest::Approx(50.0));
  x.remove({0, 2, RF, 3});
  x.add({0, 2, RF, 2});
  CHECK(delay_percent(s, x) == 0.0);
  CHECK(all_sent_at_window_start(s, x));
}

TEST_CASE("default grids") {
  const std::vector<double> a1 = default_alpha1_grid();
  REQUIRE(a1.size() == 13u);
  CHECK(a1.front() == 0.0);
  CHECK(a1.back() == doctest::Approx(0.3));
  const std::vector<double> a2 = default_alpha2_grid();
  REQUIRE(a2.size() == 11u);
  CHECK(a2.back() == doctest::Approx(0.5));
}

TEST_CASE("pareto sweep is deterministic and ends at the empty schedule") {
  const SweepSettings settings = small_settings();
  const std::vector<double> grid = {0.0, 0.1, 0.3, 1.0};
  const std::vector<ParetoPoint> points =
      pareto_sweep_alpha1(settings, RF, grid);
  REQUIRE(points.size() == grid.size());
  CHECK(points.back().n_scheduled == 0);
  CHECK(points.back().avg_energy_pct == 0.0);
  CHECK(points.back().avg_delay_pct == 100.0);
  CHECK(!points.back().zero_delay);
  for (const ParetoPoint& p : points) {
    CHECK(p.avg_energy_pct >= 0.0);
    CHECK(p.avg_energy_pct <= 100.0);
    CHECK(p.avg_delay_pct >= 0.0);
    CHECK(p.avg_delay_pct <= 100.0);
  }

  SweepSettings parallel = settings;
  parallel.workers = 3;
  const std::vector<ParetoPoint> again =
      pareto_sweep_alpha1(parallel, RF, grid);
  for (std::size_t p = 0; p < points.size(); ++p) {
    CHECK(points[p].avg_energy_pct == again[p].avg_energy_pct);
    CHECK(points[p].avg_delay_pct == again[p].avg_delay_pct);
    CHECK(points[p].n_scheduled == again[p].n_scheduled);
  }

  SweepSettings none = settings;
  none.seeds.clear();
  CHECK_THROWS_AS(pareto_sweep_alpha1(none, RF, grid), std::invalid_argument);
}

TEST_CASE("alpha2 search skips infeasible weights and notes free terms") {
  const SweepSettings settings = small_settings();
  const std::vector<Alpha2Result> results =
      grid_search_alpha2(settings, 0.6, 5.0, {0.0, 0.2, 0.5});
  REQUIRE(results.size() == 3u);
  CHECK(!results[0].skipped);
  CHECK(results[0].note.find("switching unconstrained") != std::string::npos);
  CHECK(!results[1].skipped);
  CHECK(results[2].skipped);
  CHECK(!results[2].accepted);
  CHECK(!results[2].note.empty());
  for (const Alpha2Result& r : results) {
    if (r.skipped) continue;
    CHECK(r.dev_energy >= 0.0);
    CHECK(r.dev_switch >= 0.0);
    CHECK(r.dev_delay >= 0.0);
    const bool within = r.dev_energy <= 5.0 && r.dev_delay <= 5.0 &&
                        (r.alpha2 == 0.0 || r.dev_switch <= 5.0);
    CHECK(r.accepted == within);
  }
}

TEST_CASE("sweep CSV files") {
  const auto dir = std::filesystem::temp_directory_path() / "hybrid_aoi_tests";
  std::filesystem::create_directories(dir);
  write_pareto_csv({{0.0, 12.5, 40.0, 7, true}}, dir / "pareto.csv");
  CHECK(read_file(dir / "pareto.csv") ==
        "alpha1,energy_pct,delay_pct,n_scheduled,zero_delay\n"
        "0,12.5,40,7,1\n");
  Alpha2Result r;
  r.alpha2 = 0.1;
  r.dev_energy = 1.5;
  r.accepted = true;
  write_alpha2_csv({r}, dir / "alpha2.csv");
  const std::string text = read_file(dir / "alpha2.csv");
  CHECK(text.rfind("alpha2,dev_energy,dev_switch,dev_delay,accepted", 0) == 0);
  CHECK(text.find("0.1,1.5,0,0,1") != std::string::npos);
}
