#include <random>

#include "doctest.h"
#include "hybrid_aoi/model.hpp"
#include "support.hpp"

using namespace hybrid_aoi;
using hybrid_aoi::testing::add_message;
using hybrid_aoi::testing::blank_scenario;
using hybrid_aoi::testing::open_link;

namespace {

constexpr Technology RF = Technology::kRF;
constexpr Technology OC = Technology::kOC;

bool has_violation(const FeasibilityReport& r, ConstraintId id,
                   std::vector<std::pair<std::string, int>> indices) {
  for (const Violation& v : r.violations) {
    if (v.id == id && v.indices == indices) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("delay of a message sent at its window start is one") {
  Scenario s = blank_scenario(3, 0, 8);
  add_message(s, 0, 2, 3, 5);
  open_link(s, RF, 0, 2);
  REQUIRE(s.tau == 4);

  Schedule x = Schedule::empty_for(s);
  x.add({0, 2, RF, 3});
  EndogenousState e = derive_endogenous(s, x);
  CHECK(e.delta[0] == std::vector<int>{1, 4, 4});
  CHECK(e.sent[0]);
  CHECK(e.send_step[0] == 3);

  Schedule later = Schedule::empty_for(s);
  later.add({0, 2, RF, 4});
  e = derive_endogenous(s, later);
  CHECK(e.delta[0] == std::vector<int>{4, 2, 4});
}

TEST_CASE("empty schedule leaves every delta at tau and registers on RF") {
  Scenario s = blank_scenario(2, 1, 5);
  add_message(s, 0, 2, 0, 2);
  add_message(s, 1, 2, 1, 1);
  const EndogenousState e = derive_endogenous(s, Schedule::empty_for(s));
  for (const auto& d : e.delta) {
    for (int v : d) CHECK(v == s.tau);
  }
  for (int i = 0; i < s.n_devices(); ++i) {
    for (int k = 0; k < s.horizon; ++k) CHECK(e.register_at(i, k) == RF);
  }
  for (bool sent : e.sent) CHECK(!sent);
  CHECK(e.switch_count() == 0);
}

TEST_CASE("switch count follows the technology register") {
  Scenario s = blank_scenario(1, 2, 10);
  add_message(s, 0, 1, 2, 2);
  add_message(s, 0, 2, 5, 5);
  add_message(s, 0, 1, 8, 8);
  open_link(s, RF, 0, 1);
  open_link(s, OC, 0, 2);

  Schedule x = Schedule::empty_for(s);
  x.add({0, 1, RF, 2});
  x.add({0, 2, OC, 5});
  // The sender switches once; the receiving access point also moves to OC.
  CHECK(derive_endogenous(s, x).switch_count(0) == 1);
  CHECK(derive_endogenous(s, x).switch_count(2) == 1);
  CHECK(derive_endogenous(s, x).switch_count(1) == 0);
  CHECK(derive_endogenous(s, x).switch_count() == 2);
  CHECK(derive_endogenous(s, x).register_at(0, 4) == RF);
  CHECK(derive_endogenous(s, x).register_at(0, 7) == OC);

  x.add({0, 1, RF, 8});
  CHECK(derive_endogenous(s, x).switch_count(0) == 2);
  CHECK(derive_endogenous(s, x).switch_count() == 3);

  // Starting with OC counts as a switch away from the initial RF register.
  Schedule oc_first = Schedule::empty_for(s);
  oc_first.add({0, 2, OC, 5});
  CHECK(derive_endogenous(s, oc_first).switch_count(0) == 1);
}

TEST_CASE("derive_endogenous rejects transmissions outside every window") {
  Scenario s = blank_scenario(2, 0, 4);
  add_message(s, 0, 1, 0, 0);
  Schedule x = Schedule::empty_for(s);
  x.add({0, 1, RF, 2});
  CHECK_THROWS_AS(derive_endogenous(s, x), std::invalid_argument);
}

TEST_CASE("normalization coefficients") {
  const std::array<double, 2> se{80.0, 107.0};
  Scenario s = blank_scenario(10, 3, 20);
  for (int f = 0; f < 10; ++f) add_message(s, f, 10, 0, 2);
  CHECK(normalization_coefficients(s, se).energy == doctest::Approx(1070.0));
  CHECK(normalization_coefficients(s, se).switching == 260.0);

  Scenario d = blank_scenario(6, 0, 20);
  // 30 window slots, longest window 4 so tau = 5.
  for (int i = 0; i < 5; ++i) {
    add_message(d, i, 5, 0, 3);
    add_message(d, i, 5, 5, 6);
  }
  REQUIRE(d.total_window_slots() == 30);
  REQUIRE(d.tau == 5);
  CHECK(normalization_coefficients(d, se).delay == 150.0);

  CHECK_THROWS_AS(normalization_coefficients(blank_scenario(2, 0, 3), se),
                  std::invalid_argument);
}

TEST_CASE("objective of the empty schedule equals alpha3") {
  Scenario s = blank_scenario(2, 1, 6);
  add_message(s, 0, 2, 0, 2);
  add_message(s, 1, 2, 3, 3);
  const ObjectiveConfig cfg = ObjectiveConfig::for_scenario(s, {0.2, 0.3, 0.5});
  const ObjectiveBreakdown b = evaluate_schedule(s, Schedule::empty_for(s), cfg);
  CHECK(b.delay_normalized == 1.0);
  CHECK(b.total == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.energy_raw == 0.0);
  CHECK(b.switching_raw == 0.0);
}

TEST_CASE("one RF transmission under pure energy weight costs one") {
  Scenario s = blank_scenario(2, 0, 3);
  add_message(s, 0, 1, 1, 1);
  open_link(s, RF, 0, 1);
  ObjectiveConfig cfg = ObjectiveConfig::for_scenario(s, {1.0, 0.0, 0.0});
  cfg.norm.energy = cfg.transmission_energy[0];
  Schedule x = Schedule::empty_for(s);
  x.add({0, 1, RF, 1});
  CHECK(evaluate_schedule(s, x, cfg).total == 1.0);
  CHECK(cfg.transmission_energy == std::array<double, 2>{80.0, 107.0});
}

TEST_CASE("constraint checker names the violated family") {
  Scenario s = blank_scenario(3, 1, 4);
  add_message(s, 0, 1, 0, 3);
  add_message(s, 0, 2, 0, 3);
  add_message(s, 1, 0, 0, 3);
  add_message(s, 2, 3, 0, 3);
  open_link(s, RF, 0, 1);
  open_link(s, RF, 0, 2);
  open_link(s, RF, 2, 3);
  open_link(s, OC, 2, 3, 0.5);

  CHECK(check_constraints(s, Schedule::empty_for(s)).feasible());

  SUBCASE("two sends from one device in a step") {
    Schedule x = Schedule::empty_for(s);
    x.add({0, 1, RF, 1});
    x.add({0, 2, RF, 1});
    const FeasibilityReport r = check_constraints(s, x);
    CHECK(has_violation(r, ConstraintId::kDegree, {{"i", 0}, {"k", 1}}));
  }
  SUBCASE("optical link below threshold") {
    Schedule x = Schedule::empty_for(s);
    x.add({2, 3, OC, 0});
    const FeasibilityReport r = check_constraints(s, x);
    CHECK(r.has(ConstraintId::kVisibility));
    CHECK(r.violations.size() == 1);
  }
  SUBCASE("transmission without demand") {
    Schedule x = Schedule::empty_for(s);
    x.add({2, 0, RF, 0});
    CHECK(check_constraints(s, x).has(ConstraintId::kDemand));
  }
  SUBCASE("self link") {
    Schedule x = Schedule::empty_for(s);
    x.add({1, 1, RF, 0});
    CHECK(check_constraints(s, x).has(ConstraintId::kSelfLink));
  }
  SUBCASE("send while receiving") {
    Schedule x = Schedule::empty_for(s);
    x.add({0, 1, RF, 2});
    x.add({2, 3, RF, 2});
    x.add({1, 0, RF, 3});
    CHECK(check_constraints(s, x).feasible());
    x.add({0, 2, RF, 3});
    const FeasibilityReport r = check_constraints(s, x);
    CHECK(has_violation(r, ConstraintId::kBusy, {{"i", 0}, {"k", 3}}));
  }
  SUBCASE("energy budget") {
    s.energy.budget[0][0] = 159.0;
    Schedule x = Schedule::empty_for(s);
    x.add({0, 1, RF, 0});
    CHECK(check_constraints(s, x).feasible());
    x.add({0, 2, RF, 1});
    const FeasibilityReport r = check_constraints(s, x);
    CHECK(has_violation(r, ConstraintId::kEnergy, {{"i", 0}, {"m", 0}}));
  }
  SUBCASE("message sent twice") {
    Schedule x = Schedule::empty_for(s);
    x.add({0, 1, RF, 0});
    x.add({0, 1, RF, 2});
    CHECK(check_constraints(s, x).has(ConstraintId::kAtMostOnce));
  }
  SUBCASE("disabled technology") {
    open_link(s, OC, 2, 3, 0.99);
    Schedule x = Schedule::empty_for(s);
    x.add({2, 3, OC, 0});
    CHECK(check_constraints(s, x).feasible());
    const Scenario rf = restrict_technologies(s, {true, false});
    CHECK(check_constraints(rf, x).has(ConstraintId::kVisibility));
  }
}

TEST_CASE("split accounting charges the receiver its share") {
  Scenario s = blank_scenario(2, 0, 2);
  add_message(s, 0, 1, 0, 0);
  open_link(s, RF, 0, 1);
  Schedule x = Schedule::empty_for(s);
  x.add({0, 1, RF, 0});
  CHECK(consumed_energy(s, x, 0, RF) == 80.0);
  CHECK(consumed_energy(s, x, 1, RF) == 0.0);
  s.energy.split_accounting = true;
  CHECK(consumed_energy(s, x, 0, RF) == 70.0);
  CHECK(consumed_energy(s, x, 1, RF) == 10.0);
  s.energy.budget[0][1] = 9.0;
  CHECK(check_constraints(s, x).has(ConstraintId::kEnergy));
}

TEST_CASE("evaluate_schedule refuses infeasible schedules") {
  Scenario s = blank_scenario(2, 0, 2);
  add_message(s, 0, 1, 0, 0);
  Schedule x = Schedule::empty_for(s);
  x.add({0, 1, RF, 0});
  const ObjectiveConfig cfg = ObjectiveConfig::for_scenario(s, {0.1, 0.1, 0.8});
  CHECK_THROWS_AS(evaluate_schedule(s, x, cfg), InfeasibleSchedule);
}

TEST_CASE("objective config validation") {
  Scenario s = blank_scenario(2, 0, 2);
  add_message(s, 0, 1, 0, 0);
  CHECK_THROWS_AS(ObjectiveConfig::for_scenario(s, {0.5, 0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ObjectiveConfig::for_scenario(s, {-0.1, 0.6, 0.5}),
                  std::invalid_argument);
  ObjectiveConfig cfg = ObjectiveConfig::for_scenario(s, {0.1, 0.1, 0.8});
  CHECK_NOTHROW(cfg.validate());
  cfg.norm.delay = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("schedule keeps transmissions in tie-break order") {
  Schedule x(3, 4);
  CHECK(x.add({1, 0, OC, 2}));
  CHECK(x.add({1, 0, RF, 2}));
  CHECK(x.add({0, 2, RF, 3}));
  CHECK(x.add({2, 1, RF, 0}));
  CHECK(!x.add({2, 1, RF, 0}));
  const std::vector<Transmission> expected{
      {2, 1, RF, 0}, {1, 0, RF, 2}, {1, 0, OC, 2}, {0, 2, RF, 3}};
  CHECK(x.transmissions() == expected);
  CHECK(x.remove({1, 0, RF, 2}));
  CHECK(!x.contains({1, 0, RF, 2}));

  Schedule a(3, 4), b(3, 4);
  a.add({0, 1, RF, 0});
  b.add({0, 1, RF, 1});
  CHECK(tie_precedes(a, b));
  CHECK(!tie_precedes(b, a));
  // A longer list that agrees on the prefix ranks first.
  Schedule longer = a;
  longer.add({0, 1, RF, 2});
  CHECK(tie_precedes(longer, a));
  CHECK(!tie_precedes(a, a));
}
