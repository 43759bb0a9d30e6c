#pragma once

#include <array>
#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybrid_aoi/scenario.hpp"

namespace hybrid_aoi {

// One entry x[i][j][m][k] = 1 of the decision tensor.
struct Transmission {
  int sender = 0;
  int receiver = 0;
  Technology tech = Technology::kRF;
  int step = 0;

  bool operator==(const Transmission&) const = default;
};

// Tie-break order: earlier step, lower sender, lower receiver, RF before OC.
inline std::strong_ordering tie_order(const Transmission& a,
                                      const Transmission& b) {
  if (auto c = a.step <=> b.step; c != 0) return c;
  if (auto c = a.sender <=> b.sender; c != 0) return c;
  if (auto c = a.receiver <=> b.receiver; c != 0) return c;
  return index_of(a.tech) <=> index_of(b.tech);
}

// Sparse binary decision tensor. Transmissions are kept sorted in tie-break
// order and unique.
class Schedule {
 public:
  Schedule() = default;
  Schedule(int n_devices, int horizon)
      : n_devices_(n_devices), horizon_(horizon) {}
  static Schedule empty_for(const Scenario& s) {
    return Schedule(s.n_devices(), s.horizon);
  }

  // Returns false if the entry was already set.
  bool add(const Transmission& t);
  bool remove(const Transmission& t);
  bool contains(const Transmission& t) const;

  const std::vector<Transmission>& transmissions() const { return tx_; }
  std::size_t size() const { return tx_.size(); }
  bool empty() const { return tx_.empty(); }
  int n_devices() const { return n_devices_; }
  int horizon() const { return horizon_; }

  bool operator==(const Schedule&) const = default;

 private:
  int n_devices_ = 0;
  int horizon_ = 0;
  std::vector<Transmission> tx_;
};

// Lexicographic comparison of sorted transmission lists where running out of
// entries ranks after any transmission. A schedule that ranks first wins ties.
bool tie_precedes(const Schedule& a, const Schedule& b);

// Variables fully determined by a schedule.
struct EndogenousState {
  int n_devices = 0;
  int horizon = 0;
  // s[i][k]: technology register after step k (RF before any activity).
  std::vector<Technology> tech_register;
  // delta[f][k - window_start] for every message f.
  std::vector<std::vector<int>> delta;
  std::vector<bool> sent;
  // Step at which message f is transmitted, or -1.
  std::vector<int> send_step;
  std::vector<Technology> send_tech;

  Technology register_at(int device, int step) const {
    return tech_register[static_cast<std::size_t>(device) * horizon + step];
  }
  int switch_count() const;
  int switch_count(int device) const;
};

// Throws std::invalid_argument when a transmission lies outside every message
// window of its pair, or indices fall outside the scenario.
EndogenousState derive_endogenous(const Scenario& s, const Schedule& x);

struct NormalizationCoefficients {
  double energy = 1.0;     // S1
  double switching = 1.0;  // S2
  double delay = 1.0;      // S3
};

// S1 = messages * max SE, S2 = N * T, S3 = tau * window slots.
// Throws std::invalid_argument for scenarios without messages.
NormalizationCoefficients normalization_coefficients(
    const Scenario& s, const std::array<double, kNumTechnologies>& se);

struct ObjectiveConfig {
  std::array<double, 3> alpha{0.1, 0.1, 0.8};
  // Energy of one complete transmission per technology (SE^m).
  std::array<double, kNumTechnologies> transmission_energy{80.0, 107.0};
  NormalizationCoefficients norm;

  // SE^m = E_s^m + E_r^m and the normalization coefficients of `s`.
  static ObjectiveConfig for_scenario(const Scenario& s,
                                      std::array<double, 3> alpha);
  // Throws std::invalid_argument if the weights are negative, do not sum to
  // one, or a coefficient is not positive.
  void validate() const;
};

struct ObjectiveBreakdown {
  double energy_raw = 0.0;
  double switching_raw = 0.0;
  double delay_raw = 0.0;
  double energy_normalized = 0.0;
  double switching_normalized = 0.0;
  double delay_normalized = 0.0;
  double total = 0.0;
};

// Combines raw sub-objectives. Shared by every evaluator so equal raw terms
// always give bit-identical totals.
ObjectiveBreakdown combine_objective(const ObjectiveConfig& cfg,
                                     double energy_raw, double switching_raw,
                                     double delay_raw);

enum class ConstraintId {
  kDegree = 2,
  kDemand = 3,
  kVisibility = 4,
  kSelfLink = 5,
  kBusy = 6,
  kEnergy = 7,
  kAtMostOnce = 8,
};

const char* constraint_name(ConstraintId id);

struct Violation {
  ConstraintId id;
  // Named indices, e.g. {{"i", 0}, {"k", 1}}.
  std::vector<std::pair<std::string, int>> indices;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  bool has(ConstraintId id) const;
  std::string to_string() const;
};

// Reports every violated constraint instance. Index ranges are validated and
// raise std::invalid_argument; infeasibility itself is never an exception.
FeasibilityReport check_constraints(const Scenario& s, const Schedule& x);

class InfeasibleSchedule : public std::runtime_error {
 public:
  explicit InfeasibleSchedule(FeasibilityReport report)
      : std::runtime_error("infeasible schedule:\n" + report.to_string()),
        report_(std::move(report)) {}
  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

// Throws InfeasibleSchedule when check_constraints reports violations.
ObjectiveBreakdown evaluate_schedule(const Scenario& s, const Schedule& x,
                                     const ObjectiveConfig& cfg);

// Energy drawn from device i's pool for technology m by schedule x.
double consumed_energy(const Scenario& s, const Schedule& x, int device,
                       Technology m);

}  // namespace hybrid_aoi
