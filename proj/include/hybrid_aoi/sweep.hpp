#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hybrid_aoi/scenario.hpp"
#include "hybrid_aoi/solver.hpp"

namespace hybrid_aoi {

struct SweepSettings {
  GenerationConfig generation;
  std::vector<std::uint64_t> seeds;
  double gap_target = 0.0;
  std::int64_t node_limit = 50'000'000;
  double time_limit_seconds = 600.0;
  unsigned workers = 1;
};

struct ParetoPoint {
  double alpha1 = 0.0;
  double avg_energy_pct = 0.0;
  double avg_delay_pct = 0.0;
  int n_scheduled = 0;  // transmissions summed over seeds
  bool zero_delay = false;
};

// Per-instance percentages behind a ParetoPoint.
// energy: mean over devices with a positive budget of consumed / budget * 100
// for technology `tech`. delay: mean over messages of 100 (d - 1) / (tau - 1)
// with d the realized delta at the send slot and d = tau when unsent.
double energy_percent(const Scenario& s, const Schedule& x, Technology tech);
double delay_percent(const Scenario& s, const Schedule& x);
// Every sent message leaves at its window start (false for an empty schedule).
bool all_sent_at_window_start(const Scenario& s, const Schedule& x);

std::vector<double> default_alpha1_grid();
std::vector<double> default_alpha2_grid();

// Single-technology weighted-sum sweep with alpha = (a1, 0, 1 - a1).
std::vector<ParetoPoint> pareto_sweep_alpha1(const SweepSettings& settings,
                                             Technology tech,
                                             const std::vector<double>& grid);

struct Alpha2Result {
  double alpha2 = 0.0;
  bool skipped = false;  // alpha1 + alpha2 > 1
  bool accepted = false;
  // Mean over seeds of 100 * |term(x_alpha) - term(x_ref)| on the normalized
  // scale, where x_ref optimizes that term alone.
  double dev_energy = 0.0;
  double dev_switch = 0.0;
  double dev_delay = 0.0;
  std::string note;
};

// Hybrid grid search over alpha2 with alpha = (alpha1, alpha2, 1 - a1 - a2).
// A value is accepted when every weighted term deviates by at most
// threshold_pct; terms with zero weight are unconstrained.
std::vector<Alpha2Result> grid_search_alpha2(const SweepSettings& settings,
                                             double alpha1,
                                             double threshold_pct,
                                             const std::vector<double>& grid);

// pareto.csv: alpha1, energy_pct, delay_pct, n_scheduled, zero_delay.
void write_pareto_csv(const std::vector<ParetoPoint>& points,
                      const std::filesystem::path& path);
// alpha2_search.csv: alpha2, dev_energy, dev_switch, dev_delay, accepted,
// followed by skipped and note.
void write_alpha2_csv(const std::vector<Alpha2Result>& results,
                      const std::filesystem::path& path);

}  // namespace hybrid_aoi
