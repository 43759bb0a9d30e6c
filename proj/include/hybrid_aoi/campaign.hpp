#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hybrid_aoi/aoi.hpp"
#include "hybrid_aoi/solver.hpp"

namespace hybrid_aoi {

enum class Mode { kRFOnly, kOCOnly, kHybrid };

const char* mode_name(Mode mode);
// Throws std::invalid_argument for unknown names.
Mode mode_from_name(const std::string& name);
std::array<bool, kNumTechnologies> mode_technologies(Mode mode);

struct SweepAxis {
  std::vector<int> vary_nodes;
  std::vector<int> vary_aps;

  bool operator==(const SweepAxis&) const = default;
};

struct ExperimentConfig {
  std::string label;  // defaults to the mode name
  GenerationConfig generation;
  Mode mode = Mode::kHybrid;
  std::array<double, 3> alpha{0.1, 0.1, 0.8};
  double gap_target = 0.02;
  std::int64_t node_limit = 2'000'000;
  // Results stay reproducible only while this limit does not bind; the node
  // limit is the deterministic cap.
  double time_limit_seconds = 600.0;
  int iterations = 100;
  std::uint64_t seed_base = 0;
  unsigned workers = 1;
  SweepAxis sweep;
  bool record_trajectories = true;

  std::string display_label() const;
  // Throws std::invalid_argument.
  void validate() const;
};

struct SweepPoint {
  int n_nodes = 0;
  int n_aps = 0;

  bool operator==(const SweepPoint&) const = default;
};

// Cartesian product of the sweep lists; an empty list keeps the generation
// value. Nodes vary slowest.
std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

struct StreamTrajectory {
  StreamKey key;
  std::vector<int> age;
};

struct IterationRecord {
  int point = 0;
  SweepPoint where;
  int iteration = 0;
  std::uint64_t seed = 0;
  Mode mode = Mode::kHybrid;
  bool ok = false;
  std::string error;
  ObjectiveBreakdown objective;
  ProofStatus proof = ProofStatus::kHeuristic;
  double gap = 0.0;
  std::int64_t nodes = 0;
  AoIMetrics aoi;
  int n_messages = 0;
  int n_sent = 0;
  int n_rf = 0;
  int n_oc = 0;
  // sent messages / total messages
  double transmission_rate = 0.0;
  // mean over devices of consumed energy / summed budget of both technologies
  double energy_rate = 0.0;
  int switches = 0;
  std::vector<StreamTrajectory> trajectories;
};

// Scalar metrics of a record in a fixed order; per-type entries are empty when
// the instance has no stream of that type.
std::vector<std::pair<std::string, std::optional<double>>> record_metrics(
    const IterationRecord& r, int n_types);

struct Aggregate {
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  int count = 0;
};

struct PointAggregates {
  int point = 0;
  SweepPoint where;
  int failed = 0;
  std::vector<Aggregate> metrics;
};

struct CampaignResult {
  ExperimentConfig config;
  std::vector<IterationRecord> records;  // point-major, iteration order
  std::vector<PointAggregates> aggregates;
};

class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeds are seed_base + t for iteration t at every sweep point. Failed
// iterations are recorded; throws CampaignError when every iteration fails.
CampaignResult run_campaign(const ExperimentConfig& cfg);

std::vector<PointAggregates> aggregate_records(
    const std::vector<IterationRecord>& records,
    const std::vector<SweepPoint>& points, int n_types);

struct PairedDelta {
  int config = 0;  // compared against config 0
  int point = 0;
  int iteration = 0;
  std::uint64_t seed = 0;
  std::string metric;
  double delta = 0.0;  // value(config) - value(config 0)
};

struct SignSummary {
  int config = 0;
  int point = 0;
  std::string metric;
  int negative = 0;
  int zero = 0;
  int positive = 0;
  double mean_delta = 0.0;
};

struct ComparisonTable {
  bool paired_seeds = false;
  std::vector<SweepPoint> points;
  std::vector<CampaignResult> campaigns;
  std::vector<PairedDelta> deltas;
  std::vector<SignSummary> signs;
};

// Throws std::invalid_argument when the sweep axes or iteration counts differ
// or fewer than two configs are given. With paired_seeds every config runs on
// the seeds of the first one and per-seed deltas are reported for iterations
// that succeeded in both campaigns.
ComparisonTable compare_modes(const std::vector<ExperimentConfig>& cfgs,
                              bool paired_seeds);
// Deltas and sign summaries from already computed campaigns.
ComparisonTable compare_results(std::vector<CampaignResult> campaigns,
                                bool paired_seeds);

inline constexpr int kArtifactVersion = 1;

// Writes iterations.csv, aggregates.csv, aoi_trajectories.csv and
// manifest.json. Throws std::runtime_error on I/O failure.
void emit_outputs(const CampaignResult& result,
                  const std::filesystem::path& out_dir);
// Writes one subdirectory per campaign plus comparison.csv, deltas.csv,
// sign_tests.csv and manifest.json.
void emit_outputs(const ComparisonTable& table,
                  const std::filesystem::path& out_dir);

}  // namespace hybrid_aoi
