#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hybrid_aoi/model.hpp"

namespace hybrid_aoi {

// An information stream observed at a receiver. Without a sender the stream
// aggregates every sender of that data type.
struct StreamKey {
  int receiver = 0;
  int data_type = 0;
  std::optional<int> sender;

  auto operator<=>(const StreamKey&) const = default;
};

struct AoIUpdate {
  int step = 0;
  int age_before = 0;  // age just before the update, Delta(k-)
  int age_after = 0;   // age right after, k - u + 1
};

struct AoITrajectory {
  // age[k] for k = 0..T-1. Before the first update age[k] = k + 1.
  std::vector<int> age;
  std::vector<AoIUpdate> updates;
};

struct AoISummary {
  double mean = 0.0;
  double peak = 0.0;
};

struct AoIMetrics {
  double mean_aoi = 0.0;
  double peak_aoi = 0.0;
  std::map<int, AoISummary> per_type;
  std::map<StreamKey, AoISummary> per_stream;
};

// A reception counts as an update unless it is staler than the information
// already held; stale receptions leave the age untouched.
// Throws std::invalid_argument if no message matches `key`.
AoITrajectory aoi_trajectory(const Scenario& s, const Schedule& x,
                             const StreamKey& key);

// Rectangle rule over unit steps: (1/T) * sum age[k].
double mean_aoi(const AoITrajectory& t);

// Mean of the pre-update ages; the end-of-horizon age when nothing arrived.
double peak_aoi(const AoITrajectory& t);

// Streams keyed by (receiver, data_type) that carry at least one message.
std::vector<StreamKey> receiver_streams(const Scenario& s);

// Per-stream metrics aggregated per type and overall by unweighted means.
// Throws std::invalid_argument for scenarios without messages.
AoIMetrics system_metrics(const Scenario& s, const Schedule& x);

}  // namespace hybrid_aoi
