#include "hybrid_aoi/aoi.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hybrid_aoi {

namespace {

bool matches(const Message& msg, const StreamKey& key) {
  return msg.receiver == key.receiver && msg.data_type == key.data_type &&
         (!key.sender || *key.sender == msg.sender);
}

}  // namespace

AoITrajectory aoi_trajectory(const Scenario& s, const Schedule& x,
                             const StreamKey& key) {
  const bool any = std::any_of(
      s.messages.begin(), s.messages.end(),
      [&key](const Message& msg) { return matches(msg, key); });
  if (!any) throw std::invalid_argument("stream has no matching message");

  // Generation step of the message received at each step, -1 when none.
  std::vector<int> generated(s.horizon, -1);
  for (const Transmission& t : x.transmissions()) {
    if (t.receiver != key.receiver) continue;
    const int f = s.message_at(t.sender, t.receiver, t.step);
    if (f < 0 || !matches(s.messages[f], key)) continue;
    generated[t.step] = std::max(generated[t.step], s.messages[f].window_start);
  }

  AoITrajectory out;
  out.age.resize(s.horizon);
  int previous = 0;
  for (int k = 0; k < s.horizon; ++k) {
    const int grown = previous + 1;
    int age = grown;
    if (generated[k] >= 0) {
      const int fresh = k - generated[k] + 1;
      if (fresh <= grown) {
        age = fresh;
        out.updates.push_back({k, grown, fresh});
      }
    }
    out.age[k] = age;
    previous = age;
  }
  return out;
}

double mean_aoi(const AoITrajectory& t) {
  if (t.age.empty()) return 0.0;
  const double sum = std::accumulate(t.age.begin(), t.age.end(), 0.0);
  return sum / static_cast<double>(t.age.size());
}

double peak_aoi(const AoITrajectory& t) {
  if (t.updates.empty()) {
    return t.age.empty() ? 0.0 : static_cast<double>(t.age.back());
  }
  double sum = 0.0;
  for (const AoIUpdate& u : t.updates) sum += u.age_before;
  return sum / static_cast<double>(t.updates.size());
}

std::vector<StreamKey> receiver_streams(const Scenario& s) {
  std::set<StreamKey> keys;
  for (const Message& msg : s.messages) {
    keys.insert({msg.receiver, msg.data_type, std::nullopt});
  }
  return {keys.begin(), keys.end()};
}

AoIMetrics system_metrics(const Scenario& s, const Schedule& x) {
  if (s.messages.empty()) {
    throw std::invalid_argument("AoI metrics need at least one message");
  }
  AoIMetrics out;
  std::map<int, std::pair<AoISummary, int>> type_sums;
  for (const StreamKey& key : receiver_streams(s)) {
    const AoITrajectory trajectory = aoi_trajectory(s, x, key);
    const AoISummary summary{mean_aoi(trajectory), peak_aoi(trajectory)};
    out.per_stream.emplace(key, summary);
    auto& [sum, count] = type_sums[key.data_type];
    sum.mean += summary.mean;
    sum.peak += summary.peak;
    ++count;
    out.mean_aoi += summary.mean;
    out.peak_aoi += summary.peak;
  }
  const double streams = static_cast<double>(out.per_stream.size());
  out.mean_aoi /= streams;
  out.peak_aoi /= streams;
  for (const auto& [type, entry] : type_sums) {
    out.per_type[type] = {entry.first.mean / entry.second,
                          entry.first.peak / entry.second};
  }
  return out;
}

}  // namespace hybrid_aoi
