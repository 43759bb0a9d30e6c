#include "hybrid_aoi/scenario.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace hybrid_aoi {

const char* technology_name(Technology t) {
  return t == Technology::kRF ? "RF" : "OC";
}

Technology technology_from_name(const std::string& name) {
  if (name == "RF" || name == "rf") return Technology::kRF;
  if (name == "OC" || name == "oc") return Technology::kOC;
  throw std::invalid_argument("unknown technology '" + name + "'");
}

int Scenario::message_at(int sender, int receiver, int step) const {
  for (std::size_t f = 0; f < messages.size(); ++f) {
    const Message& msg = messages[f];
    if (msg.sender == sender && msg.receiver == receiver && msg.covers(step)) {
      return static_cast<int>(f);
    }
  }
  return -1;
}

int Scenario::total_window_slots() const {
  int total = 0;
  for (const Message& msg : messages) total += msg.window_length();
  return total;
}

int Scenario::max_window_length() const {
  int longest = 0;
  for (const Message& msg : messages) {
    longest = std::max(longest, msg.window_length());
  }
  return longest;
}

namespace {

std::string pair_text(int i, int j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

}  // namespace

void Scenario::validate() const {
  if (n_nodes < 0 || n_aps < 0 || n_devices() < 1) {
    throw ScenarioError("devices.count", "need at least one device");
  }
  if (horizon < 1) throw ScenarioError("horizon.positive", "T must be >= 1");
  if (n_types < 1) throw ScenarioError("types.positive", "L must be >= 1");
  const int n = n_devices();
  if (visibility.n_devices() != n || visibility.horizon() != horizon) {
    throw ScenarioError("visibility.shape",
                        "tensor dimensions do not match N and T");
  }
  for (Technology m : kAllTechnologies) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < horizon; ++k) {
          const double v = visibility.at(m, i, j, k);
          const std::string where = std::string(technology_name(m)) + " " +
                                    pair_text(i, j) + " k=" +
                                    std::to_string(k);
          if (!(v >= 0.0 && v <= 1.0)) {
            throw ScenarioError("visibility.range", where);
          }
          if (v != visibility.at(m, j, i, k)) {
            throw ScenarioError("visibility.symmetric", where);
          }
          if (i == j && v != 0.0) {
            throw ScenarioError("visibility.no_self_link", where);
          }
          if (v != 0.0 && m == Technology::kOC && !is_access_point(i) &&
              !is_access_point(j)) {
            throw ScenarioError("visibility.oc_node_node_zero", where);
          }
          if (v != 0.0 && is_access_point(i) && is_access_point(j)) {
            throw ScenarioError("visibility.ap_ap_zero", where);
          }
        }
      }
    }
  }

  for (Technology m : kAllTechnologies) {
    const int t = index_of(m);
    if (static_cast<int>(energy.budget[t].size()) != n) {
      throw ScenarioError("energy.shape", "budget size does not match N");
    }
    for (double b : energy.budget[t]) {
      if (!(b >= 0.0)) throw ScenarioError("energy.non_negative", "budget");
    }
    if (!(energy.send_cost[t] >= 0.0) || !(energy.receive_cost[t] >= 0.0)) {
      throw ScenarioError("energy.non_negative", "transmission cost");
    }
    if (!(thresholds[t] >= 0.0 && thresholds[t] <= 1.0)) {
      throw ScenarioError("thresholds.range", technology_name(m));
    }
  }

  for (std::size_t f = 0; f < messages.size(); ++f) {
    const Message& msg = messages[f];
    const std::string where = "message " + std::to_string(f);
    if (msg.sender < 0 || msg.sender >= n || msg.receiver < 0 ||
        msg.receiver >= n) {
      throw ScenarioError("messages.device_range", where);
    }
    if (msg.sender == msg.receiver) {
      throw ScenarioError("messages.no_self_message", where);
    }
    if (msg.data_type < 0 || msg.data_type >= n_types) {
      throw ScenarioError("messages.data_type_range", where);
    }
    if (msg.window_start < 0 || msg.window_end >= horizon ||
        msg.window_start > msg.window_end) {
      throw ScenarioError("messages.window_range", where);
    }
    for (std::size_t g = 0; g < f; ++g) {
      const Message& other = messages[g];
      if (other.sender == msg.sender && other.receiver == msg.receiver &&
          other.window_start <= msg.window_end &&
          msg.window_start <= other.window_end) {
        throw ScenarioError("messages.windows_disjoint",
                            "messages " + std::to_string(g) + " and " +
                                std::to_string(f) + " on pair " +
                                pair_text(msg.sender, msg.receiver));
      }
    }
  }
  if (tau <= max_window_length()) {
    throw ScenarioError("tau.exceeds_longest_window",
                        "tau=" + std::to_string(tau) + " longest window=" +
                            std::to_string(max_window_length()));
  }
}

std::size_t DemandTensor::count() const {
  return static_cast<std::size_t>(
      std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

DemandTensor derive_demand(const Scenario& s) {
  DemandTensor rho(s.n_devices(), s.horizon);
  for (const Message& msg : s.messages) {
    for (int k = msg.window_start; k <= msg.window_end; ++k) {
      rho.set(msg.sender, msg.receiver, k);
    }
  }
  return rho;
}

void GenerationConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("generation config: " + what);
  };
  if (n_nodes < 0 || n_aps < 0 || n_nodes + n_aps < 1) fail("device counts");
  if (n_types < 1) fail("n_types must be >= 1");
  if (horizon < 1) fail("horizon must be >= 1");
  if (!(visibility_std > 0.0)) fail("visibility_std must be > 0");
  for (int t = 0; t < kNumTechnologies; ++t) {
    if (!(visibility_mean[t] >= 0.0 && visibility_mean[t] <= 1.0)) {
      fail("visibility_mean must lie in [0,1]");
    }
    if (!(thresholds[t] >= 0.0 && thresholds[t] <= 1.0)) {
      fail("thresholds must lie in [0,1]");
    }
    if (send_cost[t] < 0.0 || receive_cost[t] < 0.0) fail("negative cost");
  }
  if (budget_min < 0.0 || budget_max < budget_min) fail("budget range");
  if (!(pair_probability >= 0.0 && pair_probability <= 1.0)) {
    fail("pair_probability must lie in [0,1]");
  }
  if (messages_per_pair_min < 0 ||
      messages_per_pair_max < messages_per_pair_min) {
    fail("messages_per_pair range");
  }
  if (window_length_min < 1 || window_length_max < window_length_min) {
    fail("window length range");
  }
}

namespace {

double truncated_normal(std::mt19937_64& rng, double mean, double stddev) {
  std::normal_distribution<double> normal(mean, stddev);
  for (;;) {
    const double v = normal(rng);
    if (v >= 0.0 && v <= 1.0) return v;
  }
}

bool pair_admissible(const Scenario& s, int i, int j) {
  return i != j && !(s.is_access_point(i) && s.is_access_point(j));
}

}  // namespace

Scenario generate_scenario(const GenerationConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);

  Scenario s;
  s.n_nodes = config.n_nodes;
  s.n_aps = config.n_aps;
  s.n_types = config.n_types;
  s.horizon = config.horizon;
  s.thresholds = config.thresholds;
  s.enabled = config.enabled;
  const int n = s.n_devices();

  // Visibility is drawn for every technology even when disabled so that
  // instances generated with the same seed differ only in the enabled flags.
  s.visibility = VisibilityTensor(n, s.horizon);
  for (Technology m : kAllTechnologies) {
    const int t = index_of(m);
    for (int k = 0; k < s.horizon; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (!pair_admissible(s, i, j)) continue;
          if (m == Technology::kOC && !s.is_access_point(i) &&
              !s.is_access_point(j)) {
            continue;
          }
          s.visibility.set_symmetric(
              m, i, j, k,
              truncated_normal(rng, config.visibility_mean[t],
                               config.visibility_std));
        }
      }
    }
  }

  std::uniform_real_distribution<double> budget(config.budget_min,
                                                config.budget_max);
  for (Technology m : kAllTechnologies) {
    auto& pool = s.energy.budget[index_of(m)];
    pool.resize(n);
    for (int i = 0; i < n; ++i) pool[i] = budget(rng);
  }
  s.energy.send_cost = config.send_cost;
  s.energy.receive_cost = config.receive_cost;
  s.energy.split_accounting = config.split_energy_accounting;

  std::bernoulli_distribution communicates(config.pair_probability);
  std::uniform_int_distribution<int> count(config.messages_per_pair_min,
                                           config.messages_per_pair_max);
  std::uniform_int_distribution<int> length(config.window_length_min,
                                            config.window_length_max);
  std::uniform_int_distribution<int> data_type(0, config.n_types - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!pair_admissible(s, i, j)) continue;
      if (!communicates(rng)) continue;
      const int n_msgs = count(rng);
      if (n_msgs == 0) continue;
      std::vector<int> lengths(n_msgs);
      for (int& l : lengths) l = length(rng);
      const int occupied = std::accumulate(lengths.begin(), lengths.end(), 0);
      if (occupied > s.horizon) {
        throw std::invalid_argument(
            "generation config: windows of pair " + pair_text(i, j) +
            " need " + std::to_string(occupied) + " steps but T=" +
            std::to_string(s.horizon));
      }
      // Uniform placement over all disjoint arrangements in the given order:
      // choose which of the (free + n) gap/message tokens are messages.
      const int free_steps = s.horizon - occupied;
      std::vector<int> tokens(free_steps + n_msgs);
      std::iota(tokens.begin(), tokens.end(), 0);
      std::shuffle(tokens.begin(), tokens.end(), rng);
      tokens.resize(n_msgs);
      std::sort(tokens.begin(), tokens.end());
      int placed = 0;
      for (int r = 0; r < n_msgs; ++r) {
        Message msg;
        msg.sender = i;
        msg.receiver = j;
        msg.ordinal = r;
        msg.data_type = data_type(rng);
        msg.window_start = tokens[r] - r + placed;
        msg.window_end = msg.window_start + lengths[r] - 1;
        placed += lengths[r];
        s.messages.push_back(msg);
      }
    }
  }
  s.tau = s.max_window_length() + 1;
  s.validate();
  return s;
}

Scenario restrict_technologies(const Scenario& s,
                               std::array<bool, kNumTechnologies> enabled) {
  Scenario out = s;
  out.enabled = enabled;
  return out;
}

}  // namespace hybrid_aoi
