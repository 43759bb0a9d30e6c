#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybrid_aoi {

// Communication technologies. The numeric value is the technology index used
// by every tensor in the library.
enum class Technology : int { kRF = 0, kOC = 1 };

inline constexpr int kNumTechnologies = 2;
inline constexpr std::array<Technology, kNumTechnologies> kAllTechnologies = {
    Technology::kRF, Technology::kOC};

constexpr int index_of(Technology t) { return static_cast<int>(t); }
const char* technology_name(Technology t);
Technology technology_from_name(const std::string& name);

enum class DeviceKind { kIoTNode, kAccessPoint };

// Raised for malformed instances. `invariant()` names the rule that failed,
// e.g. "visibility.symmetric".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail),
        invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

struct Message {
  int sender = 0;
  int receiver = 0;
  int ordinal = 0;  // position within the (sender, receiver) message set
  int data_type = 0;
  int window_start = 0;
  int window_end = 0;  // inclusive

  int window_length() const { return window_end - window_start + 1; }
  bool covers(int step) const {
    return step >= window_start && step <= window_end;
  }
  bool operator==(const Message&) const = default;
};

// Dense per-technology, per-pair, per-step success probabilities.
class VisibilityTensor {
 public:
  VisibilityTensor() = default;
  VisibilityTensor(int n_devices, int horizon)
      : n_devices_(n_devices),
        horizon_(horizon),
        values_(static_cast<std::size_t>(kNumTechnologies) * n_devices *
                    n_devices * horizon,
                0.0) {}

  double at(Technology m, int i, int j, int k) const {
    return values_[offset(m, i, j, k)];
  }
  // Writes both (i,j) and (j,i).
  void set_symmetric(Technology m, int i, int j, int k, double v) {
    values_[offset(m, i, j, k)] = v;
    values_[offset(m, j, i, k)] = v;
  }
  void set(Technology m, int i, int j, int k, double v) {
    values_[offset(m, i, j, k)] = v;
  }

  int n_devices() const { return n_devices_; }
  int horizon() const { return horizon_; }
  const std::vector<double>& raw() const { return values_; }
  std::vector<double>& raw() { return values_; }

  bool operator==(const VisibilityTensor&) const = default;

 private:
  std::size_t offset(Technology m, int i, int j, int k) const {
    return ((static_cast<std::size_t>(index_of(m)) * n_devices_ + i) *
                n_devices_ +
            j) *
               horizon_ +
           k;
  }

  int n_devices_ = 0;
  int horizon_ = 0;
  std::vector<double> values_;
};

struct EnergyProfile {
  // budget[m][i]
  std::array<std::vector<double>, kNumTechnologies> budget;
  std::array<double, kNumTechnologies> send_cost{70.0, 100.0};
  std::array<double, kNumTechnologies> receive_cost{10.0, 7.0};
  // Off: the sender's pool pays send + receive cost for every transmission.
  // On: the sender pays the send cost and the receiver pays the receive cost.
  bool split_accounting = false;

  double transmission_cost(Technology m) const {
    return send_cost[index_of(m)] + receive_cost[index_of(m)];
  }
  bool operator==(const EnergyProfile&) const = default;
};

struct Scenario {
  int n_nodes = 0;
  int n_aps = 0;
  int n_types = 1;
  int horizon = 0;
  std::vector<Message> messages;
  VisibilityTensor visibility;
  EnergyProfile energy;
  std::array<double, kNumTechnologies> thresholds{0.97, 0.97};
  int tau = 1;
  std::array<bool, kNumTechnologies> enabled{true, true};

  int n_devices() const { return n_nodes + n_aps; }
  DeviceKind kind(int device) const {
    return device < n_nodes ? DeviceKind::kIoTNode : DeviceKind::kAccessPoint;
  }
  bool is_access_point(int device) const { return device >= n_nodes; }
  bool technology_enabled(Technology m) const { return enabled[index_of(m)]; }

  // True when a transmission i -> j with technology m at step k passes the
  // threshold, self-link and enabled-technology rules. Demand is not checked.
  bool link_usable(Technology m, int i, int j, int k) const {
    return i != j && technology_enabled(m) &&
           visibility.at(m, i, j, k) >= thresholds[index_of(m)];
  }

  // Index of the message i -> j whose window covers k, or -1.
  int message_at(int sender, int receiver, int step) const;

  int total_window_slots() const;
  int max_window_length() const;

  // Throws ScenarioError naming the first violated invariant.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

// rho[i][j][k] flattened; rho(i, j, k) == 1 iff a message window covers k.
class DemandTensor {
 public:
  DemandTensor(int n_devices, int horizon)
      : n_devices_(n_devices),
        horizon_(horizon),
        values_(static_cast<std::size_t>(n_devices) * n_devices * horizon, 0) {}

  std::uint8_t at(int i, int j, int k) const {
    return values_[(static_cast<std::size_t>(i) * n_devices_ + j) * horizon_ +
                   k];
  }
  void set(int i, int j, int k) {
    values_[(static_cast<std::size_t>(i) * n_devices_ + j) * horizon_ + k] = 1;
  }
  std::size_t count() const;

 private:
  int n_devices_;
  int horizon_;
  std::vector<std::uint8_t> values_;
};

DemandTensor derive_demand(const Scenario& s);

// Parameters of the randomized instance generator.
struct GenerationConfig {
  int n_nodes = 9;
  int n_aps = 2;
  int n_types = 2;
  int horizon = 20;

  std::array<double, kNumTechnologies> visibility_mean{0.85, 0.9};
  // Standard deviation of the normal before truncation to [0, 1].
  double visibility_std = 0.1;
  std::array<double, kNumTechnologies> thresholds{0.97, 0.97};

  double budget_min = 500.0;
  double budget_max = 700.0;
  std::array<double, kNumTechnologies> send_cost{70.0, 100.0};
  std::array<double, kNumTechnologies> receive_cost{10.0, 7.0};
  bool split_energy_accounting = false;

  // Probability that an admissible ordered pair exchanges messages at all.
  double pair_probability = 0.25;
  int messages_per_pair_min = 1;
  int messages_per_pair_max = 5;
  int window_length_min = 1;
  int window_length_max = 4;

  std::array<bool, kNumTechnologies> enabled{true, true};

  // Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

Scenario generate_scenario(const GenerationConfig& config, std::uint64_t seed);

// Copy of `s` with only the given technologies enabled.
Scenario restrict_technologies(const Scenario& s,
                               std::array<bool, kNumTechnologies> enabled);

// Canonical structured text (JSON) persistence.
std::string scenario_to_string(const Scenario& s);
Scenario scenario_from_string(const std::string& text);
void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace hybrid_aoi
