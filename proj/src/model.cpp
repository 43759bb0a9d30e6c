#include "hybrid_aoi/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hybrid_aoi {

namespace {

constexpr double kEnergyTolerance = 1e-9;

bool tx_less(const Transmission& a, const Transmission& b) {
  return tie_order(a, b) < 0;
}

}  // namespace

bool Schedule::add(const Transmission& t) {
  auto it = std::lower_bound(tx_.begin(), tx_.end(), t, tx_less);
  if (it != tx_.end() && *it == t) return false;
  tx_.insert(it, t);
  return true;
}

bool Schedule::remove(const Transmission& t) {
  auto it = std::lower_bound(tx_.begin(), tx_.end(), t, tx_less);
  if (it == tx_.end() || !(*it == t)) return false;
  tx_.erase(it);
  return true;
}

bool Schedule::contains(const Transmission& t) const {
  return std::binary_search(tx_.begin(), tx_.end(), t, tx_less);
}

bool tie_precedes(const Schedule& a, const Schedule& b) {
  const auto& ta = a.transmissions();
  const auto& tb = b.transmissions();
  const std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t p = 0; p < n; ++p) {
    const auto c = tie_order(ta[p], tb[p]);
    if (c != 0) return c < 0;
  }
  // The longer list has a real transmission where the shorter one ran out.
  return ta.size() > tb.size();
}

int EndogenousState::switch_count(int device) const {
  int switches = 0;
  Technology previous = Technology::kRF;
  for (int k = 0; k < horizon; ++k) {
    const Technology current = register_at(device, k);
    if (current != previous) ++switches;
    previous = current;
  }
  return switches;
}

int EndogenousState::switch_count() const {
  int switches = 0;
  for (int i = 0; i < n_devices; ++i) switches += switch_count(i);
  return switches;
}

namespace {

void check_indices(const Scenario& s, const Schedule& x) {
  if (x.n_devices() != s.n_devices() || x.horizon() != s.horizon) {
    throw std::invalid_argument("schedule dimensions do not match scenario");
  }
  for (const Transmission& t : x.transmissions()) {
    if (t.sender < 0 || t.sender >= s.n_devices() || t.receiver < 0 ||
        t.receiver >= s.n_devices() || t.step < 0 || t.step >= s.horizon) {
      throw std::invalid_argument("transmission index out of range");
    }
  }
}

}  // namespace

EndogenousState derive_endogenous(const Scenario& s, const Schedule& x) {
  check_indices(s, x);
  const int n = s.n_devices();
  EndogenousState state;
  state.n_devices = n;
  state.horizon = s.horizon;
  state.sent.assign(s.messages.size(), false);
  state.send_step.assign(s.messages.size(), -1);
  state.send_tech.assign(s.messages.size(), Technology::kRF);
  state.delta.resize(s.messages.size());
  for (std::size_t f = 0; f < s.messages.size(); ++f) {
    state.delta[f].assign(s.messages[f].window_length(), s.tau);
  }

  // activity[i][k] = technology used by device i at step k, -1 when idle.
  std::vector<int> activity(static_cast<std::size_t>(n) * s.horizon, -1);
  for (const Transmission& t : x.transmissions()) {
    const int f = s.message_at(t.sender, t.receiver, t.step);
    if (f < 0) {
      std::ostringstream os;
      os << "transmission (" << t.sender << "->" << t.receiver << ", "
         << technology_name(t.tech) << ", k=" << t.step
         << ") lies outside every message window";
      throw std::invalid_argument(os.str());
    }
    const Message& msg = s.messages[f];
    state.delta[f][t.step - msg.window_start] = t.step - msg.window_start + 1;
    state.sent[f] = true;
    state.send_step[f] = t.step;
    state.send_tech[f] = t.tech;
    for (int device : {t.sender, t.receiver}) {
      activity[static_cast<std::size_t>(device) * s.horizon + t.step] =
          index_of(t.tech);
    }
  }

  state.tech_register.resize(static_cast<std::size_t>(n) * s.horizon);
  for (int i = 0; i < n; ++i) {
    Technology current = Technology::kRF;
    for (int k = 0; k < s.horizon; ++k) {
      const std::size_t at = static_cast<std::size_t>(i) * s.horizon + k;
      if (activity[at] >= 0) current = static_cast<Technology>(activity[at]);
      state.tech_register[at] = current;
    }
  }
  return state;
}

NormalizationCoefficients normalization_coefficients(
    const Scenario& s, const std::array<double, kNumTechnologies>& se) {
  if (s.messages.empty()) {
    throw std::invalid_argument(
        "normalization undefined for a scenario without messages");
  }
  NormalizationCoefficients norm;
  norm.energy = static_cast<double>(s.messages.size()) *
                *std::max_element(se.begin(), se.end());
  norm.switching = static_cast<double>(s.n_devices()) * s.horizon;
  norm.delay = static_cast<double>(s.tau) * s.total_window_slots();
  if (!(norm.energy > 0.0)) {
    throw std::invalid_argument("transmission energies must be positive");
  }
  return norm;
}

ObjectiveConfig ObjectiveConfig::for_scenario(const Scenario& s,
                                              std::array<double, 3> alpha) {
  ObjectiveConfig cfg;
  cfg.alpha = alpha;
  for (Technology m : kAllTechnologies) {
    cfg.transmission_energy[index_of(m)] = s.energy.transmission_cost(m);
  }
  cfg.norm = normalization_coefficients(s, cfg.transmission_energy);
  cfg.validate();
  return cfg;
}

void ObjectiveConfig::validate() const {
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("alpha weights must sum to 1");
  }
  if (!(norm.energy > 0.0 && norm.switching > 0.0 && norm.delay > 0.0)) {
    throw std::invalid_argument("normalization coefficients must be > 0");
  }
  for (double se : transmission_energy) {
    if (!(se >= 0.0)) throw std::invalid_argument("SE must be >= 0");
  }
}

ObjectiveBreakdown combine_objective(const ObjectiveConfig& cfg,
                                     double energy_raw, double switching_raw,
                                     double delay_raw) {
  ObjectiveBreakdown out;
  out.energy_raw = energy_raw;
  out.switching_raw = switching_raw;
  out.delay_raw = delay_raw;
  out.energy_normalized = energy_raw / cfg.norm.energy;
  out.switching_normalized = switching_raw / cfg.norm.switching;
  out.delay_normalized = delay_raw / cfg.norm.delay;
  out.total = cfg.alpha[0] * out.energy_normalized +
              cfg.alpha[1] * out.switching_normalized +
              cfg.alpha[2] * out.delay_normalized;
  return out;
}

const char* constraint_name(ConstraintId id) {
  switch (id) {
    case ConstraintId::kDegree:
      return "degree";
    case ConstraintId::kDemand:
      return "demand";
    case ConstraintId::kVisibility:
      return "visibility";
    case ConstraintId::kSelfLink:
      return "self_link";
    case ConstraintId::kBusy:
      return "send_while_receiving";
    case ConstraintId::kEnergy:
      return "energy_budget";
    case ConstraintId::kAtMostOnce:
      return "at_most_once";
  }
  return "unknown";
}

bool FeasibilityReport::has(ConstraintId id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [id](const Violation& v) { return v.id == id; });
}

std::string FeasibilityReport::to_string() const {
  std::ostringstream os;
  for (const Violation& v : violations) {
    os << "(" << static_cast<int>(v.id) << ") " << constraint_name(v.id);
    for (const auto& [name, value] : v.indices) {
      os << " " << name << "=" << value;
    }
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
  }
  return os.str();
}

namespace {

// Energy charged to `device` for one transmission `t`.
double charge(const Scenario& s, const Transmission& t, int device) {
  const int m = index_of(t.tech);
  if (!s.energy.split_accounting) {
    return device == t.sender ? s.energy.send_cost[m] + s.energy.receive_cost[m]
                              : 0.0;
  }
  if (device == t.sender) return s.energy.send_cost[m];
  if (device == t.receiver) return s.energy.receive_cost[m];
  return 0.0;
}

}  // namespace

double consumed_energy(const Scenario& s, const Schedule& x, int device,
                       Technology m) {
  double used = 0.0;
  for (const Transmission& t : x.transmissions()) {
    if (t.tech == m) used += charge(s, t, device);
  }
  return used;
}

FeasibilityReport check_constraints(const Scenario& s, const Schedule& x) {
  check_indices(s, x);
  FeasibilityReport report;
  auto flag = [&report](ConstraintId id,
                        std::vector<std::pair<std::string, int>> indices,
                        std::string detail = {}) {
    report.violations.push_back({id, std::move(indices), std::move(detail)});
  };

  const int n = s.n_devices();
  const std::size_t cells = static_cast<std::size_t>(n) * s.horizon;
  std::vector<int> out_degree(cells, 0);
  std::vector<int> in_degree(cells, 0);
  std::vector<int> sends_in_window(s.messages.size(), 0);

  for (const Transmission& t : x.transmissions()) {
    const int m = index_of(t.tech);
    std::vector<std::pair<std::string, int>> where = {
        {"i", t.sender}, {"j", t.receiver}, {"m", m}, {"k", t.step}};
    if (t.sender == t.receiver) {
      flag(ConstraintId::kSelfLink, where);
    }
    const int f = s.message_at(t.sender, t.receiver, t.step);
    if (f < 0) {
      flag(ConstraintId::kDemand, where, "rho is 0");
    } else {
      ++sends_in_window[f];
    }
    if (!s.technology_enabled(t.tech)) {
      flag(ConstraintId::kVisibility, where, "technology disabled");
    } else if (t.sender != t.receiver &&
               s.visibility.at(t.tech, t.sender, t.receiver, t.step) <
                   s.thresholds[m]) {
      std::ostringstream os;
      os << "v=" << s.visibility.at(t.tech, t.sender, t.receiver, t.step)
         << " < sigma=" << s.thresholds[m];
      flag(ConstraintId::kVisibility, where, os.str());
    }
    ++out_degree[static_cast<std::size_t>(t.sender) * s.horizon + t.step];
    ++in_degree[static_cast<std::size_t>(t.receiver) * s.horizon + t.step];
  }

  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < s.horizon; ++k) {
      const std::size_t at = static_cast<std::size_t>(i) * s.horizon + k;
      if (out_degree[at] > 1) {
        flag(ConstraintId::kDegree, {{"i", i}, {"k", k}},
             std::to_string(out_degree[at]) + " outgoing");
      }
      if (in_degree[at] > 1) {
        flag(ConstraintId::kDegree, {{"j", i}, {"k", k}},
             std::to_string(in_degree[at]) + " incoming");
      }
      if (out_degree[at] > 0 && in_degree[at] > 0) {
        flag(ConstraintId::kBusy, {{"i", i}, {"k", k}});
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    for (Technology m : kAllTechnologies) {
      const double used = consumed_energy(s, x, i, m);
      const double budget = s.energy.budget[index_of(m)][i];
      if (used > budget + kEnergyTolerance) {
        std::ostringstream os;
        os << "uses " << used << " of " << budget;
        flag(ConstraintId::kEnergy, {{"i", i}, {"m", index_of(m)}}, os.str());
      }
    }
  }

  for (std::size_t f = 0; f < s.messages.size(); ++f) {
    if (sends_in_window[f] > 1) {
      flag(ConstraintId::kAtMostOnce, {{"f", static_cast<int>(f)}},
           std::to_string(sends_in_window[f]) + " sends");
    }
  }
  return report;
}

ObjectiveBreakdown evaluate_schedule(const Scenario& s, const Schedule& x,
                                     const ObjectiveConfig& cfg) {
  FeasibilityReport report = check_constraints(s, x);
  if (!report.feasible()) throw InfeasibleSchedule(std::move(report));
  const EndogenousState state = derive_endogenous(s, x);

  double energy = 0.0;
  for (const Transmission& t : x.transmissions()) {
    energy += cfg.transmission_energy[index_of(t.tech)];
  }
  double delay = 0.0;
  for (const auto& window : state.delta) {
    for (int d : window) delay += d;
  }
  return combine_objective(cfg, energy, state.switch_count(), delay);
}

}  // namespace hybrid_aoi
