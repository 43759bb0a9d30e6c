#include "hybrid_aoi/linear_model.hpp"

#include <cmath>
#include <stdexcept>

namespace hybrid_aoi {

int LinearModel::add_variable(Variable v) {
  const int index = static_cast<int>(variables_.size());
  if (!by_name_.emplace(v.name, index).second) {
    throw std::invalid_argument("duplicate variable name " + v.name);
  }
  variables_.push_back(std::move(v));
  return index;
}

void LinearModel::add_row(Row row) {
  for (const Term& t : row.terms) {
    if (t.var < 0 || t.var >= static_cast<int>(variables_.size())) {
      throw std::invalid_argument("row " + row.name +
                                  " references an unknown variable");
    }
  }
  rows_.push_back(std::move(row));
}

void LinearModel::add_objective_term(int var, double coef) {
  if (var < 0 || var >= static_cast<int>(variables_.size())) {
    throw std::invalid_argument("objective references an unknown variable");
  }
  objective_.push_back({var, coef});
}

std::optional<int> LinearModel::find_variable(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

double LinearModel::evaluate_objective(const std::vector<double>& values) const {
  double total = objective_constant_;
  for (const Term& t : objective_) total += t.coef * values.at(t.var);
  return total;
}

std::vector<std::string> LinearModel::violated_rows(
    const std::vector<double>& values, double tolerance) const {
  std::vector<std::string> out;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const double value = values.at(v);
    if (value < variables_[v].lower - tolerance ||
        value > variables_[v].upper + tolerance) {
      out.push_back("bound:" + variables_[v].name);
    }
  }
  for (const Row& row : rows_) {
    double lhs = 0.0;
    for (const Term& t : row.terms) lhs += t.coef * values.at(t.var);
    const bool ok = row.sense == Sense::kLessEqual
                        ? lhs <= row.rhs + tolerance
                    : row.sense == Sense::kGreaterEqual
                        ? lhs >= row.rhs - tolerance
                        : std::abs(lhs - row.rhs) <= tolerance;
    if (!ok) out.push_back(row.name);
  }
  return out;
}

std::string transmission_variable_name(const Transmission& t) {
  return "x_" + std::to_string(t.sender) + "_" + std::to_string(t.receiver) +
         "_" + technology_name(t.tech) + "_" + std::to_string(t.step);
}

namespace {

std::string ik_name(const char* prefix, int i, int k) {
  return std::string(prefix) + "_" + std::to_string(i) + "_" +
         std::to_string(k);
}

}  // namespace

LinearModel build_milp(const Scenario& s, const ObjectiveConfig& cfg) {
  if (s.messages.empty()) {
    throw std::invalid_argument("cannot build a model without messages");
  }
  cfg.validate();
  LinearModel model;
  const int n = s.n_devices();
  const int horizon = s.horizon;
  const double energy_weight = cfg.alpha[0] / cfg.norm.energy;
  const double switch_weight = cfg.alpha[1] / cfg.norm.switching;
  const double delay_weight = cfg.alpha[2] / cfg.norm.delay;

  // Per-(device, step) lists of transmission variables touching the device.
  const std::size_t cells = static_cast<std::size_t>(n) * horizon;
  std::vector<std::vector<int>> outgoing(cells), incoming(cells);
  std::vector<std::vector<int>> uses_oc(cells);
  std::vector<std::vector<Term>> energy_rows(
      static_cast<std::size_t>(n) * kNumTechnologies);

  for (std::size_t f = 0; f < s.messages.size(); ++f) {
    const Message& msg = s.messages[f];
    Row once{"once_" + std::to_string(f), {}, Sense::kLessEqual, 1.0};
    for (int k = msg.window_start; k <= msg.window_end; ++k) {
      const int position = k - msg.window_start + 1;
      for (Technology m : kAllTechnologies) {
        if (!s.link_usable(m, msg.sender, msg.receiver, k)) continue;
        const Transmission t{msg.sender, msg.receiver, m, k};
        Variable v;
        v.name = transmission_variable_name(t);
        v.role = VarRole::kTransmission;
        v.i = msg.sender;
        v.j = msg.receiver;
        v.m = index_of(m);
        v.k = k;
        const int x = model.add_variable(std::move(v));
        const double coef =
            energy_weight * cfg.transmission_energy[index_of(m)] -
            delay_weight * (s.tau - position);
        model.add_objective_term(x, coef);
        once.terms.push_back({x, 1.0});
        outgoing[static_cast<std::size_t>(msg.sender) * horizon + k].push_back(
            x);
        incoming[static_cast<std::size_t>(msg.receiver) * horizon + k]
            .push_back(x);
        if (m == Technology::kOC) {
          uses_oc[static_cast<std::size_t>(msg.sender) * horizon + k]
              .push_back(x);
          uses_oc[static_cast<std::size_t>(msg.receiver) * horizon + k]
              .push_back(x);
        }
        const int mi = index_of(m);
        if (s.energy.split_accounting) {
          energy_rows[static_cast<std::size_t>(msg.sender) * kNumTechnologies +
                      mi]
              .push_back({x, s.energy.send_cost[mi]});
          energy_rows[static_cast<std::size_t>(msg.receiver) *
                          kNumTechnologies +
                      mi]
              .push_back({x, s.energy.receive_cost[mi]});
        } else {
          energy_rows[static_cast<std::size_t>(msg.sender) * kNumTechnologies +
                      mi]
              .push_back({x, s.energy.transmission_cost(m)});
        }
      }
    }
    if (once.terms.size() > 1) model.add_row(std::move(once));
  }
  model.set_objective_constant(delay_weight * s.tau * s.total_window_slots());

  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < horizon; ++k) {
      const std::size_t at = static_cast<std::size_t>(i) * horizon + k;
      auto unit_row = [](const std::string& name, const std::vector<int>& a,
                         const std::vector<int>& b) {
        Row row{name, {}, Sense::kLessEqual, 1.0};
        for (int x : a) row.terms.push_back({x, 1.0});
        for (int x : b) row.terms.push_back({x, 1.0});
        return row;
      };
      if (outgoing[at].size() > 1) {
        model.add_row(unit_row(ik_name("out", i, k), outgoing[at], {}));
      }
      if (incoming[at].size() > 1) {
        model.add_row(unit_row(ik_name("in", i, k), incoming[at], {}));
      }
      if (!outgoing[at].empty() && !incoming[at].empty()) {
        model.add_row(
            unit_row(ik_name("busy", i, k), outgoing[at], incoming[at]));
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    for (Technology m : kAllTechnologies) {
      auto& terms =
          energy_rows[static_cast<std::size_t>(i) * kNumTechnologies +
                      index_of(m)];
      if (terms.empty()) continue;
      model.add_row({"energy_" + std::to_string(i) + "_" + technology_name(m),
                     std::move(terms), Sense::kLessEqual,
                     s.energy.budget[index_of(m)][i]});
    }
  }

  // Technology register: s_k = a_OC + w_k with w_k = (1 - a_RF - a_OC) s_{k-1}.
  for (int i = 0; i < n; ++i) {
    int previous = -1;
    for (int k = 0; k < horizon; ++k) {
      const std::size_t at = static_cast<std::size_t>(i) * horizon + k;
      Variable reg{ik_name("s", i, k), VarKind::kBinary, 0.0, 1.0,
                   VarRole::kRegister, i, -1, -1, k};
      const int s_var = model.add_variable(std::move(reg));
      Variable sw{ik_name("z", i, k), VarKind::kBinary, 0.0, 1.0,
                  VarRole::kSwitch, i, -1, -1, k};
      const int z_var = model.add_variable(std::move(sw));
      model.add_objective_term(z_var, switch_weight);

      std::vector<Term> activity;
      for (int x : outgoing[at]) activity.push_back({x, 1.0});
      for (int x : incoming[at]) activity.push_back({x, 1.0});

      Row propagate{ik_name("reg", i, k), {{s_var, 1.0}}, Sense::kEqual, 0.0};
      for (int x : uses_oc[at]) propagate.terms.push_back({x, -1.0});
      if (previous < 0) {
        model.add_row(std::move(propagate));
        model.add_row({ik_name("zup", i, k), {{z_var, 1.0}, {s_var, -1.0}},
                       Sense::kGreaterEqual, 0.0});
      } else {
        Variable hold{ik_name("w", i, k), VarKind::kBinary, 0.0, 1.0,
                      VarRole::kHold, i, -1, -1, k};
        const int w_var = model.add_variable(std::move(hold));
        propagate.terms.push_back({w_var, -1.0});
        model.add_row(std::move(propagate));

        // w <= 1 - activity
        Row idle{ik_name("wact", i, k), {{w_var, 1.0}}, Sense::kLessEqual, 1.0};
        for (const Term& t : activity) idle.terms.push_back(t);
        model.add_row(std::move(idle));
        // w <= s_{k-1}
        model.add_row({ik_name("wprev", i, k),
                       {{w_var, 1.0}, {previous, -1.0}},
                       Sense::kLessEqual,
                       0.0});
        // w >= (1 - activity) + s_{k-1} - 1
        Row lower{ik_name("wlow", i, k),
                  {{w_var, 1.0}, {previous, -1.0}},
                  Sense::kGreaterEqual,
                  0.0};
        for (const Term& t : activity) lower.terms.push_back(t);
        model.add_row(std::move(lower));

        model.add_row({ik_name("zup", i, k),
                       {{z_var, 1.0}, {s_var, -1.0}, {previous, 1.0}},
                       Sense::kGreaterEqual,
                       0.0});
        model.add_row({ik_name("zdown", i, k),
                       {{z_var, 1.0}, {s_var, 1.0}, {previous, -1.0}},
                       Sense::kGreaterEqual,
                       0.0});
      }
      previous = s_var;
    }
  }
  return model;
}

std::vector<double> induced_assignment(const LinearModel& model,
                                       const Scenario& s, const Schedule& x) {
  std::vector<double> values(model.variables().size(), 0.0);
  for (const Transmission& t : x.transmissions()) {
    auto var = model.find_variable(transmission_variable_name(t));
    if (!var) {
      throw std::invalid_argument("transmission " +
                                  transmission_variable_name(t) +
                                  " was eliminated from the model");
    }
    values[*var] = 1.0;
  }
  const EndogenousState state = derive_endogenous(s, x);
  std::vector<int> active(static_cast<std::size_t>(s.n_devices()) * s.horizon,
                          0);
  for (const Transmission& t : x.transmissions()) {
    active[static_cast<std::size_t>(t.sender) * s.horizon + t.step] = 1;
    active[static_cast<std::size_t>(t.receiver) * s.horizon + t.step] = 1;
  }
  auto reg = [&](int i, int k) {
    return k < 0 ? 0.0 : static_cast<double>(index_of(state.register_at(i, k)));
  };
  for (std::size_t v = 0; v < model.variables().size(); ++v) {
    const Variable& var = model.variables()[v];
    switch (var.role) {
      case VarRole::kRegister:
        values[v] = reg(var.i, var.k);
        break;
      case VarRole::kSwitch:
        values[v] = std::abs(reg(var.i, var.k) - reg(var.i, var.k - 1));
        break;
      case VarRole::kHold:
        values[v] =
            active[static_cast<std::size_t>(var.i) * s.horizon + var.k] != 0
                ? 0.0
                : reg(var.i, var.k - 1);
        break;
      default:
        break;
    }
  }
  return values;
}

}  // namespace hybrid_aoi
