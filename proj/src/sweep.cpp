#include "hybrid_aoi/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hybrid_aoi/csv.hpp"
#include "hybrid_aoi/parallel.hpp"

namespace hybrid_aoi {

namespace {

std::array<bool, kNumTechnologies> only(Technology tech) {
  std::array<bool, kNumTechnologies> enabled{false, false};
  enabled[index_of(tech)] = true;
  return enabled;
}

BnbOptions solver_options(const SweepSettings& settings) {
  BnbOptions options;
  options.gap_target = settings.gap_target;
  options.node_limit = settings.node_limit;
  options.time_limit_seconds = settings.time_limit_seconds;
  return options;
}

// Evenly spaced values i / per_unit for i in [0, count].
std::vector<double> grid(int count, double per_unit) {
  std::vector<double> out;
  for (int i = 0; i <= count; ++i) out.push_back(i / per_unit);
  return out;
}

void require_seeds(const SweepSettings& settings) {
  if (settings.seeds.empty()) {
    throw std::invalid_argument("sweep needs at least one seed");
  }
}

}  // namespace

double energy_percent(const Scenario& s, const Schedule& x, Technology tech) {
  double sum = 0.0;
  int devices = 0;
  for (int i = 0; i < s.n_devices(); ++i) {
    const double budget = s.energy.budget[index_of(tech)][i];
    if (budget <= 0.0) continue;
    sum += 100.0 * consumed_energy(s, x, i, tech) / budget;
    ++devices;
  }
  return devices == 0 ? 0.0 : sum / devices;
}

double delay_percent(const Scenario& s, const Schedule& x) {
  if (s.messages.empty()) {
    throw std::invalid_argument("delay percentage needs at least one message");
  }
  const EndogenousState state = derive_endogenous(s, x);
  double sum = 0.0;
  for (std::size_t f = 0; f < s.messages.size(); ++f) {
    const int d = state.sent[f]
                      ? state.send_step[f] - s.messages[f].window_start + 1
                      : s.tau;
    sum += 100.0 * (d - 1) / (s.tau - 1);
  }
  return sum / static_cast<double>(s.messages.size());
}

bool all_sent_at_window_start(const Scenario& s, const Schedule& x) {
  if (x.empty()) return false;
  const EndogenousState state = derive_endogenous(s, x);
  for (std::size_t f = 0; f < s.messages.size(); ++f) {
    if (state.sent[f] && state.send_step[f] != s.messages[f].window_start) {
      return false;
    }
  }
  return true;
}

std::vector<double> default_alpha1_grid() { return grid(12, 40.0); }

std::vector<double> default_alpha2_grid() { return grid(10, 20.0); }

std::vector<ParetoPoint> pareto_sweep_alpha1(const SweepSettings& settings,
                                             Technology tech,
                                             const std::vector<double>& alphas) {
  require_seeds(settings);
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("alpha1 values must lie in [0,1]");
    }
  }
  std::vector<Scenario> scenarios;
  for (std::uint64_t seed : settings.seeds) {
    scenarios.push_back(restrict_technologies(
        generate_scenario(settings.generation, seed), only(tech)));
  }
  const std::size_t n_seeds = scenarios.size();
  struct Cell {
    double energy = 0.0;
    double delay = 0.0;
    int scheduled = 0;
    bool zero_delay = true;
  };
  std::vector<Cell> cells(alphas.size() * n_seeds);
  const BnbOptions options = solver_options(settings);
  parallel_for(cells.size(), settings.workers, [&](std::size_t index) {
    const double a1 = alphas[index / n_seeds];
    const Scenario& s = scenarios[index % n_seeds];
    const ObjectiveConfig cfg =
        ObjectiveConfig::for_scenario(s, {a1, 0.0, 1.0 - a1});
    const Solution sol = solve_bnb(s, cfg, options);
    Cell& cell = cells[index];
    cell.energy = energy_percent(s, sol.schedule, tech);
    cell.delay = delay_percent(s, sol.schedule);
    cell.scheduled = static_cast<int>(sol.schedule.size());
    cell.zero_delay =
        sol.schedule.empty() || all_sent_at_window_start(s, sol.schedule);
  });

  std::vector<ParetoPoint> out;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    ParetoPoint point;
    point.alpha1 = alphas[a];
    bool zero_delay = true;
    for (std::size_t k = 0; k < n_seeds; ++k) {
      const Cell& cell = cells[a * n_seeds + k];
      point.avg_energy_pct += cell.energy;
      point.avg_delay_pct += cell.delay;
      point.n_scheduled += cell.scheduled;
      zero_delay = zero_delay && cell.zero_delay;
    }
    point.avg_energy_pct /= static_cast<double>(n_seeds);
    point.avg_delay_pct /= static_cast<double>(n_seeds);
    point.zero_delay = zero_delay && point.n_scheduled > 0;
    out.push_back(point);
  }
  return out;
}

std::vector<Alpha2Result> grid_search_alpha2(const SweepSettings& settings,
                                             double alpha1,
                                             double threshold_pct,
                                             const std::vector<double>& alphas) {
  require_seeds(settings);
  if (!(alpha1 >= 0.0 && alpha1 <= 1.0)) {
    throw std::invalid_argument("alpha1 must lie in [0,1]");
  }
  if (!(threshold_pct > 0.0)) {
    throw std::invalid_argument("threshold_pct must be positive");
  }
  std::vector<Scenario> scenarios;
  for (std::uint64_t seed : settings.seeds) {
    scenarios.push_back(generate_scenario(settings.generation, seed));
  }
  const std::size_t n_seeds = scenarios.size();
  const BnbOptions options = solver_options(settings);

  // Each sub-objective optimized alone; reference[k][t] is the normalized value of
  // term t in the reference solution for term t on seed k.
  std::vector<std::array<double, 3>> reference(n_seeds);
  parallel_for(n_seeds * 3, settings.workers, [&](std::size_t index) {
    const std::size_t k = index / 3;
    const int t = static_cast<int>(index % 3);
    std::array<double, 3> alpha{0.0, 0.0, 0.0};
    alpha[t] = 1.0;
    const ObjectiveConfig cfg = ObjectiveConfig::for_scenario(scenarios[k], alpha);
    const ObjectiveBreakdown b = solve_bnb(scenarios[k], cfg, options).objective;
    const double values[3] = {b.energy_normalized, b.switching_normalized,
                              b.delay_normalized};
    reference[k][t] = values[t];
  });

  std::vector<Alpha2Result> out(alphas.size());
  std::vector<std::size_t> active;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    out[a].alpha2 = alphas[a];
    if (!(alphas[a] >= 0.0 && alphas[a] <= 1.0)) {
      throw std::invalid_argument("alpha2 values must lie in [0,1]");
    }
    if (alpha1 + alphas[a] > 1.0 + 1e-12) {
      out[a].skipped = true;
      out[a].note = "alpha1 + alpha2 > 1";
    } else {
      active.push_back(a);
    }
  }
  std::vector<std::array<double, 3>> deviation(active.size() * n_seeds);
  parallel_for(deviation.size(), settings.workers, [&](std::size_t index) {
    const double a2 = alphas[active[index / n_seeds]];
    const std::size_t k = index % n_seeds;
    const double a3 = std::max(0.0, 1.0 - alpha1 - a2);
    const ObjectiveConfig cfg =
        ObjectiveConfig::for_scenario(scenarios[k], {alpha1, a2, a3});
    const ObjectiveBreakdown b = solve_bnb(scenarios[k], cfg, options).objective;
    deviation[index] = {
        100.0 * std::abs(b.energy_normalized - reference[k][0]),
        100.0 * std::abs(b.switching_normalized - reference[k][1]),
        100.0 * std::abs(b.delay_normalized - reference[k][2])};
  });

  for (std::size_t n = 0; n < active.size(); ++n) {
    Alpha2Result& r = out[active[n]];
    for (std::size_t k = 0; k < n_seeds; ++k) {
      const auto& d = deviation[n * n_seeds + k];
      r.dev_energy += d[0];
      r.dev_switch += d[1];
      r.dev_delay += d[2];
    }
    r.dev_energy /= static_cast<double>(n_seeds);
    r.dev_switch /= static_cast<double>(n_seeds);
    r.dev_delay /= static_cast<double>(n_seeds);
    const double a3 = 1.0 - alpha1 - r.alpha2;
    const bool energy_ok = alpha1 <= 0.0 || r.dev_energy <= threshold_pct;
    const bool switch_ok = r.alpha2 <= 0.0 || r.dev_switch <= threshold_pct;
    const bool delay_ok = a3 <= 1e-12 || r.dev_delay <= threshold_pct;
    r.accepted = energy_ok && switch_ok && delay_ok;
    if (r.alpha2 <= 0.0) r.note = "switching unconstrained";
  }
  return out;
}

void write_pareto_csv(const std::vector<ParetoPoint>& points,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "alpha1,energy_pct,delay_pct,n_scheduled,zero_delay\n";
  for (const ParetoPoint& p : points) {
    out << format_number(p.alpha1) << "," << format_number(p.avg_energy_pct)
        << "," << format_number(p.avg_delay_pct) << "," << p.n_scheduled << ","
        << (p.zero_delay ? 1 : 0) << "\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_alpha2_csv(const std::vector<Alpha2Result>& results,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "alpha2,dev_energy,dev_switch,dev_delay,accepted,skipped,note\n";
  for (const Alpha2Result& r : results) {
    out << format_number(r.alpha2) << ",";
    if (r.skipped) {
      out << ",,,0,1,";
    } else {
      out << format_number(r.dev_energy) << "," << format_number(r.dev_switch)
          << "," << format_number(r.dev_delay) << "," << (r.accepted ? 1 : 0)
          << ",0,";
    }
    out << csv_escape(r.note) << "\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace hybrid_aoi
