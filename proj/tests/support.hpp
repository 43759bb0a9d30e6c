#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "hybrid_aoi/model.hpp"
#include "hybrid_aoi/scenario.hpp"
#include "hybrid_aoi/solver.hpp"

namespace hybrid_aoi::testing {

// Hand-built instance with no visible links, ample budgets and no messages.
inline Scenario blank_scenario(int n_nodes, int n_aps, int horizon,
                               int n_types = 1) {
  Scenario s;
  s.n_nodes = n_nodes;
  s.n_aps = n_aps;
  s.n_types = n_types;
  s.horizon = horizon;
  s.visibility = VisibilityTensor(s.n_devices(), horizon);
  for (auto& pool : s.energy.budget) pool.assign(s.n_devices(), 10000.0);
  s.tau = 2;
  return s;
}

inline void add_message(Scenario& s, int sender, int receiver, int start,
                        int end, int data_type = 0) {
  int ordinal = 0;
  for (const Message& m : s.messages) {
    if (m.sender == sender && m.receiver == receiver) ++ordinal;
  }
  s.messages.push_back({sender, receiver, ordinal, data_type, start, end});
  s.tau = s.max_window_length() + 1;
}

// Makes the link usable for both directions over every step.
inline void open_link(Scenario& s, Technology m, int i, int j,
                      double v = 1.0) {
  for (int k = 0; k < s.horizon; ++k) s.visibility.set_symmetric(m, i, j, k, v);
}

// Random instance with N <= 4 devices, T <= 6 steps and at most 4 messages.
// Links are usable with probability about 0.6 and budgets allow between zero
// and a few transmissions, so every constraint family can bind.
inline Scenario tiny_scenario(std::mt19937_64& rng) {
  auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const int n = pick(2, 4);
    const int n_aps = pick(0, std::min(2, n - 1));
    Scenario s = blank_scenario(n - n_aps, n_aps, pick(1, 6), pick(1, 2));
    for (Technology m : kAllTechnologies) {
      for (int k = 0; k < s.horizon; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            if (s.is_access_point(i) && s.is_access_point(j)) continue;
            if (m == Technology::kOC && !s.is_access_point(i) &&
                !s.is_access_point(j)) {
              continue;
            }
            s.visibility.set_symmetric(m, i, j, k,
                                       unit(rng) < 0.6 ? 0.98 : 0.5);
          }
        }
      }
    }
    for (auto& pool : s.energy.budget) {
      for (double& b : pool) b = pick(0, 350);
    }
    s.energy.split_accounting = unit(rng) < 0.25;
    const int n_msgs = pick(1, 4);
    for (int attempt = 0; attempt < 20 && static_cast<int>(s.messages.size()) <
                                              n_msgs;
         ++attempt) {
      const int i = pick(0, n - 1);
      const int j = pick(0, n - 1);
      if (i == j || (s.is_access_point(i) && s.is_access_point(j))) continue;
      const int start = pick(0, s.horizon - 1);
      const int end = std::min(s.horizon - 1, start + pick(0, 3));
      bool clash = false;
      for (const Message& m : s.messages) {
        if (m.sender == i && m.receiver == j && m.window_start <= end &&
            start <= m.window_end) {
          clash = true;
        }
      }
      if (!clash) add_message(s, i, j, start, end, pick(0, s.n_types - 1));
    }
    if (s.messages.empty()) continue;
    s.validate();
    return s;
  }
}

inline std::array<double, 3> random_alpha(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::array<double, 3> a{e(rng), e(rng), e(rng)};
  const double sum = a[0] + a[1] + a[2];
  for (double& v : a) v /= sum;
  a[2] = 1.0 - a[0] - a[1];
  return a;
}

// Adds candidates in random order whenever the schedule stays feasible.
// `keep` is the probability of trying each candidate.
inline Schedule random_feasible_schedule(const Scenario& s,
                                         std::mt19937_64& rng,
                                         double keep = 0.7) {
  std::vector<Transmission> candidates = candidate_transmissions(s);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Schedule x = Schedule::empty_for(s);
  for (const Transmission& t : candidates) {
    if (unit(rng) >= keep) continue;
    x.add(t);
    if (!check_constraints(s, x).feasible()) x.remove(t);
  }
  return x;
}

}  // namespace hybrid_aoi::testing
