#include "hybrid_aoi/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace hybrid_aoi {

namespace {

// Objective totals closer than this are ties.
constexpr double kTieEpsilon = 1e-9;
constexpr double kEnergyTolerance = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Charges of one transmission: {sender pool, receiver pool}.
std::pair<double, double> charges(const Scenario& s, Technology m) {
  const int t = index_of(m);
  if (s.energy.split_accounting) {
    return {s.energy.send_cost[t], s.energy.receive_cost[t]};
  }
  return {s.energy.send_cost[t] + s.energy.receive_cost[t], 0.0};
}

}  // namespace

const char* proof_name(ProofStatus p) {
  switch (p) {
    case ProofStatus::kOptimal:
      return "optimal";
    case ProofStatus::kGapBounded:
      return "gap_bounded";
    case ProofStatus::kHeuristic:
      return "heuristic";
  }
  return "unknown";
}

std::vector<Transmission> candidate_transmissions(const Scenario& s) {
  std::vector<Transmission> out;
  for (const Message& msg : s.messages) {
    for (int k = msg.window_start; k <= msg.window_end; ++k) {
      for (Technology m : kAllTechnologies) {
        if (s.link_usable(m, msg.sender, msg.receiver, k)) {
          out.push_back({msg.sender, msg.receiver, m, k});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return tie_order(a, b) < 0;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Brute force

namespace {

class Enumerator {
 public:
  Enumerator(const Scenario& s, const ObjectiveConfig& cfg)
      : s_(s),
        cfg_(cfg),
        current_(Schedule::empty_for(s)),
        sent_(s.messages.size(), false),
        remaining_(kNumTechnologies) {
    for (Technology m : kAllTechnologies) {
      remaining_[index_of(m)] = s.energy.budget[index_of(m)];
    }
  }

  void run() { visit_step(0); }

  bool found() const { return found_; }
  const Schedule& best() const { return best_; }
  std::int64_t leaves() const { return leaves_; }

 private:
  struct Option {
    Transmission t;
    int message;
  };

  void visit_step(int k) {
    if (k == s_.horizon) {
      ++leaves_;
      const double total = evaluate_schedule(s_, current_, cfg_).total;
      if (!found_ || total < best_total_ - kTieEpsilon) {
        found_ = true;
        best_total_ = total;
        best_ = current_;
      }
      return;
    }
    std::vector<Option> options;
    for (std::size_t f = 0; f < s_.messages.size(); ++f) {
      const Message& msg = s_.messages[f];
      if (sent_[f] || !msg.covers(k)) continue;
      for (Technology m : kAllTechnologies) {
        if (s_.link_usable(m, msg.sender, msg.receiver, k)) {
          options.push_back({{msg.sender, msg.receiver, m, k},
                             static_cast<int>(f)});
        }
      }
    }
    std::sort(options.begin(), options.end(),
              [](const Option& a, const Option& b) {
                return tie_order(a.t, b.t) < 0;
              });
    std::vector<bool> used(s_.n_devices(), false);
    extend_matching(k, options, 0, used);
  }

  // Emits every matching that extends the chosen prefix with options at
  // index >= from, in tie-break order (extensions before the prefix itself).
  void extend_matching(int k, const std::vector<Option>& options,
                       std::size_t from, std::vector<bool>& used) {
    for (std::size_t p = from; p < options.size(); ++p) {
      const Option& o = options[p];
      if (used[o.t.sender] || used[o.t.receiver]) continue;
      const auto [send_charge, receive_charge] = charges(s_, o.t.tech);
      const int m = index_of(o.t.tech);
      if (remaining_[m][o.t.sender] + kEnergyTolerance < send_charge ||
          remaining_[m][o.t.receiver] + kEnergyTolerance < receive_charge) {
        continue;
      }
      used[o.t.sender] = used[o.t.receiver] = true;
      remaining_[m][o.t.sender] -= send_charge;
      remaining_[m][o.t.receiver] -= receive_charge;
      sent_[o.message] = true;
      current_.add(o.t);

      extend_matching(k, options, p + 1, used);

      current_.remove(o.t);
      sent_[o.message] = false;
      remaining_[m][o.t.sender] += send_charge;
      remaining_[m][o.t.receiver] += receive_charge;
      used[o.t.sender] = used[o.t.receiver] = false;
    }
    visit_step(k + 1);
  }

  const Scenario& s_;
  const ObjectiveConfig& cfg_;
  Schedule current_;
  std::vector<bool> sent_;
  std::vector<std::vector<double>> remaining_;
  bool found_ = false;
  double best_total_ = 0.0;
  Schedule best_;
  std::int64_t leaves_ = 0;
};

void require_inputs(const Scenario& s, const ObjectiveConfig& cfg) {
  if (s.messages.empty()) {
    throw std::invalid_argument("scenario has no messages to schedule");
  }
  cfg.validate();
}

}  // namespace

Solution solve_bruteforce(const Scenario& s, const ObjectiveConfig& cfg,
                          const BruteForceLimits& limits) {
  require_inputs(s, cfg);
  const auto start = Clock::now();
  double estimate = 1.0;
  for (const Message& msg : s.messages) {
    int slots = 0;
    for (int k = msg.window_start; k <= msg.window_end; ++k) {
      for (Technology m : kAllTechnologies) {
        if (s.link_usable(m, msg.sender, msg.receiver, k)) ++slots;
      }
    }
    estimate *= 1.0 + slots;
  }
  if (estimate > limits.max_schedules) {
    throw SolverLimitError("brute force search space estimate " +
                           std::to_string(estimate) + " exceeds cap " +
                           std::to_string(limits.max_schedules) +
                           "; use solve_bnb");
  }
  Enumerator search(s, cfg);
  search.run();
  Solution out;
  out.schedule = search.best();
  out.objective = evaluate_schedule(s, out.schedule, cfg);
  out.proof = ProofStatus::kOptimal;
  out.stats.nodes = search.leaves();
  out.stats.best_bound = out.objective.total;
  out.stats.elapsed_seconds = seconds_since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Greedy

Solution solve_greedy(const Scenario& s, const ObjectiveConfig& cfg) {
  require_inputs(s, cfg);
  const auto start = Clock::now();
  Schedule schedule = Schedule::empty_for(s);
  double current = evaluate_schedule(s, schedule, cfg).total;
  std::vector<bool> sent(s.messages.size(), false);
  std::vector<std::vector<double>> remaining(kNumTechnologies);
  for (Technology m : kAllTechnologies) {
    remaining[index_of(m)] = s.energy.budget[index_of(m)];
  }
  std::int64_t tried = 0;

  struct Option {
    Transmission t;
    int message;
    int deadline;
  };
  for (int k = 0; k < s.horizon; ++k) {
    std::vector<Option> options;
    for (std::size_t f = 0; f < s.messages.size(); ++f) {
      const Message& msg = s.messages[f];
      if (!msg.covers(k)) continue;
      for (Technology m : kAllTechnologies) {
        if (s.link_usable(m, msg.sender, msg.receiver, k)) {
          options.push_back({{msg.sender, msg.receiver, m, k},
                             static_cast<int>(f), msg.window_end});
        }
      }
    }
    std::sort(options.begin(), options.end(),
              [](const Option& a, const Option& b) {
                if (a.deadline != b.deadline) return a.deadline < b.deadline;
                return tie_order(a.t, b.t) < 0;
              });
    std::vector<bool> used(s.n_devices(), false);
    for (const Option& o : options) {
      if (sent[o.message] || used[o.t.sender] || used[o.t.receiver]) continue;
      const int m = index_of(o.t.tech);
      const auto [send_charge, receive_charge] = charges(s, o.t.tech);
      if (remaining[m][o.t.sender] + kEnergyTolerance < send_charge ||
          remaining[m][o.t.receiver] + kEnergyTolerance < receive_charge) {
        continue;
      }
      ++tried;
      schedule.add(o.t);
      const double candidate = evaluate_schedule(s, schedule, cfg).total;
      if (candidate < current - kTieEpsilon) {
        current = candidate;
        sent[o.message] = true;
        used[o.t.sender] = used[o.t.receiver] = true;
        remaining[m][o.t.sender] -= send_charge;
        remaining[m][o.t.receiver] -= receive_charge;
      } else {
        schedule.remove(o.t);
      }
    }
  }
  Solution out;
  out.schedule = std::move(schedule);
  out.objective = evaluate_schedule(s, out.schedule, cfg);
  out.proof = ProofStatus::kHeuristic;
  out.stats.nodes = tried;
  out.stats.best_bound = -std::numeric_limits<double>::infinity();
  out.stats.elapsed_seconds = seconds_since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Branch and bound
//
// The tree branches on the candidate transmissions in tie-break order,
// "include" before "skip"; this visits complete schedules in exactly the
// tie-break order, so the first optimum found is the preferred one.
//
// Objective decomposition used for bounding:
//   total = c0 + sum_{sent f} value(f, slot, tech) + w2 * switches
// with c0 = w3 * tau * slots and value = w1 * SE[m] - w3 * (tau - d).
// A node's bound adds, for every unsent message, the best non-positive value
// among its undecided candidates whose technology the sender can still
// afford, and keeps only the best `capacity` such values per sender.

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const Scenario& s, const ObjectiveConfig& cfg,
                 const BnbOptions& options)
      : s_(s), cfg_(cfg), options_(options) {
    setup();
  }

  Solution run() {
    start_ = Clock::now();
    Solution seed;
    if (options_.seed_with_greedy) {
      seed = solve_greedy(s_, cfg_);
    } else {
      seed.schedule = Schedule::empty_for(s_);
      seed.objective = evaluate_schedule(s_, seed.schedule, cfg_);
    }
    incumbent_ = seed.schedule;
    incumbent_total_ = seed.objective.total;
    incumbent_from_search_ = false;
    if (options_.on_incumbent) options_.on_incumbent(0, incumbent_total_);

    pruned_min_bound_ = std::numeric_limits<double>::infinity();
    aborted_ = false;
    visit(0);

    Solution out;
    out.schedule = incumbent_;
    out.objective = evaluate_schedule(s_, out.schedule, cfg_);
    double bound = std::min(out.objective.total, pruned_min_bound_);
    if (aborted_) {
      for (double b : open_bounds_) bound = std::min(bound, b);
    }
    out.stats.nodes = nodes_;
    out.stats.best_bound = bound;
    out.stats.elapsed_seconds = seconds_since(start_);
    const double denom = std::max(std::abs(out.objective.total), 1e-12);
    const double gap = std::max(0.0, (out.objective.total - bound) / denom);
    if (!aborted_ && gap <= 1e-12) {
      out.proof = ProofStatus::kOptimal;
      out.gap = 0.0;
      out.stats.best_bound = out.objective.total;
    } else {
      out.proof = ProofStatus::kGapBounded;
      out.gap = gap;
    }
    return out;
  }

 private:
  struct Candidate {
    Transmission t;
    int message;
    double value;
    double energy;  // SE of the technology
    int delay_gain;  // tau - d
  };

  void setup() {
    const int n = s_.n_devices();
    w1_ = cfg_.alpha[0] / cfg_.norm.energy;
    w2_ = cfg_.alpha[1] / cfg_.norm.switching;
    w3_ = cfg_.alpha[2] / cfg_.norm.delay;
    slots_ = s_.total_window_slots();
    base_ = w3_ * s_.tau * slots_;

    for (const Transmission& t : candidate_transmissions(s_)) {
      const int f = s_.message_at(t.sender, t.receiver, t.step);
      const int d = t.step - s_.messages[f].window_start + 1;
      const double se = cfg_.transmission_energy[index_of(t.tech)];
      candidates_.push_back(
          {t, f, w1_ * se - w3_ * (s_.tau - d), se, s_.tau - d});
    }
    const std::size_t n_msgs = s_.messages.size();
    message_candidates_.assign(n_msgs, {});
    position_in_message_.resize(candidates_.size());
    for (std::size_t c = 0; c < candidates_.size(); ++c) {
      auto& list = message_candidates_[candidates_[c].message];
      position_in_message_[c] = static_cast<int>(list.size());
      list.push_back(static_cast<int>(c));
    }
    // suffix_[f][p][m]: min(0, best value among f's candidates p.. with tech m)
    suffix_.assign(n_msgs, {});
    for (std::size_t f = 0; f < n_msgs; ++f) {
      const auto& list = message_candidates_[f];
      auto& suf = suffix_[f];
      suf.assign(list.size() + 1, {0.0, 0.0});
      for (int p = static_cast<int>(list.size()) - 1; p >= 0; --p) {
        suf[p] = suf[p + 1];
        const Candidate& c = candidates_[list[p]];
        double& slot = suf[p][index_of(c.t.tech)];
        slot = std::min(slot, c.value);
      }
    }
    sender_messages_.assign(n, {});
    for (std::size_t f = 0; f < n_msgs; ++f) {
      if (!message_candidates_[f].empty()) {
        sender_messages_[s_.messages[f].sender].push_back(static_cast<int>(f));
      }
    }

    sent_.assign(n_msgs, false);
    next_.assign(n_msgs, 0);
    busy_step_.assign(n, -1);
    register_.assign(n, index_of(Technology::kRF));
    remaining_.resize(static_cast<std::size_t>(n) * kNumTechnologies);
    for (int i = 0; i < n; ++i) {
      for (Technology m : kAllTechnologies) {
        remaining_[i * kNumTechnologies + index_of(m)] =
            s_.energy.budget[index_of(m)][i];
      }
    }
    for (Technology m : kAllTechnologies) {
      charge_[index_of(m)] = charges(s_, m);
    }
    optimistic_sum_ = 0.0;
    for (std::size_t f = 0; f < n_msgs; ++f) {
      optimistic_sum_ += std::min(suffix_[f][0][0], suffix_[f][0][1]);
    }
  }

  bool affordable(int device_send, int device_receive, int m) const {
    return remaining_[device_send * kNumTechnologies + m] + kEnergyTolerance >=
               charge_[m].first &&
           remaining_[device_receive * kNumTechnologies + m] +
                   kEnergyTolerance >=
               charge_[m].second;
  }

  double cheap_bound() const {
    return base_ + committed_ + w2_ * switches_ + optimistic_sum_;
  }

  double strong_bound() {
    double total = base_ + committed_ + w2_ * switches_;
    for (std::size_t i = 0; i < sender_messages_.size(); ++i) {
      scratch_.clear();
      for (int f : sender_messages_[i]) {
        if (sent_[f]) continue;
        const auto& row = suffix_[f][next_[f]];
        double best = 0.0;
        for (int m = 0; m < kNumTechnologies; ++m) {
          if (row[m] < best &&
              affordable(static_cast<int>(i), s_.messages[f].receiver, m)) {
            best = row[m];
          }
        }
        if (best < 0.0) scratch_.push_back(best);
      }
      if (scratch_.empty()) continue;
      std::size_t capacity = 0;
      for (int m = 0; m < kNumTechnologies; ++m) {
        if (!s_.enabled[m]) continue;
        const double per = charge_[m].first;
        const double left = remaining_[i * kNumTechnologies + m];
        if (per <= 0.0) {
          capacity = scratch_.size();
          break;
        }
        capacity += static_cast<std::size_t>(
            std::floor((left + kEnergyTolerance) / per));
      }
      if (capacity < scratch_.size()) {
        std::nth_element(scratch_.begin(), scratch_.begin() + capacity,
                         scratch_.end());
        scratch_.resize(capacity);
      }
      for (double v : scratch_) total += v;
    }
    return total;
  }

  // True when a subtree with this bound cannot improve the incumbent
  // (records the bound when pruned only because of the gap target).
  bool prune(double bound) {
    if (options_.gap_target > 0.0) {
      const double threshold =
          incumbent_total_ -
          std::max(kTieEpsilon, options_.gap_target * incumbent_total_);
      if (bound >= threshold) {
        if (bound < incumbent_total_ - kTieEpsilon) {
          pruned_min_bound_ = std::min(pruned_min_bound_, bound);
        }
        return true;
      }
      return false;
    }
    if (incumbent_from_search_) return bound >= incumbent_total_ - kTieEpsilon;
    return bound > incumbent_total_ + kTieEpsilon;
  }

  void leaf() {
    const double delay_raw = static_cast<double>(s_.tau) * slots_ - delay_gain_;
    const double total =
        combine_objective(cfg_, energy_raw_, switches_, delay_raw).total;
    const bool better = total < incumbent_total_ - kTieEpsilon;
    const bool displaces_seed =
        !incumbent_from_search_ && total <= incumbent_total_ + kTieEpsilon;
    if (!better && !displaces_seed) return;
    incumbent_ = Schedule::empty_for(s_);
    for (int c : chosen_) incumbent_.add(candidates_[c].t);
    incumbent_total_ = total;
    incumbent_from_search_ = true;
    if (options_.on_incumbent) options_.on_incumbent(nodes_, total);
  }

  bool out_of_budget() {
    if (nodes_ >= options_.node_limit) return true;
    if ((nodes_ & 1023) == 0 &&
        seconds_since(start_) > options_.time_limit_seconds) {
      return true;
    }
    return false;
  }

  void visit(std::size_t pos) {
    if (aborted_) return;
    ++nodes_;
    if (out_of_budget()) {
      aborted_ = true;
      // The current node is itself unexplored.
      open_bounds_.push_back(cheap_bound());
      return;
    }
    if (pos == candidates_.size()) {
      if (options_.on_node) report_node(pos, cheap_bound());
      leaf();
      return;
    }
    double bound = cheap_bound();
    if (prune(bound)) return;
    bound = strong_bound();
    if (options_.on_node) report_node(pos, bound);
    if (prune(bound)) return;

    const Candidate& c = candidates_[pos];
    const int f = c.message;
    const int m = index_of(c.t.tech);
    const int i = c.t.sender;
    const int j = c.t.receiver;
    const int k = c.t.step;
    const double before = std::min(suffix_[f][next_[f]][0],
                                   suffix_[f][next_[f]][1]);

    const bool can_include = !sent_[f] && busy_step_[i] != k &&
                             busy_step_[j] != k && affordable(i, j, m);
    if (can_include) {
      open_bounds_.push_back(bound);
      // include
      sent_[f] = true;
      const int busy_i = busy_step_[i];
      const int busy_j = busy_step_[j];
      busy_step_[i] = busy_step_[j] = k;
      remaining_[i * kNumTechnologies + m] -= charge_[m].first;
      remaining_[j * kNumTechnologies + m] -= charge_[m].second;
      const int reg_i = register_[i];
      const int reg_j = register_[j];
      int added_switches = 0;
      if (register_[i] != m) ++added_switches;
      if (register_[j] != m) ++added_switches;
      register_[i] = register_[j] = m;
      switches_ += added_switches;
      committed_ += c.value;
      energy_raw_ += c.energy;
      delay_gain_ += c.delay_gain;
      optimistic_sum_ -= before;
      const int saved_next = next_[f];
      next_[f] = position_in_message_[pos] + 1;
      chosen_.push_back(static_cast<int>(pos));

      visit(pos + 1);

      chosen_.pop_back();
      next_[f] = saved_next;
      optimistic_sum_ += before;
      delay_gain_ -= c.delay_gain;
      energy_raw_ -= c.energy;
      committed_ -= c.value;
      switches_ -= added_switches;
      register_[i] = reg_i;
      register_[j] = reg_j;
      remaining_[i * kNumTechnologies + m] += charge_[m].first;
      remaining_[j * kNumTechnologies + m] += charge_[m].second;
      busy_step_[i] = busy_i;
      busy_step_[j] = busy_j;
      sent_[f] = false;
      if (aborted_) return;
      open_bounds_.pop_back();
    }

    // skip
    const int saved_next = next_[f];
    double delta = 0.0;
    if (!sent_[f]) {
      next_[f] = position_in_message_[pos] + 1;
      delta = std::min(suffix_[f][next_[f]][0], suffix_[f][next_[f]][1]) -
              before;
      optimistic_sum_ += delta;
    }
    visit(pos + 1);
    if (!sent_[f]) {
      optimistic_sum_ -= delta;
      next_[f] = saved_next;
    }
  }

  void report_node(std::size_t pos, double bound) {
    Schedule prefix = Schedule::empty_for(s_);
    for (int c : chosen_) prefix.add(candidates_[c].t);
    options_.on_node(prefix, static_cast<int>(pos), bound);
  }

  const Scenario& s_;
  const ObjectiveConfig& cfg_;
  const BnbOptions& options_;

  double w1_ = 0, w2_ = 0, w3_ = 0, base_ = 0;
  int slots_ = 0;
  std::vector<Candidate> candidates_;
  std::vector<std::vector<int>> message_candidates_;
  std::vector<int> position_in_message_;
  std::vector<std::vector<std::array<double, kNumTechnologies>>> suffix_;
  std::vector<std::vector<int>> sender_messages_;
  std::array<std::pair<double, double>, kNumTechnologies> charge_{};

  // Search state.
  std::vector<bool> sent_;
  std::vector<int> next_;
  std::vector<int> busy_step_;
  std::vector<int> register_;
  std::vector<double> remaining_;
  std::vector<int> chosen_;
  double committed_ = 0.0;
  double optimistic_sum_ = 0.0;
  double energy_raw_ = 0.0;
  int switches_ = 0;
  int delay_gain_ = 0;
  std::vector<double> scratch_;

  Schedule incumbent_;
  double incumbent_total_ = 0.0;
  bool incumbent_from_search_ = false;
  double pruned_min_bound_ = 0.0;
  std::vector<double> open_bounds_;
  bool aborted_ = false;
  std::int64_t nodes_ = 0;
  Clock::time_point start_;
};

}  // namespace

Solution solve_bnb(const Scenario& s, const ObjectiveConfig& cfg,
                   const BnbOptions& options) {
  if (!(options.gap_target >= 0.0)) {
    throw std::invalid_argument("gap_target must be >= 0");
  }
  require_inputs(s, cfg);
  BranchAndBound search(s, cfg, options);
  return search.run();
}

}  // namespace hybrid_aoi
