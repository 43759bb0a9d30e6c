#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "hybrid_aoi/model.hpp"

namespace hybrid_aoi {

enum class ProofStatus { kOptimal, kGapBounded, kHeuristic };

const char* proof_name(ProofStatus p);

struct SolveStats {
  std::int64_t nodes = 0;
  double elapsed_seconds = 0.0;
  double best_bound = 0.0;
};

struct Solution {
  Schedule schedule;
  ObjectiveBreakdown objective;
  ProofStatus proof = ProofStatus::kHeuristic;
  // Relative gap (incumbent - bound) / max(incumbent, eps); 0 when optimal.
  double gap = 0.0;
  SolveStats stats;
};

// Raised when a search cap is exceeded before any answer can be returned.
class SolverLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BruteForceLimits {
  // Upper bound on the number of complete schedules the search may visit,
  // estimated as the product over messages of (1 + candidate slots).
  double max_schedules = 5e6;
};

// Exhaustive enumeration, step by step, over every valid partial matching.
// Intended as a verification oracle for tiny instances.
Solution solve_bruteforce(const Scenario& s, const ObjectiveConfig& cfg,
                          const BruteForceLimits& limits = {});

struct BnbOptions {
  double gap_target = 0.0;
  std::int64_t node_limit = 50'000'000;
  double time_limit_seconds = 600.0;
  bool seed_with_greedy = true;
  // Called with (nodes explored, objective) whenever the incumbent improves.
  std::function<void(std::int64_t, double)> on_incumbent;
  // Called at every explored node with the decided prefix and the node's
  // lower bound. Slow; meant for tests.
  std::function<void(const Schedule& prefix, int decided, double bound)>
      on_node;
};

// Depth-first branch and bound over the transmission decisions.
Solution solve_bnb(const Scenario& s, const ObjectiveConfig& cfg,
                   const BnbOptions& options = {});

// Earliest-deadline-first construction; admits a transmission only when it
// strictly lowers the objective.
Solution solve_greedy(const Scenario& s, const ObjectiveConfig& cfg);

// Candidate transmissions (demanded, usable link) in tie-break order.
std::vector<Transmission> candidate_transmissions(const Scenario& s);

}  // namespace hybrid_aoi
