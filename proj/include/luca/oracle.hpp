#pragma once

#include <string>
#include <vector>

#include "luca/sim_env.hpp"

namespace luca {

struct Objective {
  double lambda = 0.0;  // 0 = pure makespan, 1 = pure emission

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0,1]");
  }
};

struct SearchLimits {
  long max_nodes = 20'000'000;
  double max_seconds = 60.0;
  int max_total_ops = 12;  // refuse larger instances
};

// Scalarized objective of a complete (or partial) schedule, recomputed in
// canonical (job, op) order so every caller sees identical floating point.
double schedule_value(const State& s, const Objective& obj);

struct ExactResult {
  double best_value = 0.0;
  std::vector<ScheduleEntry> best_schedule;
  bool proven_optimal = false;
  long explored_nodes = 0;
};

// Depth-first branch and bound over the decision-step action space.
ExactResult solve_exact(const Instance& inst, const Objective& obj, const SearchLimits& lim);

struct Violation {
  enum class Kind { missing_op, duplicate_op, bad_machine, precedence, overlap, arithmetic };
  Kind kind;
  std::string message;
};

struct VerifyReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

VerifyReport verify_schedule(const Instance& inst, const std::vector<ScheduleEntry>& entries);

}  // namespace luca
