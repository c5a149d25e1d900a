#include "luca/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "luca/heuristics.hpp"

namespace luca {

namespace {

// canonical-order emission: actual p*e for scheduled ops, per-op minimum for
// the rest when `bound` is set. Termwise <= any completion, and floating
// point addition is monotone, so the bound never over-prunes.
double emission_canonical(const Instance& inst, const std::vector<int>& assigned_machine,
                          bool bound) {
  double total = 0.0;
  int flat = 0;
  for (int i = 0; i < inst.n_jobs(); ++i) {
    for (int k = 0; k < inst.ops_in_job(i); ++k, ++flat) {
      const auto& op = inst.op(i, k);
      const int m = assigned_machine[flat];
      if (m >= 0) {
        total += op.time_on(m) * inst.emission_rate(m);
      } else if (bound) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [mid, p] : op.alternatives)
          best = std::min(best, p * inst.emission_rate(mid));
        total += best;
      }
    }
  }
  return total;
}

std::vector<int> assignment_of(const Instance& inst, const std::vector<ScheduleEntry>& entries) {
  std::vector<int> assigned(inst.total_ops(), -1);
  for (const auto& e : entries) assigned[inst.flat_op_id(e.job_id, e.op_index)] = e.machine_id;
  return assigned;
}

struct Search {
  const Instance& inst;
  Objective obj;
  SearchLimits lim;
  std::chrono::steady_clock::time_point t0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<ScheduleEntry> best_schedule;
  long nodes = 0;
  bool limit_hit = false;

  bool out_of_budget() {
    if (nodes >= lim.max_nodes) return true;
    if ((nodes & 0xff) == 0) {
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
      if (elapsed.count() > lim.max_seconds) return true;
    }
    return false;
  }

  double bound(const State& s, std::vector<int>& assigned) const {
    return (1.0 - obj.lambda) * s.lower_bound_makespan() +
           obj.lambda * emission_canonical(inst, assigned, true);
  }

  void dfs(const State& s, std::vector<int>& assigned) {
    ++nodes;
    if (out_of_budget()) {
      limit_hit = true;
      return;
    }
    if (s.done()) {
      const double value = (1.0 - obj.lambda) * s.makespan() +
                           obj.lambda * emission_canonical(inst, assigned, false);
      if (value < best_value) {
        best_value = value;
        best_schedule = s.entries();
      }
      return;
    }
    if (bound(s, assigned) >= best_value) return;
    for (const Action& a : s.legal_actions()) {
      State next = s;
      next.step(a);
      const int flat = inst.flat_op_id(a.job_id, a.op_index);
      assigned[flat] = a.machine_id;
      dfs(next, assigned);
      assigned[flat] = -1;
      if (limit_hit) return;
    }
  }
};

}  // namespace

double schedule_value(const State& s, const Objective& obj) {
  obj.validate();
  const auto assigned = assignment_of(s.instance(), s.entries());
  return (1.0 - obj.lambda) * s.makespan() +
         obj.lambda * emission_canonical(s.instance(), assigned, false);
}

ExactResult solve_exact(const Instance& inst, const Objective& obj, const SearchLimits& lim) {
  obj.validate();
  if (inst.total_ops() > lim.max_total_ops)
    throw ConfigError("instance has " + std::to_string(inst.total_ops()) +
                      " operations, exact solver cap is " + std::to_string(lim.max_total_ops));

  Search search{inst, obj, lim, std::chrono::steady_clock::now(), {}, {}, 0, false};

  // warm-start incumbent from a MWKR rollout
  const RolloutResult warm = rollout_heuristic(inst, Rule::mwkr());
  search.best_value = schedule_value(warm.final_state, obj);
  search.best_schedule = warm.final_state.entries();

  std::vector<int> assigned(inst.total_ops(), -1);
  search.dfs(State::reset(inst), assigned);

  ExactResult result;
  result.best_value = search.best_value;
  result.best_schedule = std::move(search.best_schedule);
  result.proven_optimal = !search.limit_hit;
  result.explored_nodes = search.nodes;
  return result;
}

VerifyReport verify_schedule(const Instance& inst, const std::vector<ScheduleEntry>& entries) {
  VerifyReport report;
  auto add = [&](Violation::Kind kind, const std::string& msg) {
    report.violations.push_back({kind, msg});
  };

  std::vector<int> seen(inst.total_ops(), 0);
  for (const auto& e : entries) {
    if (e.job_id < 0 || e.job_id >= inst.n_jobs() || e.op_index < 0 ||
        e.op_index >= inst.ops_in_job(e.job_id)) {
      add(Violation::Kind::missing_op, "entry references unknown operation (job " +
                                           std::to_string(e.job_id) + ", op " +
                                           std::to_string(e.op_index) + ")");
      continue;
    }
    if (++seen[inst.flat_op_id(e.job_id, e.op_index)] > 1)
      add(Violation::Kind::duplicate_op, "operation scheduled twice (job " +
                                             std::to_string(e.job_id) + ", op " +
                                             std::to_string(e.op_index) + ")");
    const auto& op = inst.op(e.job_id, e.op_index);
    if (!op.eligible(e.machine_id)) {
      add(Violation::Kind::bad_machine, "job " + std::to_string(e.job_id) + " op " +
                                            std::to_string(e.op_index) + " not eligible on machine " +
                                            std::to_string(e.machine_id));
      continue;
    }
    const double p = op.time_on(e.machine_id);
    if (std::fabs(e.end - (e.start + p)) > 1e-9)
      add(Violation::Kind::arithmetic,
          "end != start + processing time for job " + std::to_string(e.job_id) + " op " +
              std::to_string(e.op_index));
    if (e.start < 0.0)
      add(Violation::Kind::arithmetic, "negative start time for job " + std::to_string(e.job_id));
  }
  for (int i = 0; i < inst.n_jobs(); ++i)
    for (int k = 0; k < inst.ops_in_job(i); ++k)
      if (seen[inst.flat_op_id(i, k)] == 0)
        add(Violation::Kind::missing_op,
            "operation never scheduled (job " + std::to_string(i) + ", op " + std::to_string(k) + ")");

  // precedence within each job
  std::vector<std::vector<const ScheduleEntry*>> by_job(inst.n_jobs());
  for (const auto& e : entries)
    if (e.job_id >= 0 && e.job_id < inst.n_jobs()) by_job[e.job_id].push_back(&e);
  for (int i = 0; i < inst.n_jobs(); ++i) {
    auto& list = by_job[i];
    std::sort(list.begin(), list.end(),
              [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->op_index < b->op_index; });
    for (std::size_t q = 1; q < list.size(); ++q) {
      if (list[q]->op_index == list[q - 1]->op_index) continue;  // duplicate, reported above
      if (list[q]->start < list[q - 1]->end - 1e-12)
        add(Violation::Kind::precedence, "job " + std::to_string(i) + " op " +
                                             std::to_string(list[q]->op_index) +
                                             " starts before its predecessor ends");
    }
  }

  // machine exclusivity
  std::vector<std::vector<const ScheduleEntry*>> by_machine(inst.n_machines());
  for (const auto& e : entries)
    if (e.machine_id >= 0 && e.machine_id < inst.n_machines()) by_machine[e.machine_id].push_back(&e);
  for (int j = 0; j < inst.n_machines(); ++j) {
    auto& list = by_machine[j];
    std::sort(list.begin(), list.end(),
              [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->start < b->start; });
    for (std::size_t q = 1; q < list.size(); ++q)
      if (list[q]->start < list[q - 1]->end - 1e-12)
        add(Violation::Kind::overlap,
            "machine " + std::to_string(j) + " runs two operations at once");
  }
  return report;
}

}  // namespace luca
