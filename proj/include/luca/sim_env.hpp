#pragma once

#include <string>
#include <vector>

#include "luca/instance.hpp"

namespace luca {

struct ScheduleEntry {
  int job_id = 0;
  int op_index = 0;
  int machine_id = 0;
  Time start = 0.0;
  Time end = 0.0;
};

struct Action {
  int job_id = 0;
  int op_index = 0;
  int machine_id = 0;

  bool operator==(const Action&) const = default;
};

struct StepOutcome {
  double delta_makespan_lb = 0.0;
  double delta_emission = 0.0;
  bool done = false;
};

// Partial schedule after some number of decision steps. Value-semantic;
// step() returns the successor without touching the argument.
class State {
 public:
  static State reset(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  int decision_step() const { return static_cast<int>(entries_.size()); }
  bool done() const { return static_cast<int>(entries_.size()) == inst_->total_ops(); }

  // index of the job's next unscheduled op, or ops_in_job(job) when finished
  int next_op(int job) const { return next_op_[job]; }
  bool job_finished(int job) const { return next_op_[job] >= inst_->ops_in_job(job); }
  Time job_ready_at(int job) const { return job_ready_[job]; }
  Time machine_free_at(int machine) const { return machine_free_[machine]; }

  Time makespan() const { return makespan_; }
  Emission total_emission() const;
  Emission emission_so_far() const { return emission_so_far_; }
  Time lower_bound_makespan() const;

  // ready-time lower bound for any uncompleted op (chain estimate for blocked ops)
  Time est_ready(int job, int op_index) const;

  std::vector<Action> legal_actions() const;
  bool is_legal(const Action& a) const;
  StepOutcome step(const Action& a);  // throws std::invalid_argument on illegal action

 private:
  const Instance* inst_ = nullptr;
  std::vector<ScheduleEntry> entries_;
  std::vector<int> next_op_;
  std::vector<Time> job_ready_;
  std::vector<Time> machine_free_;
  Time makespan_ = 0.0;
  Emission emission_so_far_ = 0.0;
};

inline State reset(const Instance& inst) { return State::reset(inst); }
std::vector<Action> legal_actions(const State& s);
inline Time makespan(const State& s) { return s.makespan(); }
inline Emission total_emission(const State& s) { return s.total_emission(); }
inline Time lower_bound_makespan(const State& s) { return s.lower_bound_makespan(); }

// functional step: copies the state and applies the action
std::pair<State, StepOutcome> step(const State& s, const Action& a);

// SVG 1.1 gantt chart, one row per machine, one box per entry
std::string export_gantt(const State& s);

// CSV with columns job,op,machine,start,end,emission
std::string schedule_csv(const State& s);

}  // namespace luca
