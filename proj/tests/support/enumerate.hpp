#pragma once

// Test-only brute force: enumerates every decision sequence of an instance
// with no pruning. Independent check for the branch-and-bound solver.

#include <limits>

#include "luca/oracle.hpp"

namespace luca::testing {

inline void enumerate_rec(const State& s, const Objective& obj, double& best, long& leaves) {
  if (s.done()) {
    const double value = schedule_value(s, obj);
    if (value < best) best = value;
    ++leaves;
    return;
  }
  for (const Action& a : s.legal_actions()) {
    State next = s;
    next.step(a);
    enumerate_rec(next, obj, best, leaves);
  }
}

inline double exhaustive_best_value(const Instance& inst, const Objective& obj,
                                    long* leaves_out = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  long leaves = 0;
  enumerate_rec(State::reset(inst), obj, best, leaves);
  if (leaves_out) *leaves_out = leaves;
  return best;
}

// small random instances for oracle comparisons
inline Instance tiny_instance(std::uint64_t seed, int max_total_ops = 6) {
  Rng rng(Rng::derive(seed, 0x74696e79));
  GenConfig cfg;
  cfg.n_jobs = rng.uniform_int(1, 3);
  cfg.n_machines = rng.uniform_int(1, 3);
  cfg.ops_per_job_min = 1;
  cfg.ops_per_job_max = std::max(1, max_total_ops / cfg.n_jobs);
  cfg.proc_time_min = 1.0;
  cfg.proc_time_max = 9.0;
  cfg.flexibility = 0.7;
  cfg.e_min = 1.0;
  cfg.e_max = 4.0;
  Instance inst = generate_instance(rng.next(), cfg);
  while (inst.total_ops() > max_total_ops) {
    // drop the longest job until the enumeration stays tractable
    std::size_t longest = 0;
    for (std::size_t i = 1; i < inst.jobs.size(); ++i)
      if (inst.jobs[i].size() > inst.jobs[longest].size()) longest = i;
    if (inst.jobs.size() == 1) {
      inst.jobs[0].resize(max_total_ops);
    } else {
      inst.jobs.erase(inst.jobs.begin() + static_cast<long>(longest));
    }
    for (std::size_t i = 0; i < inst.jobs.size(); ++i)
      for (std::size_t k = 0; k < inst.jobs[i].size(); ++k) {
        inst.jobs[i][k].job_id = static_cast<int>(i);
        inst.jobs[i][k].op_index = static_cast<int>(k);
      }
    inst.finalize();
  }
  return inst;
}

}  // namespace luca::testing
