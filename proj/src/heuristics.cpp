#include "luca/heuristics.hpp"

#include <algorithm>
#include <limits>

namespace luca {

std::optional<Rule> Rule::from_token(const std::string& token) {
  if (token == "fifo") return fifo();
  if (token == "spt") return spt();
  if (token == "mor") return mor();
  if (token == "mwkr") return mwkr();
  if (token == "random") return random(0);
  return std::nullopt;
}

std::string Rule::token() const {
  switch (kind) {
    case Kind::FIFO: return "fifo";
    case Kind::SPT: return "spt";
    case Kind::MOR: return "mor";
    case Kind::MWKR: return "mwkr";
    case Kind::RANDOM: return "random";
  }
  return "?";
}

namespace {

// earliest-finish machine for the job's pending op; ties by lowest machine id
Action best_machine_for(const State& s, int job) {
  const Instance& inst = s.instance();
  const int k = s.next_op(job);
  const auto& op = inst.op(job, k);
  Action best{job, k, op.alternatives.front().first};
  Time best_finish = std::numeric_limits<Time>::infinity();
  for (const auto& [m, p] : op.alternatives) {
    const Time finish = std::max(s.machine_free_at(m), s.job_ready_at(job)) + p;
    if (finish < best_finish) {
      best_finish = finish;
      best.machine_id = m;
    }
  }
  return best;
}

double remaining_work(const State& s, int job) {
  return s.instance().min_work_suffix(job, s.next_op(job));
}

}  // namespace

Action dispatch(const State& state, const Rule& rule, Rng* rng) {
  if (state.done()) throw std::invalid_argument("dispatch on terminal state");
  const Instance& inst = state.instance();

  if (rule.kind == Rule::Kind::RANDOM) {
    Rng local(rule.seed);
    Rng& r = rng ? *rng : local;
    const auto actions = state.legal_actions();
    return actions[r.index(actions.size())];
  }

  int best_job = -1;
  double best_key = 0.0;
  for (int i = 0; i < inst.n_jobs(); ++i) {
    if (state.job_finished(i)) continue;
    double key = 0.0;
    switch (rule.kind) {
      case Rule::Kind::FIFO:
        key = state.job_ready_at(i);  // earliest-ready first
        break;
      case Rule::Kind::SPT:
        key = inst.min_alt_time(i, state.next_op(i));  // shortest pending op first
        break;
      case Rule::Kind::MOR:
        key = -static_cast<double>(inst.ops_in_job(i) - state.next_op(i));  // most remaining ops
        break;
      case Rule::Kind::MWKR:
        key = -remaining_work(state, i);  // most remaining work
        break;
      case Rule::Kind::RANDOM:
        break;
    }
    if (best_job < 0 || key < best_key) {
      best_job = i;
      best_key = key;
    }
  }
  return best_machine_for(state, best_job);
}

RolloutResult rollout_heuristic(const Instance& inst, const Rule& rule) {
  State s = State::reset(inst);
  Rng rng(rule.seed);
  while (!s.done()) s.step(dispatch(s, rule, &rng));
  return {s.makespan(), s.total_emission(), std::move(s)};
}

RolloutResult random_policy_rollout(const Instance& inst, std::uint64_t seed) {
  return rollout_heuristic(inst, Rule::random(seed));
}

}  // namespace luca
