#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "luca/heuristics.hpp"
#include "luca/oracle.hpp"

using namespace luca;

namespace {

Instance random_instance(std::uint64_t seed) {
  GenConfig cfg;
  cfg.n_jobs = 5;
  cfg.n_machines = 3;
  cfg.ops_per_job_min = 2;
  cfg.ops_per_job_max = 4;
  cfg.proc_time_min = 1.0;
  cfg.proc_time_max = 9.0;
  cfg.flexibility = 0.7;
  cfg.e_min = 1.0;
  cfg.e_max = 4.0;
  return generate_instance(seed, cfg);
}

}  // namespace

TEST_CASE("rule tokens round trip") {
  for (const char* token : {"fifo", "spt", "mor", "mwkr", "random"}) {
    auto rule = Rule::from_token(token);
    REQUIRE(rule.has_value());
    CHECK(rule->token() == token);
  }
  CHECK_FALSE(Rule::from_token("nonsense").has_value());
}

TEST_CASE("SPT picks the job with the shortest pending op") {
  const Instance inst = parse_fjsp("2 2\n1 1 1 7\n1 1 2 3\n");
  const State s = State::reset(inst);
  const Action a = dispatch(s, Rule::spt());
  CHECK(a.job_id == 1);
}

TEST_CASE("MOR picks the job with most remaining ops") {
  const Instance inst = parse_fjsp("2 1\n5 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1\n2 1 1 1 1 1 1\n");
  const Action a = dispatch(State::reset(inst), Rule::mor());
  CHECK(a.job_id == 0);
}

TEST_CASE("MWKR picks the job with most remaining work") {
  // job 0 total min work 12, job 1 total 9 over fewer/longer ops
  const Instance inst = parse_fjsp("2 1\n2 1 1 6 1 1 6\n2 1 1 5 1 1 4\n");
  const Action a = dispatch(State::reset(inst), Rule::mwkr());
  CHECK(a.job_id == 0);
}

TEST_CASE("FIFO picks the job whose pending op became ready earliest") {
  const Instance inst = parse_fjsp("2 2\n2 1 1 5 1 1 1\n1 1 2 2\n");
  State s = State::reset(inst);
  s.step({0, 0, 0});  // job 0 op 1 becomes ready at t=5
  const Action a = dispatch(s, Rule::fifo());
  CHECK(a.job_id == 1);  // still ready at t=0
}

TEST_CASE("machine choice is earliest finish with deterministic ties") {
  // one job, machines: m0 slower (7), m1 faster (3)
  const Instance inst = parse_fjsp("1 2\n1 2 1 7 2 3\n");
  const Action a = dispatch(State::reset(inst), Rule::fifo());
  CHECK(a.machine_id == 1);
  // exact tie -> lowest machine id
  const Instance tie = parse_fjsp("1 2\n1 2 1 4 2 4\n");
  CHECK(dispatch(State::reset(tie), Rule::fifo()).machine_id == 0);
}

TEST_CASE("dispatched actions are always legal; rollout length is total ops") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(seed);
    for (const Rule& rule :
         {Rule::fifo(), Rule::spt(), Rule::mor(), Rule::mwkr(), Rule::random(seed)}) {
      State s = State::reset(inst);
      Rng rng(rule.seed);
      int steps = 0;
      while (!s.done()) {
        const Action a = dispatch(s, rule, &rng);
        CHECK(s.is_legal(a));
        if (rule.kind == Rule::Kind::SPT) {
          // chosen job's pending op minimizes the min-alternative time
          double best = 1e18;
          for (int i = 0; i < inst.n_jobs(); ++i)
            if (!s.job_finished(i)) best = std::min(best, inst.min_alt_time(i, s.next_op(i)));
          CHECK(inst.min_alt_time(a.job_id, a.op_index) == best);
        }
        s.step(a);
        ++steps;
      }
      CHECK(steps == inst.total_ops());
    }
  }
}

TEST_CASE("every rule solves the single-op instance identically") {
  const Instance inst = parse_fjsp("1 1\n1 1 1 5\n");
  for (const Rule& rule :
       {Rule::fifo(), Rule::spt(), Rule::mor(), Rule::mwkr(), Rule::random(1)}) {
    const RolloutResult out = rollout_heuristic(inst, rule);
    CHECK(out.makespan == 5.0);
  }
}

TEST_CASE("deterministic rules reproduce their schedules") {
  const Instance inst = random_instance(3);
  for (const Rule& rule : {Rule::fifo(), Rule::spt(), Rule::mor(), Rule::mwkr()}) {
    const RolloutResult a = rollout_heuristic(inst, rule);
    const RolloutResult b = rollout_heuristic(inst, rule);
    REQUIRE(a.final_state.entries().size() == b.final_state.entries().size());
    for (std::size_t i = 0; i < a.final_state.entries().size(); ++i) {
      CHECK(a.final_state.entries()[i].start == b.final_state.entries()[i].start);
      CHECK(a.final_state.entries()[i].machine_id == b.final_state.entries()[i].machine_id);
    }
  }
}

TEST_CASE("random rollouts are deterministic per seed") {
  const Instance inst = random_instance(4);
  const RolloutResult a = random_policy_rollout(inst, 12);
  const RolloutResult b = random_policy_rollout(inst, 12);
  CHECK(a.makespan == b.makespan);
  CHECK(a.emission == b.emission);
}

TEST_CASE("heuristic rollouts verify cleanly") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = random_instance(seed);
    for (const Rule& rule : {Rule::fifo(), Rule::spt(), Rule::mor(), Rule::mwkr()}) {
      const RolloutResult out = rollout_heuristic(inst, rule);
      const VerifyReport report = verify_schedule(inst, out.final_state.entries());
      CHECK(report.pass());
    }
  }
}

TEST_CASE("random-policy mean is no better than the best heuristic on 10x5") {
  GenConfig cfg;  // defaults: 10x5 full flexibility
  double random_sum = 0.0, best_heur_sum = 0.0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const Instance inst = generate_instance(1000 + i, cfg);
    random_sum += random_policy_rollout(inst, 7000 + i).makespan;
    double best = 1e18;
    for (const Rule& rule : {Rule::fifo(), Rule::spt(), Rule::mor(), Rule::mwkr()})
      best = std::min(best, rollout_heuristic(inst, rule).makespan);
    best_heur_sum += best;
  }
  CHECK(random_sum / n >= best_heur_sum / n);
}
