#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "luca/heuristics.hpp"
#include "luca/sim_env.hpp"

using namespace luca;

namespace {

Instance two_job_instance() {
  // job 0: two ops on machine 0 (p=2 then p=3); job 1: one op on machine 0 or 1
  return parse_fjsp("2 2\n2 1 1 2 1 1 3\n1 2 1 4 2 6\n");
}

Instance random_instance(std::uint64_t seed) {
  GenConfig cfg;
  cfg.n_jobs = 4;
  cfg.n_machines = 3;
  cfg.ops_per_job_min = 2;
  cfg.ops_per_job_max = 4;
  cfg.proc_time_min = 1.0;
  cfg.proc_time_max = 9.0;
  cfg.flexibility = 0.6;
  cfg.e_min = 1.0;
  cfg.e_max = 4.0;
  return generate_instance(seed, cfg);
}

}  // namespace

TEST_CASE("reset: fresh state basics") {
  const Instance inst = two_job_instance();
  const State s = State::reset(inst);
  CHECK(s.makespan() == 0.0);
  CHECK(s.total_emission() == 0.0);
  CHECK_FALSE(s.done());
  CHECK(!s.legal_actions().empty());

  const Instance one = parse_fjsp("1 1\n1 1 1 5\n");
  CHECK(State::reset(one).legal_actions().size() == 1);
}

TEST_CASE("legal_actions: fresh full-flex 10x5 exposes 50 actions") {
  GenConfig cfg;
  const Instance inst = generate_instance(3, cfg);  // defaults are 10x5 full flexibility
  CHECK(State::reset(inst).legal_actions().size() == 50);
}

TEST_CASE("legal_actions: canonical order and shrink") {
  const Instance inst = two_job_instance();
  State s = State::reset(inst);
  auto actions = s.legal_actions();
  REQUIRE(actions.size() == 3);  // job0 op0 on m0; job1 op0 on m0|m1
  CHECK(actions[0] == Action{0, 0, 0});
  CHECK(actions[1] == Action{1, 0, 0});
  CHECK(actions[2] == Action{1, 0, 1});

  s.step({1, 0, 1});
  actions = s.legal_actions();
  REQUIRE(actions.size() == 1);  // job 1 finished
  CHECK(actions[0] == Action{0, 0, 0});
}

TEST_CASE("step: single op accounting") {
  const Instance inst = attach_emissions(parse_fjsp("1 1\n1 1 1 5\n"),
                                         EmissionSource::explicit_list({3.0}));
  State s = State::reset(inst);
  const StepOutcome out = s.step({0, 0, 0});
  CHECK(out.done);
  CHECK(out.delta_emission == 15.0);
  CHECK(s.makespan() == 5.0);
  CHECK(s.total_emission() == 15.0);
  REQUIRE(s.entries().size() == 1);
  CHECK(s.entries()[0].start == 0.0);
  CHECK(s.entries()[0].end == 5.0);
}

TEST_CASE("step: chain precedence on one machine") {
  const Instance inst = two_job_instance();
  State s = State::reset(inst);
  s.step({0, 0, 0});
  s.step({0, 1, 0});
  CHECK(s.entries()[1].start == 2.0);
  CHECK(s.makespan() == 5.0);
}

TEST_CASE("step: order on a shared machine does not change the sum") {
  const Instance inst = parse_fjsp("2 1\n1 1 1 4\n1 1 1 6\n");
  State a = State::reset(inst);
  a.step({0, 0, 0});
  a.step({1, 0, 0});
  State b = State::reset(inst);
  b.step({1, 0, 0});
  b.step({0, 0, 0});
  CHECK(a.makespan() == 10.0);
  CHECK(b.makespan() == 10.0);
}

TEST_CASE("step rejects illegal actions") {
  const Instance inst = two_job_instance();
  State s = State::reset(inst);
  CHECK_THROWS_AS(s.step({0, 1, 0}), std::invalid_argument);  // not the next op
  CHECK_THROWS_AS(s.step({0, 0, 1}), std::invalid_argument);  // ineligible machine
  CHECK_THROWS_AS(s.step({9, 0, 0}), std::invalid_argument);  // unknown job
}

TEST_CASE("lower bound: fresh single job is its min-work chain") {
  const Instance inst = parse_fjsp("1 2\n2 2 1 3 2 5 1 1 4\n");
  const State s = State::reset(inst);
  CHECK(s.lower_bound_makespan() == 7.0);  // min(3,5) + 4
}

TEST_CASE("lower bound: terminal equals makespan, monotone along rollouts") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = random_instance(seed);
    State s = State::reset(inst);
    Rng rng(seed);
    double prev_lb = s.lower_bound_makespan();
    while (!s.done()) {
      const auto actions = s.legal_actions();
      const StepOutcome out = s.step(actions[rng.index(actions.size())]);
      const double lb = s.lower_bound_makespan();
      CHECK(lb >= prev_lb);
      CHECK(out.delta_makespan_lb == lb - prev_lb);
      prev_lb = lb;
    }
    CHECK(s.lower_bound_makespan() == s.makespan());
  }
}

TEST_CASE("rollout invariants: overlap, precedence, episode length, emission accumulator") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = random_instance(seed);
    State s = State::reset(inst);
    Rng rng(Rng::derive(seed, 1));
    int steps = 0;
    while (!s.done()) {
      const auto actions = s.legal_actions();
      s.step(actions[rng.index(actions.size())]);
      ++steps;
      CHECK(s.emission_so_far() == s.total_emission());
    }
    CHECK(steps == inst.total_ops());

    // per-machine non-overlap
    for (int m = 0; m < inst.n_machines(); ++m) {
      std::vector<ScheduleEntry> mine;
      for (const auto& e : s.entries())
        if (e.machine_id == m) mine.push_back(e);
      std::sort(mine.begin(), mine.end(),
                [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.start < b.start; });
      for (std::size_t q = 1; q < mine.size(); ++q) CHECK(mine[q - 1].end <= mine[q].start);
    }
    // precedence within jobs
    std::vector<double> last_end(inst.n_jobs(), 0.0);
    std::vector<int> last_op(inst.n_jobs(), -1);
    std::vector<ScheduleEntry> ordered = s.entries();
    std::sort(ordered.begin(), ordered.end(), [](const ScheduleEntry& a, const ScheduleEntry& b) {
      return a.job_id != b.job_id ? a.job_id < b.job_id : a.op_index < b.op_index;
    });
    for (const auto& e : ordered) {
      if (last_op[e.job_id] >= 0) CHECK(e.start >= last_end[e.job_id]);
      last_op[e.job_id] = e.op_index;
      last_end[e.job_id] = e.end;
    }
  }
}

TEST_CASE("step determinism: same action sequence reproduces the schedule") {
  const Instance inst = random_instance(7);
  Rng rng(99);
  std::vector<Action> seq;
  State a = State::reset(inst);
  while (!a.done()) {
    const auto actions = a.legal_actions();
    const Action act = actions[rng.index(actions.size())];
    seq.push_back(act);
    a.step(act);
  }
  State b = State::reset(inst);
  for (const Action& act : seq) b.step(act);
  REQUIRE(a.entries().size() == b.entries().size());
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    CHECK(a.entries()[i].start == b.entries()[i].start);
    CHECK(a.entries()[i].end == b.entries()[i].end);
    CHECK(a.entries()[i].machine_id == b.entries()[i].machine_id);
  }
  CHECK(a.total_emission() == b.total_emission());
}

TEST_CASE("emission is independent of scheduling order for a fixed assignment") {
  const Instance inst = attach_emissions(parse_fjsp("2 2\n1 1 1 2\n1 1 2 4\n"),
                                         EmissionSource::explicit_list({3.0, 1.0}));
  State a = State::reset(inst);
  a.step({0, 0, 0});
  a.step({1, 0, 1});
  State b = State::reset(inst);
  b.step({1, 0, 1});
  b.step({0, 0, 0});
  CHECK(a.total_emission() == 10.0);
  CHECK(b.total_emission() == 10.0);
}

TEST_CASE("makespan of partial schedules is the max end so far") {
  const Instance inst = two_job_instance();
  State s = State::reset(inst);
  CHECK(makespan(s) == 0.0);
  s.step({1, 0, 1});  // p=6 on machine 1
  CHECK(makespan(s) == 6.0);
  s.step({0, 0, 0});  // p=2 on machine 0
  CHECK(makespan(s) == 6.0);
}

TEST_CASE("gantt export: box count matches entries") {
  const Instance inst = two_job_instance();
  State s = State::reset(inst);
  auto count_boxes = [](const std::string& svg) {
    std::size_t n = 0, pos = 0;
    while ((pos = svg.find("<rect class=\"op\"", pos)) != std::string::npos) {
      ++n;
      pos += 1;
    }
    return n;
  };
  const std::string empty_svg = export_gantt(s);
  CHECK(count_boxes(empty_svg) == 0);
  CHECK(empty_svg.find("<svg") != std::string::npos);

  s.step({0, 0, 0});
  CHECK(count_boxes(export_gantt(s)) == 1);
  s.step({1, 0, 0});
  s.step({0, 1, 0});
  CHECK(count_boxes(export_gantt(s)) == 3);
}

TEST_CASE("schedule csv lists every entry") {
  const Instance inst = two_job_instance();
  State s = State::reset(inst);
  s.step({0, 0, 0});
  s.step({1, 0, 1});
  const std::string csv = schedule_csv(s);
  CHECK(csv.find("job,op,machine,start,end,emission") == 0);
  CHECK(csv.find("0,0,0,0,2,") != std::string::npos);
  CHECK(csv.find("1,0,1,0,6,") != std::string::npos);
}
