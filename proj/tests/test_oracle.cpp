#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "luca/heuristics.hpp"
#include "luca/oracle.hpp"
#include "support/enumerate.hpp"

using namespace luca;

TEST_CASE("single op, two machines: picks the cheaper one") {
  const Instance inst = parse_fjsp("1 2\n1 2 1 7 2 6\n");
  const ExactResult res = solve_exact(inst, Objective{0.0}, SearchLimits{});
  CHECK(res.best_value == 6.0);
  CHECK(res.proven_optimal);
  REQUIRE(res.best_schedule.size() == 1);
  CHECK(res.best_schedule[0].machine_id == 1);
}

TEST_CASE("two jobs, one machine: sum forced") {
  const Instance inst = parse_fjsp("2 1\n1 1 1 4\n1 1 1 6\n");
  const ExactResult res = solve_exact(inst, Objective{0.0}, SearchLimits{});
  CHECK(res.best_value == 10.0);
}

TEST_CASE("rejects instances over the size cap") {
  GenConfig cfg;  // 10x5, way over the default cap
  const Instance inst = generate_instance(1, cfg);
  CHECK_THROWS_AS(solve_exact(inst, Objective{0.0}, SearchLimits{}), ConfigError);
}

TEST_CASE("lambda outside [0,1] rejected") {
  const Instance inst = parse_fjsp("1 1\n1 1 1 5\n");
  CHECK_THROWS_AS(solve_exact(inst, Objective{1.5}, SearchLimits{}), ConfigError);
}

TEST_CASE("branch and bound equals exhaustive enumeration on tiny instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    for (double lambda : {0.0, 0.5, 1.0}) {
      const double brute = testing::exhaustive_best_value(inst, Objective{lambda});
      const ExactResult res = solve_exact(inst, Objective{lambda}, SearchLimits{});
      REQUIRE(res.proven_optimal);
      CHECK(res.best_value == brute);
    }
  }
}

TEST_CASE("emission-only optimum matches the closed form") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    double closed_form = 0.0;
    for (int i = 0; i < inst.n_jobs(); ++i)
      for (int k = 0; k < inst.ops_in_job(i); ++k) {
        double best = 1e300;
        for (const auto& [m, p] : inst.op(i, k).alternatives)
          best = std::min(best, p * inst.emission_rate(m));
        closed_form += best;
      }
    const ExactResult res = solve_exact(inst, Objective{1.0}, SearchLimits{});
    CHECK(res.best_value == closed_form);
  }
}

TEST_CASE("oracle dominates heuristics at their own objective") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const ExactResult ms_opt = solve_exact(inst, Objective{0.0}, SearchLimits{});
    const ExactResult em_opt = solve_exact(inst, Objective{1.0}, SearchLimits{});
    for (const Rule& rule : {Rule::fifo(), Rule::spt(), Rule::mor(), Rule::mwkr()}) {
      const RolloutResult out = rollout_heuristic(inst, rule);
      CHECK(out.makespan >= ms_opt.best_value);
      // emission sums accumulate in schedule order, the oracle sums in
      // canonical order; allow rounding-order slack
      CHECK(out.emission >= em_opt.best_value - 1e-9 * std::max(1.0, em_opt.best_value));
    }
  }
}

TEST_CASE("node limit stops the search and keeps a valid incumbent") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    SearchLimits lim;
    lim.max_nodes = 2;
    const ExactResult res = solve_exact(inst, Objective{0.0}, lim);
    CHECK(res.explored_nodes <= 2);
    CHECK(res.best_value > 0.0);
    CHECK(verify_schedule(inst, res.best_schedule).pass());
    if (res.proven_optimal) {
      // only possible when the warm start was already provably optimal
      CHECK(res.best_value == testing::exhaustive_best_value(inst, Objective{0.0}));
    }
  }
}

TEST_CASE("verify_schedule flags broken schedules") {
  const Instance inst = parse_fjsp("2 2\n2 1 1 2 1 2 3\n1 1 1 4\n");
  State s = State::reset(inst);
  s.step({0, 0, 0});
  s.step({0, 1, 1});
  s.step({1, 0, 0});
  REQUIRE(verify_schedule(inst, s.entries()).pass());

  auto entries = s.entries();
  SUBCASE("swapped op order within a job") {
    // op 1 now claims op 0's early slot and precedence breaks
    std::swap(entries[0].op_index, entries[1].op_index);
    const VerifyReport report = verify_schedule(inst, entries);
    CHECK_FALSE(report.pass());
    bool has_precedence = false;
    for (const auto& v : report.violations)
      if (v.kind == Violation::Kind::precedence) has_precedence = true;
    CHECK(has_precedence);
  }
  SUBCASE("missing operation") {
    entries.pop_back();
    const VerifyReport report = verify_schedule(inst, entries);
    CHECK_FALSE(report.pass());
    CHECK(report.violations[0].kind == Violation::Kind::missing_op);
  }
  SUBCASE("overlap on one machine") {
    entries[2].start = 0.0;
    entries[2].end = 4.0;
    const VerifyReport report = verify_schedule(inst, entries);
    bool has_overlap = false;
    for (const auto& v : report.violations)
      if (v.kind == Violation::Kind::overlap) has_overlap = true;
    CHECK(has_overlap);
  }
  SUBCASE("ineligible machine") {
    entries[2].machine_id = 1;
    const VerifyReport report = verify_schedule(inst, entries);
    bool has_bad_machine = false;
    for (const auto& v : report.violations)
      if (v.kind == Violation::Kind::bad_machine) has_bad_machine = true;
    CHECK(has_bad_machine);
  }
  SUBCASE("bad arithmetic") {
    entries[0].end = entries[0].start + 1.0;
    const VerifyReport report = verify_schedule(inst, entries);
    bool has_arith = false;
    for (const auto& v : report.violations)
      if (v.kind == Violation::Kind::arithmetic) has_arith = true;
    CHECK(has_arith);
  }
}

TEST_CASE("schedule_value blends objectives") {
  const Instance inst = attach_emissions(parse_fjsp("1 1\n1 1 1 5\n"),
                                         EmissionSource::explicit_list({3.0}));
  State s = State::reset(inst);
  s.step({0, 0, 0});
  CHECK(schedule_value(s, Objective{0.0}) == 5.0);
  CHECK(schedule_value(s, Objective{1.0}) == 15.0);
  CHECK(schedule_value(s, Objective{0.5}) == 10.0);
}
