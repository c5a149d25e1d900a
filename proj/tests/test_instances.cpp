#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "luca/instance.hpp"

using namespace luca;

namespace {

GenConfig cfg_10x5() {
  GenConfig cfg;
  cfg.n_jobs = 10;
  cfg.n_machines = 5;
  cfg.ops_per_job_min = 4;
  cfg.ops_per_job_max = 6;
  cfg.proc_time_min = 1.0;
  cfg.proc_time_max = 20.0;
  cfg.flexibility = 1.0;
  cfg.e_min = 1.0;
  cfg.e_max = 2.0;
  return cfg;
}

}  // namespace

TEST_CASE("generator: full flexibility lists every machine") {
  const Instance inst = generate_instance(7, cfg_10x5());
  CHECK(inst.n_jobs() == 10);
  CHECK(inst.n_machines() == 5);
  for (const auto& job : inst.jobs)
    for (const auto& op : job) CHECK(op.alternatives.size() == 5);
}

TEST_CASE("generator: deterministic per seed, distinct across seeds") {
  const Instance a = generate_instance(7, cfg_10x5());
  const Instance b = generate_instance(7, cfg_10x5());
  CHECK(structurally_equal(a, b));
  for (int j = 0; j < a.n_machines(); ++j)
    CHECK(a.machines[j].emission_rate == b.machines[j].emission_rate);

  const Instance c = generate_instance(8, cfg_10x5());
  bool differs = !structurally_equal(a, c);
  if (!differs) {
    for (std::size_t i = 0; i < a.jobs.size() && !differs; ++i)
      for (std::size_t k = 0; k < a.jobs[i].size() && !differs; ++k)
        differs = a.jobs[i][k].alternatives != c.jobs[i][k].alternatives;
  }
  CHECK(differs);
}

TEST_CASE("generator: values respect ranges and granularity") {
  GenConfig cfg = cfg_10x5();
  cfg.flexibility = 0.4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = generate_instance(seed, cfg);
    for (const auto& job : inst.jobs) {
      CHECK(job.size() >= 4);
      CHECK(job.size() <= 6);
      for (const auto& op : job) {
        CHECK(!op.alternatives.empty());
        for (const auto& [m, p] : op.alternatives) {
          CHECK(p >= cfg.proc_time_min);
          CHECK(p <= cfg.proc_time_max + 0.05);
          CHECK(has_tenth_granularity(p));
        }
      }
    }
    for (const auto& mp : inst.machines) {
      CHECK(mp.emission_rate >= cfg.e_min);
      CHECK(mp.emission_rate <= cfg.e_max + 0.05);
    }
  }
}

TEST_CASE("generator rejects invalid configs") {
  GenConfig cfg = cfg_10x5();
  cfg.flexibility = 0.0;
  CHECK_THROWS_AS(generate_instance(1, cfg), ConfigError);
  cfg = cfg_10x5();
  cfg.proc_time_min = -1.0;
  CHECK_THROWS_AS(generate_instance(1, cfg), ConfigError);
  cfg = cfg_10x5();
  cfg.e_max = 0.5;  // below e_min
  CHECK_THROWS_AS(generate_instance(1, cfg), ConfigError);
}

TEST_CASE("parse_fjsp: minimal file") {
  const Instance inst = parse_fjsp("1 1\n1 1 1 5\n");
  CHECK(inst.n_jobs() == 1);
  CHECK(inst.n_machines() == 1);
  REQUIRE(inst.jobs[0].size() == 1);
  REQUIRE(inst.jobs[0][0].alternatives.size() == 1);
  CHECK(inst.jobs[0][0].alternatives[0].first == 0);
  CHECK(inst.jobs[0][0].alternatives[0].second == 5.0);
  CHECK(inst.machines[0].emission_rate == 1.0);
}

TEST_CASE("parse_fjsp: header flexibility token ignored") {
  const Instance inst = parse_fjsp("2 2 1.5\n1 1 1 4\n2 2 1 3 2 6 1 2 1\n");
  CHECK(inst.n_jobs() == 2);
  CHECK(inst.jobs[1].size() == 2);
  CHECK(inst.jobs[1][0].alternatives.size() == 2);
}

TEST_CASE("parse_fjsp: errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_fjsp("3 1\n1 1 1 5\n1 1 1 5\n"),
                       doctest::Contains("job 2 is missing"), ParseError);
  CHECK_THROWS_AS(parse_fjsp("1 1\n1 1 9 5\n"), ParseError);   // machine out of range
  CHECK_THROWS_AS(parse_fjsp("1 1\n1 1 1\n"), ParseError);     // truncated
  CHECK_THROWS_AS(parse_fjsp("1 1\n1 1 1 5 7\n"), ParseError); // trailing tokens
  try {
    parse_fjsp("1 1\n1 1 9 5\n");
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("serialize: canonical minimal output") {
  const Instance inst = parse_fjsp("1 1\n1 1 1 5\n");
  CHECK(serialize_fjsp(inst) == "1 1\n1 1 1 5.0\n");
}

TEST_CASE("parse/serialize round trip over many seeds") {
  GenConfig cfg = cfg_10x5();
  cfg.flexibility = 0.5;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = generate_instance(seed, cfg);
    const Instance back = parse_fjsp(serialize_fjsp(inst), inst.name);
    CHECK(structurally_equal(inst, back));
  }
}

TEST_CASE("serialize keeps alternatives sorted by machine id") {
  const Instance inst = parse_fjsp("1 3\n1 3 3 2 1 5 2 4\n");
  REQUIRE(inst.jobs[0][0].alternatives.size() == 3);
  CHECK(inst.jobs[0][0].alternatives[0].first == 0);
  CHECK(inst.jobs[0][0].alternatives[1].first == 1);
  CHECK(inst.jobs[0][0].alternatives[2].first == 2);
  CHECK(serialize_fjsp(inst) == "1 3\n1 3 1 5.0 2 4.0 3 2.0\n");
}

TEST_CASE("attach_emissions: explicit and sampled") {
  const Instance base = parse_fjsp("1 3\n1 3 1 5 2 4 3 2\n");
  const Instance expl = attach_emissions(base, EmissionSource::explicit_list({1.0, 1.0, 1.0}));
  for (const auto& mp : expl.machines) CHECK(mp.emission_rate == 1.0);

  CHECK_THROWS_AS(attach_emissions(base, EmissionSource::explicit_list({1.0})), ConfigError);
  CHECK_THROWS_AS(attach_emissions(base, EmissionSource::explicit_list({1.0, -2.0, 1.0})),
                  ConfigError);

  const Instance s1 = attach_emissions(base, EmissionSource::sampled(3, 1.0, 16.0));
  const Instance s2 = attach_emissions(base, EmissionSource::sampled(3, 1.0, 16.0));
  for (int j = 0; j < 3; ++j) CHECK(s1.machines[j].emission_rate == s2.machines[j].emission_rate);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance s = attach_emissions(base, EmissionSource::sampled(seed, 1.0, 2.0));
    for (const auto& mp : s.machines) {
      CHECK(mp.emission_rate >= 1.0);
      CHECK(mp.emission_rate <= 2.0);
    }
  }
  // degenerate range pins every rate
  const Instance fixed = attach_emissions(base, EmissionSource::sampled(9, 2.0, 2.0));
  for (const auto& mp : fixed.machines) CHECK(mp.emission_rate == 2.0);
}

TEST_CASE("generator emission stream matches attach_emissions sampled scheme") {
  GenConfig cfg = cfg_10x5();
  const Instance gen = generate_instance(11, cfg);
  const Instance re = attach_emissions(gen, EmissionSource::sampled(11, cfg.e_min, cfg.e_max));
  for (int j = 0; j < gen.n_machines(); ++j)
    CHECK(gen.machines[j].emission_rate == re.machines[j].emission_rate);
}

TEST_CASE("emission sidecar round trip") {
  const Instance inst = attach_emissions(parse_fjsp("1 3\n1 3 1 5 2 4 3 2\n"),
                                         EmissionSource::sampled(5, 1.0, 8.0));
  const auto rates = parse_emissions(serialize_emissions(inst), 3);
  for (int j = 0; j < 3; ++j) CHECK(rates[j] == inst.machines[j].emission_rate);
  CHECK_THROWS_AS(parse_emissions("1.0 2.0", 3), ParseError);
  CHECK_THROWS_AS(parse_emissions("1.0 -2.0 1.0", 3), ParseError);
}

TEST_CASE("split_dataset: sizes, determinism, disjointness") {
  std::vector<Instance> instances;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    instances.push_back(generate_instance(seed, cfg_10x5()));

  const DatasetSplit s = split_dataset(instances, {0.8, 0.1, 0.1}, 42);
  CHECK(s.train.size() == 8);
  CHECK(s.val.size() == 1);
  CHECK(s.test.size() == 1);

  const DatasetSplit all = split_dataset(instances, {1.0, 0.0, 0.0}, 42);
  CHECK(all.train.size() == 10);
  CHECK(all.val.empty());
  CHECK(all.test.empty());

  const DatasetSplit again = split_dataset(instances, {0.8, 0.1, 0.1}, 42);
  for (std::size_t i = 0; i < s.train.size(); ++i)
    CHECK(s.train[i].name == again.train[i].name);
  CHECK(s.val[0].name == again.val[0].name);

  CHECK_THROWS_AS(split_dataset(instances, {0.5, 0.1, 0.1}, 1), ConfigError);
}
