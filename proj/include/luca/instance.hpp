#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "luca/common.hpp"

namespace luca {

struct MachineProfile {
  int machine_id = 0;
  double emission_rate = 1.0;  // emission units per time unit
};

// One operation of a job and its eligible machines.
struct OperationSpec {
  int job_id = 0;
  int op_index = 0;
  // (machine id, processing time), kept sorted by machine id
  std::vector<std::pair<int, double>> alternatives;

  double min_time() const;
  double mean_time() const;
  bool eligible(int machine_id) const;
  double time_on(int machine_id) const;  // throws if not eligible
};

struct GenConfig {
  int n_jobs = 10;
  int n_machines = 5;
  int ops_per_job_min = 4;
  int ops_per_job_max = 6;
  double proc_time_min = 1.0;
  double proc_time_max = 20.0;
  double flexibility = 1.0;  // expected share of eligible machines per op
  double e_min = 1.0;
  double e_max = 2.0;

  void validate() const;  // throws ConfigError
};

struct Provenance {
  enum class Kind { synthetic, parsed };
  Kind kind = Kind::synthetic;
  std::uint64_t seed = 0;
  GenConfig gen;
  std::string path;
};

class Instance {
 public:
  std::string name;
  std::vector<std::vector<OperationSpec>> jobs;
  std::vector<MachineProfile> machines;
  Provenance provenance;

  int n_jobs() const { return static_cast<int>(jobs.size()); }
  int n_machines() const { return static_cast<int>(machines.size()); }
  int total_ops() const { return total_ops_; }
  int ops_in_job(int job) const { return static_cast<int>(jobs[job].size()); }

  const OperationSpec& op(int job, int k) const { return jobs[job][k]; }
  double emission_rate(int machine_id) const { return machines[machine_id].emission_rate; }

  // canonical flat id: jobs in order, ops within job in order
  int flat_op_id(int job, int k) const { return flat_offset_[job] + k; }
  std::pair<int, int> op_from_flat(int flat) const;

  // sum of min-alternative times of ops k.. of a job
  double min_work_suffix(int job, int k) const;
  double min_alt_time(int job, int k) const { return jobs[job][k].min_time(); }

  double max_proc_time() const { return max_proc_time_; }
  double max_emission_rate() const { return max_emission_rate_; }
  // serial-work horizon; upper bound on any schedule's makespan
  double horizon() const { return horizon_; }

  // validates invariants and computes derived caches; call after mutation
  void finalize();

 private:
  int total_ops_ = 0;
  std::vector<int> flat_offset_;
  std::vector<std::vector<double>> min_suffix_;
  double max_proc_time_ = 0.0;
  double max_emission_rate_ = 0.0;
  double horizon_ = 0.0;
};

// structural comparison: jobs, alternatives, machine count (rates excluded)
bool structurally_equal(const Instance& a, const Instance& b);

Instance generate_instance(std::uint64_t seed, const GenConfig& cfg);

// Standard FJSP text format. Machine ids are 1-based in files, 0-based in memory.
// Parsed instances carry unit emission rates until attach_emissions.
Instance parse_fjsp(const std::string& text, const std::string& name = "parsed");
std::string serialize_fjsp(const Instance& inst);

struct EmissionSource {
  enum class Kind { explicit_rates, sampled };
  Kind kind = Kind::sampled;
  std::vector<double> rates;  // explicit_rates
  std::uint64_t seed = 0;     // sampled
  double e_min = 1.0;
  double e_max = 2.0;

  static EmissionSource explicit_list(std::vector<double> r);
  static EmissionSource sampled(std::uint64_t seed, double e_min, double e_max);
};

Instance attach_emissions(const Instance& inst, const EmissionSource& source);

// emission sidecar: one line, m whitespace-separated positive decimals
std::string serialize_emissions(const Instance& inst);
std::vector<double> parse_emissions(const std::string& text, int n_machines);

struct DatasetSplit {
  std::vector<Instance> train;
  std::vector<Instance> val;
  std::vector<Instance> test;
};

DatasetSplit split_dataset(const std::vector<Instance>& instances,
                           const std::array<double, 3>& fractions, std::uint64_t seed);

}  // namespace luca
