#pragma once

#include <string>
#include <vector>

#include "luca/config.hpp"
#include "luca/instance.hpp"
#include "luca/oracle.hpp"
#include "luca/trainer.hpp"

namespace luca {

// write-to-temp-then-rename; partial output never lands under its final name
void atomic_write(const std::string& path, const std::string& content);

// dataset manifest: one instance path per line, relative to the manifest dir;
// a sibling <stem>.em sidecar supplies emission rates when present
std::vector<Instance> load_manifest(const std::string& manifest_path);

struct ResultRow {
  std::string method;
  double mean_makespan = 0.0;
  double std_makespan = 0.0;
  double mean_emission = 0.0;
  double std_emission = 0.0;
  double improvement_ms = 0.0;   // (base - ours) / base, vs the primary method
  double improvement_em = 0.0;
  double approx_to_oracle = 0.0;  // 0 when no oracle column
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::string csv() const;
  std::string formatted() const;
};

struct MethodScores {
  std::string method;
  std::vector<double> makespans;  // per instance
  std::vector<double> emissions;
};

// mean/std table with improvement percentages relative to rows[0]
ResultTable summarize(const std::vector<MethodScores>& scores,
                      const std::vector<double>* oracle_makespans);

// CLI entry points; each returns the process exit code.
int cmd_generate(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_sweep_lambda(const RunConfig& cfg);
int cmd_sweep_ratio(const RunConfig& cfg);
int cmd_oracle(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

}  // namespace luca
