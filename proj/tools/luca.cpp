#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "luca/bench.hpp"

namespace {

// assemble the effective configuration: file values, then flag overrides
luca::RunConfig build_config(const std::string& config_path, const std::string& out,
                             long long seed, bool seed_set,
                             const std::vector<std::string>& overrides) {
  luca::RunConfig cfg;
  if (!config_path.empty()) cfg = luca::RunConfig::from_file(config_path);
  if (!out.empty()) cfg.set("out", out);
  if (seed_set) cfg.set("seed", std::to_string(seed));
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw luca::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"luca: carbon-aware flexible job-shop scheduling engine"};
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* help;
    std::function<int(const luca::RunConfig&)> run;
  };
  const std::vector<SubSpec> subs = {
      {"generate", "generate a synthetic dataset with emission sidecars", luca::cmd_generate},
      {"train", "train a scheduling policy", luca::cmd_train},
      {"eval", "evaluate methods on a test set", luca::cmd_eval},
      {"sweep-lambda", "train/evaluate across balance parameters", luca::cmd_sweep_lambda},
      {"sweep-ratio", "evaluate across emission-rate ratios", luca::cmd_sweep_ratio},
      {"oracle", "exact branch-and-bound solve of small instances", luca::cmd_oracle},
      {"report", "assemble a Markdown report from prior outputs", luca::cmd_report},
  };

  struct SubState {
    std::string config_path;
    std::string out;
    long long seed = 0;
    std::vector<std::string> overrides;
    CLI::App* cmd = nullptr;
    CLI::Option* seed_opt = nullptr;
    const SubSpec* spec = nullptr;
  };
  std::vector<SubState> states(subs.size());

  for (std::size_t i = 0; i < subs.size(); ++i) {
    SubState& st = states[i];
    st.spec = &subs[i];
    st.cmd = app.add_subcommand(subs[i].name, subs[i].help);
    st.cmd->add_option("--config", st.config_path, "key=value config file");
    st.cmd->add_option("--out", st.out, "output directory");
    st.seed_opt = st.cmd->add_option("--seed", st.seed, "master seed");
    st.cmd->add_option("--set", st.overrides, "override a config key (key=value, repeatable)");
  }

  CLI11_PARSE(app, argc, argv);

  for (const SubState& st : states) {
    if (!st.cmd->parsed()) continue;
    try {
      const luca::RunConfig cfg =
          build_config(st.config_path, st.out, st.seed, st.seed_opt->count() > 0, st.overrides);
      return st.spec->run(cfg);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }
  return 1;
}
