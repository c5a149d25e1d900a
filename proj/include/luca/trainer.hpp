#pragma once

#include <functional>
#include <string>
#include <vector>

#include "luca/policy.hpp"
#include "luca/rewards.hpp"
#include "luca/text_encoder.hpp"

namespace luca {

struct PpoHyper {
  double clip_ratio = 0.2;
  double coef_policy = 1.0;
  double coef_value = 0.5;
  double coef_entropy = 0.01;
  int epochs_per_update = 4;
  int iterations = 1000;
  int batch_size = 20;  // |B|
  int l_batch = 20;     // batch refresh period
  int l_check = 50;     // validation / checkpoint period
  int n_l = 20;         // hint refresh period
  double lr = 2e-4;

  void validate() const;
};

struct TrajStep {
  StepInput input;
  int action_index = 0;
  double logp_old = 0.0;
  double value_old = 0.0;
  double r_ms = 0.0;
  double r_ce = 0.0;
  double gate = 0.0;
};

struct Trajectory {
  std::vector<TrajStep> steps;
  double final_makespan = 0.0;
  double final_emission = 0.0;
};

// Stochastic rollout when rng is set, greedy argmax otherwise. Prompts read
// hint flags from `store`; impacts are recorded back when record_iteration >= 0.
Trajectory rollout_policy(const Instance& inst, const PolicyParams& params, TextEncoder* encoder,
                          ImpactStore* store, Rng* rng, int record_iteration = -1);

struct EvalOutcome {
  double makespan = 0.0;
  double emission = 0.0;
  State final_state;
};

// Greedy evaluation rollout without trajectory bookkeeping.
EvalOutcome greedy_schedule(const Instance& inst, const PolicyParams& params,
                            TextEncoder* encoder);

// Per-step combined normalized returns and advantages for one update batch.
struct UpdateTargets {
  std::vector<std::vector<double>> returns;     // per trajectory, per step
  std::vector<std::vector<double>> advantages;  // R_t - V_old
};

UpdateTargets compute_update_targets(const std::vector<Trajectory>& trajs,
                                     const RewardConfig& reward);

struct LossReport {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  bool finite = true;
};

LossReport ppo_update(const std::vector<Trajectory>& trajs, PolicyParams& params, OptState& opt,
                      const PpoHyper& hyper, const RewardConfig& reward);

// Frozen statistics making validation aggregates comparable across rounds.
struct ValNormalizer {
  bool ready = false;
  double mu_ms = 0.0, sd_ms = 1.0;
  double mu_ce = 0.0, sd_ce = 1.0;
};

struct ValSummary {
  double mean_r_ms = 0.0;  // mean of -makespan
  double mean_r_ce = 0.0;  // mean of -emission
  double aggregate = 0.0;
  double mean_makespan = 0.0;
  double mean_emission = 0.0;
};

// Greedy rollouts over the held-out set; initializes `norm` on first use.
ValSummary validate(const PolicyParams& params, const std::vector<Instance>& val_instances,
                    const RewardConfig& reward, TextEncoder* encoder, ValNormalizer* norm);

struct TrainConfig {
  std::vector<Instance> train_set;
  std::vector<Instance> val_set;
  PpoHyper hyper;
  RewardConfig reward;
  PolicyMode mode = PolicyMode::luca;
  std::uint64_t seed = 0;
  TextEncoder* encoder = nullptr;
  std::string checkpoint_dir;   // when set, one checkpoint per interval + final
  double hint_quantile = 0.75;  // top-quartile rule for hint thresholds
  // test hook: replaces the computed validation aggregate
  std::function<double(int iteration, double aggregate)> validation_override;
};

struct IterLog {
  int iteration = 0;
  double mean_makespan = 0.0;
  double mean_emission = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double gate_mean = 0.0;
  int rollback = 0;
};

struct TrainResult {
  PolicyParams params;
  double lambda = 0.5;
  std::vector<IterLog> log;
  int rollbacks = 0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> checkpoint_paths;
};

std::string run_log_csv(const std::vector<IterLog>& log);

// Algorithm: batched PPO with periodic hint refresh, held-out validation and
// checkpoint rollback. luca_m forces lambda to 0; drl_c forces the gate to 0.
TrainResult train(const TrainConfig& cfg);

}  // namespace luca
