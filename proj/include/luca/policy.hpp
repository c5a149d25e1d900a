#pragma once

#include <array>
#include <string>
#include <vector>

#include "luca/encoders.hpp"
#include "luca/neural.hpp"
#include "luca/sim_env.hpp"

namespace luca {

enum class PolicyMode { luca, drl_c, luca_m };

PolicyMode policy_mode_from_name(const std::string& name);
std::string policy_mode_name(PolicyMode mode);

// Actor input: h (8) || op node embedding (8) || machine features (4).
inline constexpr int kActionFeatDim = 4;
inline constexpr int kActorInputDim = kGnnDim + kGnnDim + kActionFeatDim;
inline constexpr int kHiddenDim = 128;
inline constexpr int kHeadDim = 64;

// All learnable parameters of the scheduling policy.
struct PolicyParams {
  GnnParams gnn;
  FusionParams fusion;
  DenseNet actor;   // kActorInputDim -> 128 -> 64 -> 1
  DenseNet critic;  // kGnnDim -> 128 -> 64 -> 1
  PolicyMode mode = PolicyMode::luca;

  static PolicyParams init(std::uint64_t seed, PolicyMode mode = PolicyMode::luca);
  static PolicyParams zeros(PolicyMode mode = PolicyMode::luca);

  Vector flatten() const;
  void unflatten(const Vector& flat);
  std::size_t param_count() const;

  // named-array checkpoint (includes meta.mode / meta.lambda rows)
  std::vector<NamedArray> to_arrays(double lambda) const;
  static std::pair<PolicyParams, double> from_arrays(const std::vector<NamedArray>& arrays);
};

void save_policy(const PolicyParams& params, double lambda, const std::string& path);
std::pair<PolicyParams, double> load_policy(const std::string& path);

struct PolicyGrads {
  GnnGrads gnn;
  FusionGrads fusion;
  DenseGrads actor;
  DenseGrads critic;

  static PolicyGrads zeros_like(const PolicyParams& p);
  Vector flatten(const PolicyParams& shape) const;
};

// Parameter-independent inputs of one decision step; stored in trajectories
// so updates can re-run the forward pass under fresh parameters.
struct StepInput {
  GraphSnapshot graph;
  Vector z_llm;
  std::vector<Action> actions;
  std::vector<int> action_op_flat;
  std::vector<std::array<double, kActionFeatDim>> action_mach;
};

StepInput make_step_input(const State& state, Vector z_llm);

// Forward results plus everything backward needs.
struct StepEval {
  GnnTrace gnn_trace;
  Vector z_gnn;
  std::vector<Vector> node_embeddings;
  FuseTrace fuse_trace;  // inert in drl_c mode
  Vector h;
  double gate = 0.0;
  std::vector<ForwardTrace> actor_traces;
  Vector logits;
  Vector probs;
  ForwardTrace critic_trace;
  double value = 0.0;
};

StepEval eval_step(const PolicyParams& params, const StepInput& input);

// Accumulates gradients of a scalar loss given d(loss)/d(logits) and d(loss)/d(value).
void backward_step(const PolicyParams& params, const StepInput& input, const StepEval& eval,
                   const Vector& d_logits, double d_value, PolicyGrads& grads);

// Per-action scores for the legal action set (Eq. 7 numerators).
Vector score_actions(const Vector& h, const std::vector<Action>& actions,
                     const std::vector<Vector>& node_embeddings, const State& state,
                     const DenseNet& actor);

// Full (job x machine) probability grid with structural zeros for illegal pairs.
Matrix policy_grid(const PolicyParams& params, const State& state, const Vector& z_llm);

}  // namespace luca
