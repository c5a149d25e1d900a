#include "luca/policy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>

namespace luca {

PolicyMode policy_mode_from_name(const std::string& name) {
  if (name == "luca") return PolicyMode::luca;
  if (name == "drl_c" || name == "drl-c") return PolicyMode::drl_c;
  if (name == "luca_m" || name == "luca-m") return PolicyMode::luca_m;
  throw ConfigError("unknown mode '" + name + "' (expected luca|drl_c|luca_m)");
}

std::string policy_mode_name(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::luca: return "luca";
    case PolicyMode::drl_c: return "drl_c";
    case PolicyMode::luca_m: return "luca_m";
  }
  return "?";
}

PolicyParams PolicyParams::zeros(PolicyMode mode) {
  PolicyParams p;
  p.gnn = GnnParams::zeros();
  p.fusion = FusionParams::zeros();
  p.actor = make_dense({kActorInputDim, kHiddenDim, kHeadDim, 1},
                       {Activation::tanh_fn, Activation::tanh_fn, Activation::identity});
  p.critic = make_dense({kGnnDim, kHiddenDim, kHeadDim, 1},
                        {Activation::tanh_fn, Activation::tanh_fn, Activation::identity});
  p.mode = mode;
  return p;
}

PolicyParams PolicyParams::init(std::uint64_t seed, PolicyMode mode) {
  PolicyParams p = zeros(mode);
  Rng rng(Rng::derive(seed, 0x706f6c69));
  p.gnn = GnnParams::init(rng);
  p.fusion = FusionParams::init(rng);
  init_uniform(p.actor, rng);
  init_uniform(p.critic, rng);
  return p;
}

namespace {

// single flattening order shared by flatten/unflatten/to_arrays
template <typename Fn>
void for_each_array(PolicyParams& p, Fn&& fn) {
  auto layer = [&](const std::string& prefix, GnnLayerParams& l) {
    fn(prefix + ".w_self", l.w_self);
    fn(prefix + ".w_nbr", l.w_nbr);
    fn(prefix + ".w_edge", l.w_edge);
    fn(prefix + ".b", l.b);
  };
  layer("gnn.l1", p.gnn.l1);
  layer("gnn.l2", p.gnn.l2);
  fn("fusion.w_proj", p.fusion.w_proj);
  fn("fusion.b_proj", p.fusion.b_proj);
  fn("fusion.w_gate", p.fusion.w_gate);
  fn("fusion.b_gate", p.fusion.b_gate);
  for (std::size_t l = 0; l < p.actor.layers.size(); ++l) {
    fn("actor.l" + std::to_string(l) + ".w", p.actor.layers[l].w);
    fn("actor.l" + std::to_string(l) + ".b", p.actor.layers[l].b);
  }
  for (std::size_t l = 0; l < p.critic.layers.size(); ++l) {
    fn("critic.l" + std::to_string(l) + ".w", p.critic.layers[l].w);
    fn("critic.l" + std::to_string(l) + ".b", p.critic.layers[l].b);
  }
}

struct ArrayView {
  double* data;
  int rows, cols;
};

template <typename Fn>
void visit_views(PolicyParams& p, Fn&& fn) {
  for_each_array(p, [&](const std::string& name, auto& arr) {
    if constexpr (std::is_same_v<std::decay_t<decltype(arr)>, Matrix>) {
      fn(name, ArrayView{arr.data.data(), arr.rows, arr.cols});
    } else {
      fn(name, ArrayView{arr.data(), static_cast<int>(arr.size()), 1});
    }
  });
}

}  // namespace

Vector PolicyParams::flatten() const {
  Vector flat;
  auto& self = const_cast<PolicyParams&>(*this);
  visit_views(self, [&](const std::string&, ArrayView v) {
    flat.insert(flat.end(), v.data, v.data + static_cast<std::size_t>(v.rows) * v.cols);
  });
  return flat;
}

void PolicyParams::unflatten(const Vector& flat) {
  std::size_t pos = 0;
  visit_views(*this, [&](const std::string&, ArrayView v) {
    const std::size_t n = static_cast<std::size_t>(v.rows) * v.cols;
    if (pos + n > flat.size()) throw std::invalid_argument("unflatten: vector too short");
    std::copy(flat.begin() + pos, flat.begin() + pos + n, v.data);
    pos += n;
  });
  if (pos != flat.size()) throw std::invalid_argument("unflatten: vector too long");
}

std::size_t PolicyParams::param_count() const {
  std::size_t n = 0;
  auto& self = const_cast<PolicyParams&>(*this);
  visit_views(self, [&](const std::string&, ArrayView v) {
    n += static_cast<std::size_t>(v.rows) * v.cols;
  });
  return n;
}

std::vector<NamedArray> PolicyParams::to_arrays(double lambda) const {
  std::vector<NamedArray> arrays;
  Matrix mode_arr(1, 1);
  mode_arr.at(0, 0) = static_cast<double>(static_cast<int>(mode));
  arrays.push_back({"meta.mode", mode_arr});
  Matrix lambda_arr(1, 1);
  lambda_arr.at(0, 0) = lambda;
  arrays.push_back({"meta.lambda", lambda_arr});
  auto& self = const_cast<PolicyParams&>(*this);
  visit_views(self, [&](const std::string& name, ArrayView v) {
    Matrix m(v.rows, v.cols);
    std::copy(v.data, v.data + m.data.size(), m.data.begin());
    arrays.push_back({name, std::move(m)});
  });
  return arrays;
}

std::pair<PolicyParams, double> PolicyParams::from_arrays(const std::vector<NamedArray>& arrays) {
  PolicyParams p = zeros();
  double lambda = 0.5;
  std::map<std::string, const Matrix*> by_name;
  for (const auto& arr : arrays) by_name[arr.name] = &arr.value;
  if (auto it = by_name.find("meta.mode"); it != by_name.end())
    p.mode = static_cast<PolicyMode>(static_cast<int>(it->second->at(0, 0)));
  if (auto it = by_name.find("meta.lambda"); it != by_name.end()) lambda = it->second->at(0, 0);
  visit_views(p, [&](const std::string& name, ArrayView v) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ParseError("checkpoint missing array '" + name + "'");
    const Matrix& m = *it->second;
    if (m.rows != v.rows || m.cols != v.cols)
      throw ParseError("checkpoint array '" + name + "' has shape " + std::to_string(m.rows) +
                       "x" + std::to_string(m.cols) + ", expected " + std::to_string(v.rows) +
                       "x" + std::to_string(v.cols));
    std::copy(m.data.begin(), m.data.end(), v.data);
  });
  return {std::move(p), lambda};
}

void save_policy(const PolicyParams& params, double lambda, const std::string& path) {
  write_text_file(path, save_checkpoint(params.to_arrays(lambda)));
}

std::pair<PolicyParams, double> load_policy(const std::string& path) {
  return PolicyParams::from_arrays(parse_checkpoint(read_text_file(path)));
}

PolicyGrads PolicyGrads::zeros_like(const PolicyParams& p) {
  PolicyGrads g;
  g.gnn = GnnGrads::zeros_like(p.gnn);
  g.fusion = FusionGrads::zeros_like(p.fusion);
  g.actor = zero_grads_like(p.actor);
  g.critic = zero_grads_like(p.critic);
  return g;
}

Vector PolicyGrads::flatten(const PolicyParams& shape) const {
  // mirrors PolicyParams flattening order
  Vector flat;
  flat.reserve(shape.param_count());
  auto push_matrix = [&](const Matrix& m) {
    flat.insert(flat.end(), m.data.begin(), m.data.end());
  };
  auto push_vec = [&](const Vector& v) { flat.insert(flat.end(), v.begin(), v.end()); };
  auto push_layer = [&](const GnnLayerGrads& l) {
    push_matrix(l.dw_self);
    push_matrix(l.dw_nbr);
    push_matrix(l.dw_edge);
    push_vec(l.db);
  };
  push_layer(gnn.l1);
  push_layer(gnn.l2);
  push_matrix(fusion.dw_proj);
  push_vec(fusion.db_proj);
  push_matrix(fusion.dw_gate);
  push_vec(fusion.db_gate);
  for (std::size_t l = 0; l < actor.dw.size(); ++l) {
    push_matrix(actor.dw[l]);
    push_vec(actor.db[l]);
  }
  for (std::size_t l = 0; l < critic.dw.size(); ++l) {
    push_matrix(critic.dw[l]);
    push_vec(critic.db[l]);
  }
  if (flat.size() != shape.param_count())
    throw std::logic_error("gradient flattening does not match parameter count");
  return flat;
}

StepInput make_step_input(const State& state, Vector z_llm) {
  StepInput input;
  input.graph = build_graph(state);
  input.z_llm = std::move(z_llm);
  input.actions = state.legal_actions();
  const Instance& inst = state.instance();
  const NormConstants& norms = input.graph.norms;
  input.action_op_flat.reserve(input.actions.size());
  input.action_mach.reserve(input.actions.size());
  for (const Action& a : input.actions) {
    input.action_op_flat.push_back(inst.flat_op_id(a.job_id, a.op_index));
    const double p = inst.op(a.job_id, a.op_index).time_on(a.machine_id);
    const double e = inst.emission_rate(a.machine_id);
    input.action_mach.push_back({p / norms.max_p, e / norms.max_e,
                                 p * e / (norms.max_p * norms.max_e),
                                 state.machine_free_at(a.machine_id) / norms.horizon});
  }
  return input;
}

namespace {

Vector actor_input(const Vector& h, const Vector& node_emb,
                   const std::array<double, kActionFeatDim>& mach) {
  Vector x;
  x.reserve(kActorInputDim);
  x.insert(x.end(), h.begin(), h.end());
  x.insert(x.end(), node_emb.begin(), node_emb.end());
  x.insert(x.end(), mach.begin(), mach.end());
  return x;
}

}  // namespace

StepEval eval_step(const PolicyParams& params, const StepInput& input) {
  StepEval eval;
  const GnnResult gnn = gnn_embed(input.graph, params.gnn, &eval.gnn_trace);
  eval.z_gnn = gnn.z_gnn;
  eval.node_embeddings = gnn.node_embeddings;

  if (params.mode == PolicyMode::drl_c) {
    // GNN-only ablation: gate forced to 0
    eval.h = eval.z_gnn;
    eval.gate = 0.0;
  } else {
    eval.fuse_trace = fuse(input.z_llm, eval.z_gnn, params.fusion);
    eval.h = eval.fuse_trace.h;
    eval.gate = eval.fuse_trace.gate;
  }

  eval.logits.resize(input.actions.size());
  eval.actor_traces.reserve(input.actions.size());
  for (std::size_t i = 0; i < input.actions.size(); ++i) {
    eval.actor_traces.push_back(forward_trace(
        params.actor,
        actor_input(eval.h, eval.node_embeddings[input.action_op_flat[i]], input.action_mach[i])));
    eval.logits[i] = eval.actor_traces.back().output()[0];
  }
  eval.probs = softmax(eval.logits);

  eval.critic_trace = forward_trace(params.critic, eval.h);
  eval.value = eval.critic_trace.output()[0];
  return eval;
}

void backward_step(const PolicyParams& params, const StepInput& input, const StepEval& eval,
                   const Vector& d_logits, double d_value, PolicyGrads& grads) {
  Vector dh(kGnnDim, 0.0);
  std::vector<Vector> d_node(input.graph.n_ops, Vector(kGnnDim, 0.0));

  // critic path
  {
    const Vector din = backward(params.critic, eval.critic_trace, {d_value}, grads.critic);
    for (int d = 0; d < kGnnDim; ++d) dh[d] += din[d];
  }
  // actor path, one scalar logit per action
  for (std::size_t i = 0; i < input.actions.size(); ++i) {
    if (d_logits[i] == 0.0) continue;
    const Vector din = backward(params.actor, eval.actor_traces[i], {d_logits[i]}, grads.actor);
    for (int d = 0; d < kGnnDim; ++d) dh[d] += din[d];
    Vector& dn = d_node[input.action_op_flat[i]];
    for (int d = 0; d < kGnnDim; ++d) dn[d] += din[kGnnDim + d];
  }

  Vector d_z_gnn(kGnnDim, 0.0);
  if (params.mode == PolicyMode::drl_c) {
    d_z_gnn = dh;
  } else {
    fuse_backward(params.fusion, eval.fuse_trace, dh, grads.fusion, nullptr, &d_z_gnn);
  }
  gnn_backward(input.graph, params.gnn, eval.gnn_trace, d_node, d_z_gnn, grads.gnn);
}

Vector score_actions(const Vector& h, const std::vector<Action>& actions,
                     const std::vector<Vector>& node_embeddings, const State& state,
                     const DenseNet& actor) {
  if (actions.empty()) throw std::invalid_argument("score_actions: empty action set");
  const Instance& inst = state.instance();
  const NormConstants norms = NormConstants::of(inst);
  Vector logits(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Action& a = actions[i];
    const double p = inst.op(a.job_id, a.op_index).time_on(a.machine_id);
    const double e = inst.emission_rate(a.machine_id);
    const std::array<double, kActionFeatDim> mach{p / norms.max_p, e / norms.max_e,
                                                  p * e / (norms.max_p * norms.max_e),
                                                  state.machine_free_at(a.machine_id) / norms.horizon};
    logits[i] =
        forward(actor, actor_input(h, node_embeddings[inst.flat_op_id(a.job_id, a.op_index)], mach))[0];
  }
  return logits;
}

Matrix policy_grid(const PolicyParams& params, const State& state, const Vector& z_llm) {
  const Instance& inst = state.instance();
  StepInput input = make_step_input(state, z_llm);
  StepEval eval = eval_step(params, input);

  // scatter legal-action logits into the full grid, mask the rest
  const int m = inst.n_machines();
  Vector grid_logits(static_cast<std::size_t>(inst.n_jobs()) * m, 0.0);
  std::vector<std::uint8_t> mask(grid_logits.size(), 0);
  for (std::size_t i = 0; i < input.actions.size(); ++i) {
    const auto& a = input.actions[i];
    grid_logits[static_cast<std::size_t>(a.job_id) * m + a.machine_id] = eval.logits[i];
    mask[static_cast<std::size_t>(a.job_id) * m + a.machine_id] = 1;
  }
  const Vector probs = softmax(grid_logits, mask);
  Matrix out(inst.n_jobs(), m);
  out.data = probs;
  return out;
}

}  // namespace luca
