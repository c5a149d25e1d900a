#include "luca/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace luca {

void PpoHyper::validate() const {
  if (!(clip_ratio > 0.0 && clip_ratio < 1.0)) throw ConfigError("clip_ratio must be in (0,1)");
  if (coef_policy < 0.0 || coef_value < 0.0 || coef_entropy < 0.0)
    throw ConfigError("loss coefficients must be nonnegative");
  if (epochs_per_update < 1) throw ConfigError("epochs_per_update must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (l_batch < 1 || l_check < 1 || n_l < 1) throw ConfigError("schedule periods must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
}

namespace {

int sample_index(const Vector& probs, Rng& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int argmax_index(const Vector& probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

Vector encode_state(const State& s, const PolicyParams& params, TextEncoder* encoder,
                    const ImpactStore* store) {
  if (params.mode == PolicyMode::drl_c || encoder == nullptr) return Vector(kLlmDim, 0.0);
  static const ImpactStore empty_store;
  const PromptRecord prompt = build_state_prompt(s, store ? *store : empty_store);
  return encoder->encode(prompt.document);
}

}  // namespace

Trajectory rollout_policy(const Instance& inst, const PolicyParams& params, TextEncoder* encoder,
                          ImpactStore* store, Rng* rng, int record_iteration) {
  Trajectory traj;
  State s = State::reset(inst);
  while (!s.done()) {
    StepInput input = make_step_input(s, encode_state(s, params, encoder, store));
    StepEval eval = eval_step(params, input);
    const int ai = rng ? sample_index(eval.probs, *rng) : argmax_index(eval.probs);
    const Action action = input.actions[ai];
    const int flat = input.action_op_flat[ai];

    TrajStep step;
    step.input = std::move(input);
    step.action_index = ai;
    step.logp_old = std::log(eval.probs[ai]);
    step.value_old = eval.value;
    step.gate = eval.gate;

    const StepOutcome outcome = s.step(action);
    const auto [r_ms, r_ce] = immediate_rewards(outcome);
    step.r_ms = r_ms;
    step.r_ce = r_ce;
    if (store && record_iteration >= 0)
      store->record_impact(flat, outcome.delta_makespan_lb, outcome.delta_emission,
                           record_iteration);
    traj.steps.push_back(std::move(step));
  }
  traj.final_makespan = s.makespan();
  traj.final_emission = s.total_emission();
  return traj;
}

EvalOutcome greedy_schedule(const Instance& inst, const PolicyParams& params,
                            TextEncoder* encoder) {
  State s = State::reset(inst);
  while (!s.done()) {
    StepInput input = make_step_input(s, encode_state(s, params, encoder, nullptr));
    StepEval eval = eval_step(params, input);
    s.step(input.actions[argmax_index(eval.probs)]);
  }
  EvalOutcome out;
  out.makespan = s.makespan();
  out.emission = s.total_emission();
  out.final_state = std::move(s);
  return out;
}

UpdateTargets compute_update_targets(const std::vector<Trajectory>& trajs,
                                     const RewardConfig& reward) {
  reward.validate();
  UpdateTargets targets;
  targets.returns.resize(trajs.size());
  targets.advantages.resize(trajs.size());

  // per-trajectory per-objective sequences
  std::vector<std::vector<double>> ms_seq(trajs.size()), ce_seq(trajs.size());
  for (std::size_t b = 0; b < trajs.size(); ++b) {
    ms_seq[b].reserve(trajs[b].steps.size());
    ce_seq[b].reserve(trajs[b].steps.size());
    for (const auto& step : trajs[b].steps) {
      ms_seq[b].push_back(step.r_ms);
      ce_seq[b].push_back(step.r_ce);
    }
  }

  if (reward.scope == NormalizeScope::immediate) {
    // z-score immediate rewards pooled across the batch, then discount
    std::vector<double> pool_ms, pool_ce;
    for (std::size_t b = 0; b < trajs.size(); ++b) {
      pool_ms.insert(pool_ms.end(), ms_seq[b].begin(), ms_seq[b].end());
      pool_ce.insert(pool_ce.end(), ce_seq[b].begin(), ce_seq[b].end());
    }
    const std::vector<double> norm_ms = zscore(pool_ms, reward.zscore_eps);
    const std::vector<double> norm_ce = zscore(pool_ce, reward.zscore_eps);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < trajs.size(); ++b) {
      const std::size_t len = ms_seq[b].size();
      std::vector<double> ms(norm_ms.begin() + pos, norm_ms.begin() + pos + len);
      std::vector<double> ce(norm_ce.begin() + pos, norm_ce.begin() + pos + len);
      pos += len;
      targets.returns[b] = combine_rewards(discounted_returns(ms, reward.gamma),
                                           discounted_returns(ce, reward.gamma), reward.lambda);
    }
  } else {
    // discount per trajectory, z-score pooled returns per objective, combine
    std::vector<std::vector<double>> ret_ms(trajs.size()), ret_ce(trajs.size());
    std::vector<double> pool_ms, pool_ce;
    for (std::size_t b = 0; b < trajs.size(); ++b) {
      ret_ms[b] = discounted_returns(ms_seq[b], reward.gamma);
      ret_ce[b] = discounted_returns(ce_seq[b], reward.gamma);
      pool_ms.insert(pool_ms.end(), ret_ms[b].begin(), ret_ms[b].end());
      pool_ce.insert(pool_ce.end(), ret_ce[b].begin(), ret_ce[b].end());
    }
    const std::vector<double> norm_ms = zscore(pool_ms, reward.zscore_eps);
    const std::vector<double> norm_ce = zscore(pool_ce, reward.zscore_eps);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < trajs.size(); ++b) {
      const std::size_t len = ret_ms[b].size();
      std::vector<double> ms(norm_ms.begin() + pos, norm_ms.begin() + pos + len);
      std::vector<double> ce(norm_ce.begin() + pos, norm_ce.begin() + pos + len);
      pos += len;
      targets.returns[b] = combine_rewards(ms, ce, reward.lambda);
    }
  }

  for (std::size_t b = 0; b < trajs.size(); ++b) {
    std::vector<double> values;
    values.reserve(trajs[b].steps.size());
    for (const auto& step : trajs[b].steps) values.push_back(step.value_old);
    targets.advantages[b] = advantages(targets.returns[b], values);
  }
  return targets;
}

LossReport ppo_update(const std::vector<Trajectory>& trajs, PolicyParams& params, OptState& opt,
                      const PpoHyper& hyper, const RewardConfig& reward) {
  hyper.validate();
  if (trajs.empty()) throw std::invalid_argument("ppo_update: no trajectories");
  const UpdateTargets targets = compute_update_targets(trajs, reward);

  std::size_t total_steps = 0;
  for (const auto& traj : trajs) total_steps += traj.steps.size();
  const double inv_t = 1.0 / static_cast<double>(total_steps);

  LossReport report;
  Vector flat_params = params.flatten();
  for (int epoch = 0; epoch < hyper.epochs_per_update; ++epoch) {
    PolicyGrads grads = PolicyGrads::zeros_like(params);
    double policy_loss = 0.0, value_loss = 0.0, entropy_sum = 0.0;

    for (std::size_t b = 0; b < trajs.size(); ++b) {
      for (std::size_t t = 0; t < trajs[b].steps.size(); ++t) {
        const TrajStep& step = trajs[b].steps[t];
        const StepEval eval = eval_step(params, step.input);
        const double adv = targets.advantages[b][t];
        const double ret = targets.returns[b][t];

        const double logp_new = std::log(eval.probs[step.action_index]);
        const double ratio = std::exp(logp_new - step.logp_old);
        const double clipped =
            std::clamp(ratio, 1.0 - hyper.clip_ratio, 1.0 + hyper.clip_ratio);
        const double u1 = ratio * adv;
        const double u2 = clipped * adv;
        const double surr = std::min(u1, u2);
        policy_loss -= surr;
        const double dsurr_dratio = (u1 <= u2) ? adv : 0.0;

        double entropy = 0.0;
        for (double p : eval.probs) entropy -= p * std::log(p);
        entropy_sum += entropy;

        value_loss += (eval.value - ret) * (eval.value - ret);
        const double d_value = 2.0 * hyper.coef_value * inv_t * (eval.value - ret);

        Vector d_logits(eval.probs.size(), 0.0);
        const double policy_scale = -hyper.coef_policy * inv_t * dsurr_dratio * ratio;
        for (std::size_t i = 0; i < eval.probs.size(); ++i) {
          const double indicator = (static_cast<int>(i) == step.action_index) ? 1.0 : 0.0;
          d_logits[i] += policy_scale * (indicator - eval.probs[i]);
          // entropy term enters the loss as -coef_entropy * H
          d_logits[i] +=
              hyper.coef_entropy * inv_t * eval.probs[i] * (std::log(eval.probs[i]) + entropy);
        }
        backward_step(params, step.input, eval, d_logits, d_value, grads);
      }
    }

    const double total = hyper.coef_policy * policy_loss * inv_t +
                         hyper.coef_value * value_loss * inv_t -
                         hyper.coef_entropy * entropy_sum * inv_t;
    if (epoch == 0) {
      report.policy_loss = policy_loss * inv_t;
      report.value_loss = value_loss * inv_t;
      report.entropy = entropy_sum * inv_t;
      report.total = total;
    }
    if (!std::isfinite(total)) {
      report.finite = false;
      return report;  // abort without touching parameters
    }

    const Vector flat_grads = grads.flatten(params);
    adam_step(flat_params, flat_grads, opt);
    params.unflatten(flat_params);
  }
  return report;
}

ValSummary validate(const PolicyParams& params, const std::vector<Instance>& val_instances,
                    const RewardConfig& reward, TextEncoder* encoder, ValNormalizer* norm) {
  if (val_instances.empty()) throw std::invalid_argument("validate: empty validation set");
  reward.validate();
  std::vector<double> r_ms, r_ce;
  ValSummary summary;
  for (const Instance& inst : val_instances) {
    const EvalOutcome out = greedy_schedule(inst, params, encoder);
    r_ms.push_back(-out.makespan);
    r_ce.push_back(-out.emission);
    summary.mean_makespan += out.makespan;
    summary.mean_emission += out.emission;
  }
  const double n = static_cast<double>(val_instances.size());
  summary.mean_makespan /= n;
  summary.mean_emission /= n;
  summary.mean_r_ms = -summary.mean_makespan;
  summary.mean_r_ce = -summary.mean_emission;

  if (norm && !norm->ready) {
    auto stats = [](const std::vector<double>& v) {
      double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mu) * (x - mu);
      return std::pair<double, double>(mu, std::sqrt(var / static_cast<double>(v.size())) + 1e-8);
    };
    std::tie(norm->mu_ms, norm->sd_ms) = stats(r_ms);
    std::tie(norm->mu_ce, norm->sd_ce) = stats(r_ce);
    norm->ready = true;
  }
  const double z_ms = norm ? (summary.mean_r_ms - norm->mu_ms) / norm->sd_ms : summary.mean_r_ms;
  const double z_ce = norm ? (summary.mean_r_ce - norm->mu_ce) / norm->sd_ce : summary.mean_r_ce;
  summary.aggregate = (1.0 - reward.lambda) * z_ms + reward.lambda * z_ce;
  return summary;
}

std::string run_log_csv(const std::vector<IterLog>& log) {
  std::ostringstream out;
  out << "iteration,mean_makespan,mean_emission,policy_loss,value_loss,entropy,gate_mean,"
         "rollback\n";
  for (const auto& row : log)
    out << row.iteration << ',' << format_double(row.mean_makespan) << ','
        << format_double(row.mean_emission) << ',' << format_double(row.policy_loss) << ','
        << format_double(row.value_loss) << ',' << format_double(row.entropy) << ','
        << format_double(row.gate_mean) << ',' << row.rollback << '\n';
  return out.str();
}

namespace {

std::vector<int> sample_batch(std::size_t n, int batch_size, Rng& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(batch_size)));
  return order;
}

}  // namespace

TrainResult train(const TrainConfig& cfg) {
  if (cfg.train_set.empty()) throw ConfigError("training set is empty");
  cfg.hyper.validate();
  RewardConfig reward = cfg.reward;
  if (cfg.mode == PolicyMode::luca_m) reward.lambda = 0.0;  // makespan-only ablation
  reward.validate();
  if (cfg.encoder == nullptr && cfg.mode != PolicyMode::drl_c)
    throw ConfigError("text encoder required for mode " + policy_mode_name(cfg.mode));

  TrainResult result;
  result.lambda = reward.lambda;
  PolicyParams params = PolicyParams::init(cfg.seed, cfg.mode);
  OptState opt;
  opt.lr = cfg.hyper.lr;

  std::vector<ImpactStore> stores;
  stores.reserve(cfg.train_set.size());
  for (const Instance& inst : cfg.train_set) {
    ImpactStore store(inst.total_ops(), cfg.hyper.n_l);
    store.set_percentile_thresholds(cfg.hint_quantile);
    stores.push_back(std::move(store));
  }

  const bool has_val = !cfg.val_set.empty();
  ValNormalizer vnorm;
  auto run_validation = [&](int iteration) {
    const ValSummary v = validate(params, cfg.val_set, reward, cfg.encoder, &vnorm);
    double aggregate = v.aggregate;
    if (cfg.validation_override) aggregate = cfg.validation_override(iteration, aggregate);
    return aggregate;
  };

  auto write_ckpt = [&](const std::string& tag) {
    if (cfg.checkpoint_dir.empty()) return;
    std::filesystem::create_directories(cfg.checkpoint_dir);
    const std::string path = cfg.checkpoint_dir + "/ckpt_" + tag + ".txt";
    save_policy(params, reward.lambda, path);
    result.checkpoint_paths.push_back(path);
  };

  double best_score = has_val ? run_validation(0) : 0.0;
  PolicyParams snap_params = params;
  OptState snap_opt = opt;

  Rng batch_rng(Rng::derive(cfg.seed, 0x626174));
  std::vector<int> batch = sample_batch(cfg.train_set.size(), cfg.hyper.batch_size, batch_rng);

  for (int iter = 1; iter <= cfg.hyper.iterations; ++iter) {
    if (iter % cfg.hyper.n_l == 0)
      for (int b : batch) stores[b].refresh_hints();

    std::vector<Trajectory> trajs;
    trajs.reserve(batch.size());
    IterLog row;
    row.iteration = iter;
    double gate_sum = 0.0;
    std::size_t gate_count = 0;
    for (int b : batch) {
      Rng rng(Rng::derive(cfg.seed, 0x726f6c * 1315423911ull +
                          static_cast<std::uint64_t>(iter) * 7919ull + static_cast<std::uint64_t>(b)));
      trajs.push_back(rollout_policy(cfg.train_set[b], params, cfg.encoder, &stores[b], &rng, iter));
      row.mean_makespan += trajs.back().final_makespan;
      row.mean_emission += trajs.back().final_emission;
      for (const auto& step : trajs.back().steps) gate_sum += step.gate;
      gate_count += trajs.back().steps.size();
    }
    row.mean_makespan /= static_cast<double>(batch.size());
    row.mean_emission /= static_cast<double>(batch.size());
    row.gate_mean = gate_count ? gate_sum / static_cast<double>(gate_count) : 0.0;

    const LossReport report = ppo_update(trajs, params, opt, cfg.hyper, reward);
    row.policy_loss = report.policy_loss;
    row.value_loss = report.value_loss;
    row.entropy = report.entropy;
    if (!report.finite) {
      result.aborted = true;
      result.abort_reason = "non-finite loss at iteration " + std::to_string(iter);
      result.log.push_back(row);
      break;
    }

    if (has_val && iter % cfg.hyper.l_check == 0) {
      const double score = run_validation(iter);
      if (score < best_score) {
        params = snap_params;  // revert to the interval start
        opt = snap_opt;
        row.rollback = 1;
        result.rollbacks += 1;
      } else {
        best_score = score;
      }
      snap_params = params;
      snap_opt = opt;
      write_ckpt("iter" + std::to_string(iter));
    }

    result.log.push_back(row);
    if (iter % cfg.hyper.l_batch == 0)
      batch = sample_batch(cfg.train_set.size(), cfg.hyper.batch_size, batch_rng);
  }

  write_ckpt("final");
  result.params = std::move(params);
  return result;
}

}  // namespace luca
