#include "luca/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "luca/heuristics.hpp"

namespace fs = std::filesystem;

namespace luca {

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  write_text_file(tmp.string(), content);
  fs::rename(tmp, target);
}

std::vector<Instance> load_manifest(const std::string& manifest_path) {
  const fs::path base = fs::path(manifest_path).parent_path();
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
  std::vector<Instance> instances;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const fs::path inst_path = base / line;
    Instance inst = parse_fjsp(read_text_file(inst_path.string()), inst_path.stem().string());
    fs::path em_path = inst_path;
    em_path.replace_extension(".em");
    if (fs::exists(em_path)) {
      const auto rates = parse_emissions(read_text_file(em_path.string()), inst.n_machines());
      inst = attach_emissions(inst, EmissionSource::explicit_list(rates));
    }
    instances.push_back(std::move(inst));
  }
  if (instances.empty()) throw std::runtime_error("manifest lists no instances: " + manifest_path);
  return instances;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", x * 100.0);
  return buf;
}

std::string fix2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string fix3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

std::string timestamp_meta() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return std::string("created=") + buf + "\n";
}

GenConfig gen_config_from(const RunConfig& cfg) {
  GenConfig gen;
  gen.n_jobs = static_cast<int>(cfg.get_int("n_jobs", 10, 1, 1000));
  gen.n_machines = static_cast<int>(cfg.get_int("n_machines", 5, 1, 1000));
  gen.ops_per_job_min = static_cast<int>(cfg.get_int("ops_min", 4, 1, 1000));
  gen.ops_per_job_max = static_cast<int>(cfg.get_int("ops_max", 6, 1, 1000));
  gen.proc_time_min = cfg.get_double("p_min", 1.0, 1e-9, 1e9);
  gen.proc_time_max = cfg.get_double("p_max", 20.0, 1e-9, 1e9);
  gen.flexibility = cfg.get_double("flexibility", 1.0, 1e-9, 1.0);
  if (cfg.has("ratio")) {
    gen.e_min = 1.0;
    gen.e_max = RunConfig::parse_ratio(cfg.require_string("ratio"));
  } else {
    gen.e_min = cfg.get_double("e_min", 1.0, 1e-9, 1e9);
    gen.e_max = cfg.get_double("e_max", 8.0, 1e-9, 1e9);
  }
  gen.validate();
  return gen;
}

void echo_config(const RunConfig& cfg, const std::string& out_dir) {
  atomic_write(out_dir + "/config_effective.txt", cfg.to_text());
  atomic_write(out_dir + "/run_meta.txt", timestamp_meta());
}

PpoHyper hyper_from(const RunConfig& cfg) {
  PpoHyper h;
  h.clip_ratio = cfg.get_double("clip_ratio", 0.2, 1e-6, 0.999999);
  h.coef_policy = cfg.get_double("coef_policy", 1.0, 0.0, 1e6);
  h.coef_value = cfg.get_double("coef_value", 0.5, 0.0, 1e6);
  h.coef_entropy = cfg.get_double("coef_entropy", 0.01, 0.0, 1e6);
  h.epochs_per_update = static_cast<int>(cfg.get_int("epochs", 4, 1, 1000));
  h.iterations = static_cast<int>(cfg.get_int("iterations", 1000, 1, 1000000));
  h.batch_size = static_cast<int>(cfg.get_int("batch_size", 20, 1, 100000));
  h.l_batch = static_cast<int>(cfg.get_int("l_batch", 20, 1, 1000000));
  h.l_check = static_cast<int>(cfg.get_int("l_check", 50, 1, 1000000));
  h.n_l = static_cast<int>(cfg.get_int("n_l", 20, 1, 1000000));
  h.lr = cfg.get_double("lr", 2e-4, 1e-12, 1.0);
  h.validate();
  return h;
}

RewardConfig reward_from(const RunConfig& cfg) {
  RewardConfig r;
  r.lambda = cfg.get_double("lambda", 0.5, 0.0, 1.0);
  r.gamma = cfg.get_double("gamma", 1.0, 0.0, 1.0);
  r.zscore_eps = cfg.get_double("zscore_eps", 1e-8, 1e-300, 1.0);
  const std::string scope = cfg.get_string("normalize_scope", "returns");
  if (scope == "returns")
    r.scope = NormalizeScope::returns;
  else if (scope == "immediate")
    r.scope = NormalizeScope::immediate;
  else
    throw ConfigError("normalize_scope must be returns|immediate");
  r.validate();
  return r;
}

std::unique_ptr<TextEncoder> encoder_from(const RunConfig& cfg) {
  const char* env_url = std::getenv("LUCA_ENCODER_URL");
  std::string url = cfg.get_string("encoder_url", "");
  if (env_url && *env_url) url = env_url;  // environment overrides config
  std::string kind = cfg.get_string("encoder", "builtin");
  if (env_url && *env_url) kind = "remote";
  const int timeout = static_cast<int>(cfg.get_int("encoder_timeout_ms", 2000, 1, 3600000));
  const bool fallback = cfg.get_bool("encoder_fallback", true);
  return make_encoder(kind, url, timeout, fallback);
}

std::string instance_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "inst_%04d.fjsp", index);
  return buf;
}

}  // namespace

std::string ResultTable::csv() const {
  std::ostringstream out;
  out << "method,mean_makespan,std_makespan,mean_emission,std_emission,improv_ms,improv_em,"
         "approx_to_oracle\n";
  for (const auto& r : rows)
    out << r.method << ',' << format_double(r.mean_makespan) << ','
        << format_double(r.std_makespan) << ',' << format_double(r.mean_emission) << ','
        << format_double(r.std_emission) << ',' << format_double(r.improvement_ms) << ','
        << format_double(r.improvement_em) << ',' << format_double(r.approx_to_oracle) << '\n';
  return out.str();
}

std::string ResultTable::formatted() const {
  std::ostringstream out;
  out << "method      |  ms mean |   ms std | improv ms |  em mean |   em std | improv em | approx\n";
  out << "------------+----------+----------+-----------+----------+----------+-----------+-------\n";
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-11s | %8s | %8s | %9s | %8s | %8s | %9s | %s\n",
                  r.method.c_str(), fix2(r.mean_makespan).c_str(), fix2(r.std_makespan).c_str(),
                  pct(r.improvement_ms).c_str(), fix2(r.mean_emission).c_str(),
                  fix2(r.std_emission).c_str(), pct(r.improvement_em).c_str(),
                  r.approx_to_oracle > 0.0 ? fix3(r.approx_to_oracle).c_str() : "-");
    out << buf;
  }
  return out.str();
}

ResultTable summarize(const std::vector<MethodScores>& scores,
                      const std::vector<double>* oracle_makespans) {
  ResultTable table;
  if (scores.empty()) return table;
  double oracle_mean = 0.0;
  if (oracle_makespans && !oracle_makespans->empty())
    oracle_mean = mean_std(*oracle_makespans).first;

  const auto [base_ms, base_ms_std] = mean_std(scores[0].makespans);
  const auto [base_em, base_em_std] = mean_std(scores[0].emissions);
  for (const auto& s : scores) {
    ResultRow row;
    row.method = s.method;
    std::tie(row.mean_makespan, row.std_makespan) = mean_std(s.makespans);
    std::tie(row.mean_emission, row.std_emission) = mean_std(s.emissions);
    // positive = the primary method is better than this baseline
    row.improvement_ms = row.mean_makespan != 0.0
                             ? (row.mean_makespan - base_ms) / row.mean_makespan
                             : 0.0;
    row.improvement_em = row.mean_emission != 0.0
                             ? (row.mean_emission - base_em) / row.mean_emission
                             : 0.0;
    row.approx_to_oracle = oracle_mean > 0.0 ? row.mean_makespan / oracle_mean : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

int cmd_generate(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1, 0, 1L << 62));
  const int n_instances = static_cast<int>(cfg.get_int("n_instances", 200, 1, 1000000));
  const GenConfig gen = gen_config_from(cfg);
  const std::array<double, 3> fractions{cfg.get_double("train_frac", 0.8, 0.0, 1.0),
                                        cfg.get_double("val_frac", 0.1, 0.0, 1.0),
                                        cfg.get_double("test_frac", 0.1, 0.0, 1.0)};

  std::vector<Instance> instances;
  instances.reserve(n_instances);
  for (int i = 0; i < n_instances; ++i)
    instances.push_back(generate_instance(Rng::derive(seed, static_cast<std::uint64_t>(i)), gen));

  std::vector<std::string> names(n_instances);
  for (int i = 0; i < n_instances; ++i) {
    names[i] = instance_file_name(i);
    atomic_write(out_dir + "/instances/" + names[i], serialize_fjsp(instances[i]));
    std::string em_name = names[i];
    em_name.replace(em_name.size() - 5, 5, ".em");
    atomic_write(out_dir + "/instances/" + em_name, serialize_emissions(instances[i]));
  }

  // manifests reference instances by relative path; membership via split
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // reuse split_dataset's deterministic shuffle by splitting indices packed as names
  DatasetSplit split = split_dataset(instances, fractions, seed);
  auto manifest_for = [&](const std::vector<Instance>& subset) {
    std::ostringstream m;
    for (const auto& inst : subset) {
      // locate by identity: generated names are unique via provenance seed
      for (int i = 0; i < n_instances; ++i)
        if (instances[i].provenance.seed == inst.provenance.seed) {
          m << "instances/" << names[i] << '\n';
          break;
        }
    }
    return m.str();
  };
  atomic_write(out_dir + "/train.txt", manifest_for(split.train));
  atomic_write(out_dir + "/val.txt", manifest_for(split.val));
  atomic_write(out_dir + "/test.txt", manifest_for(split.test));
  echo_config(cfg, out_dir);
  std::printf("generated %d instances under %s (train/val/test = %zu/%zu/%zu)\n", n_instances,
              out_dir.c_str(), split.train.size(), split.val.size(), split.test.size());
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  const std::string dataset = cfg.require_string("dataset");

  TrainConfig tc;
  tc.train_set = load_manifest(dataset + "/train.txt");
  if (fs::exists(dataset + "/val.txt")) tc.val_set = load_manifest(dataset + "/val.txt");
  tc.hyper = hyper_from(cfg);
  tc.reward = reward_from(cfg);
  tc.mode = policy_mode_from_name(cfg.get_string("mode", "luca"));
  tc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1, 0, 1L << 62));
  tc.hint_quantile = cfg.get_double("hint_quantile", 0.75, 0.01, 0.99);
  auto encoder = encoder_from(cfg);
  tc.encoder = encoder.get();
  tc.checkpoint_dir = out_dir;

  const int runs = static_cast<int>(cfg.get_int("runs", 1, 1, 1000));
  for (int run = 0; run < runs; ++run) {
    TrainConfig run_cfg = tc;
    run_cfg.seed = runs == 1 ? tc.seed : Rng::derive(tc.seed, static_cast<std::uint64_t>(run));
    run_cfg.checkpoint_dir = runs == 1 ? out_dir : out_dir + "/run" + std::to_string(run);
    const TrainResult result = train(run_cfg);
    atomic_write(run_cfg.checkpoint_dir + "/run_log.csv", run_log_csv(result.log));
    if (result.aborted) {
      std::fprintf(stderr, "training aborted: %s\n", result.abort_reason.c_str());
      return 1;
    }
    std::printf("run %d finished: %zu iterations, %d rollbacks, final checkpoint %s\n", run,
                result.log.size(), result.rollbacks,
                result.checkpoint_paths.empty() ? "-" : result.checkpoint_paths.back().c_str());
  }
  echo_config(cfg, out_dir);
  return 0;
}

namespace {

struct EvalContext {
  std::vector<Instance> instances;
  std::uint64_t seed = 0;
  double oracle_lambda = 0.0;
  SearchLimits limits;
  TextEncoder* encoder = nullptr;
};

MethodScores evaluate_method(const std::string& token, const EvalContext& ctx,
                             std::vector<State>* schedules) {
  MethodScores scores;
  scores.method = token;
  for (std::size_t idx = 0; idx < ctx.instances.size(); ++idx) {
    const Instance& inst = ctx.instances[idx];
    double ms = 0.0, em = 0.0;
    State final_state;
    if (token.rfind("ckpt:", 0) == 0) {
      const auto [params, lambda] = load_policy(token.substr(5));
      (void)lambda;
      EvalOutcome out = greedy_schedule(inst, params, ctx.encoder);
      ms = out.makespan;
      em = out.emission;
      final_state = std::move(out.final_state);
    } else if (token == "oracle") {
      const ExactResult res = solve_exact(inst, Objective{ctx.oracle_lambda}, ctx.limits);
      State s = State::reset(inst);
      for (const auto& e : res.best_schedule) s.step({e.job_id, e.op_index, e.machine_id});
      ms = s.makespan();
      em = s.total_emission();
      final_state = std::move(s);
    } else if (auto rule = Rule::from_token(token)) {
      Rule r = *rule;
      if (r.kind == Rule::Kind::RANDOM) r.seed = Rng::derive(ctx.seed, idx);
      RolloutResult out = rollout_heuristic(inst, r);
      ms = out.makespan;
      em = out.emission;
      final_state = std::move(out.final_state);
    } else {
      throw ConfigError("unknown method '" + token + "' (expected ckpt:<path>|" +
                        "fifo|spt|mor|mwkr|random|oracle)");
    }
    scores.makespans.push_back(ms);
    scores.emissions.push_back(em);
    if (schedules) schedules->push_back(std::move(final_state));
  }
  return scores;
}

std::string per_instance_csv(const std::vector<MethodScores>& all,
                             const std::vector<Instance>& instances) {
  std::ostringstream out;
  out << "method,instance,makespan,emission\n";
  for (const auto& scores : all)
    for (std::size_t i = 0; i < instances.size(); ++i)
      out << scores.method << ',' << instances[i].name << ','
          << format_double(scores.makespans[i]) << ',' << format_double(scores.emissions[i])
          << '\n';
  return out.str();
}

}  // namespace

int cmd_eval(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  const std::string manifest = cfg.has("manifest") ? cfg.require_string("manifest")
                                                   : cfg.require_string("dataset") + "/test.txt";
  EvalContext ctx;
  ctx.instances = load_manifest(manifest);
  ctx.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1, 0, 1L << 62));
  ctx.oracle_lambda = cfg.get_double("oracle_lambda", 0.0, 0.0, 1.0);
  ctx.limits.max_nodes = cfg.get_int("oracle_max_nodes", 20'000'000, 1, 1L << 60);
  ctx.limits.max_seconds = cfg.get_double("oracle_max_seconds", 60.0, 0.001, 1e9);
  ctx.limits.max_total_ops = static_cast<int>(cfg.get_int("oracle_cap", 12, 1, 64));
  auto encoder = encoder_from(cfg);
  ctx.encoder = encoder.get();

  const auto methods = cfg.get_list("methods", {"fifo", "spt", "mor", "mwkr"});
  std::vector<MethodScores> all;
  std::vector<State> primary_schedules;
  const std::vector<double>* oracle_ms = nullptr;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    all.push_back(evaluate_method(methods[i], ctx, i == 0 ? &primary_schedules : nullptr));
    if (methods[i] == "oracle") oracle_ms = &all.back().makespans;
  }

  const ResultTable table = summarize(all, oracle_ms);
  atomic_write(out_dir + "/per_instance.csv", per_instance_csv(all, ctx.instances));
  atomic_write(out_dir + "/summary.csv", table.csv());
  atomic_write(out_dir + "/summary.txt", table.formatted());

  // gantt charts of the primary method's best / worst instances by makespan
  if (!primary_schedules.empty()) {
    const auto& ms = all[0].makespans;
    const auto best = std::min_element(ms.begin(), ms.end()) - ms.begin();
    const auto worst = std::max_element(ms.begin(), ms.end()) - ms.begin();
    atomic_write(out_dir + "/gantt_best.svg", export_gantt(primary_schedules[best]));
    atomic_write(out_dir + "/gantt_worst.svg", export_gantt(primary_schedules[worst]));
  }
  echo_config(cfg, out_dir);
  std::fputs(table.formatted().c_str(), stdout);
  return 0;
}

int cmd_sweep_lambda(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  const std::string dataset = cfg.require_string("dataset");
  const auto lambdas = cfg.get_double_list("lambdas", {0.3, 0.4, 0.5, 0.6, 0.7});

  auto encoder = encoder_from(cfg);
  TrainConfig base;
  base.train_set = load_manifest(dataset + "/train.txt");
  if (fs::exists(dataset + "/val.txt")) base.val_set = load_manifest(dataset + "/val.txt");
  base.hyper = hyper_from(cfg);
  base.reward = reward_from(cfg);
  base.mode = policy_mode_from_name(cfg.get_string("mode", "luca"));
  base.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1, 0, 1L << 62));
  base.hint_quantile = cfg.get_double("hint_quantile", 0.75, 0.01, 0.99);
  base.encoder = encoder.get();
  const auto test_set = load_manifest(dataset + "/test.txt");

  std::ostringstream sweep_csv, pareto_csv;
  sweep_csv << "lambda,mean_makespan,std_makespan,mean_emission,std_emission\n";
  pareto_csv << "lambda,mean_makespan,mean_emission\n";
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda out of [0,1] in sweep");
    TrainConfig tc = base;
    tc.reward.lambda = lambda;
    const TrainResult result = train(tc);
    const std::string tag = "lambda_" + format_double(lambda);
    save_policy(result.params, lambda, out_dir + "/ckpt_" + tag + ".txt");
    atomic_write(out_dir + "/run_log_" + tag + ".csv", run_log_csv(result.log));

    MethodScores scores;
    scores.method = tag;
    for (const Instance& inst : test_set) {
      const EvalOutcome out = greedy_schedule(inst, result.params, encoder.get());
      scores.makespans.push_back(out.makespan);
      scores.emissions.push_back(out.emission);
    }
    const auto [ms_mean, ms_std] = mean_std(scores.makespans);
    const auto [em_mean, em_std] = mean_std(scores.emissions);
    sweep_csv << format_double(lambda) << ',' << format_double(ms_mean) << ','
              << format_double(ms_std) << ',' << format_double(em_mean) << ','
              << format_double(em_std) << '\n';
    pareto_csv << format_double(lambda) << ',' << format_double(ms_mean) << ','
               << format_double(em_mean) << '\n';
    std::printf("lambda=%.2f: makespan %.2f +- %.2f, emission %.2f +- %.2f\n", lambda, ms_mean,
                ms_std, em_mean, em_std);
  }
  atomic_write(out_dir + "/sweep_lambda.csv", sweep_csv.str());
  atomic_write(out_dir + "/pareto.csv", pareto_csv.str());
  echo_config(cfg, out_dir);
  return 0;
}

int cmd_sweep_ratio(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  const std::string dataset = cfg.require_string("dataset");
  const auto ratios = cfg.get_list("ratios", {"1:2", "1:4", "1:8", "1:16"});
  const double lambda = cfg.get_double("lambda", 0.5, 0.0, 1.0);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1, 0, 1L << 62));
  const bool do_train = cfg.get_bool("train", true);

  auto encoder = encoder_from(cfg);
  std::vector<Instance> train_set = load_manifest(dataset + "/train.txt");
  std::vector<Instance> val_set;
  if (fs::exists(dataset + "/val.txt")) val_set = load_manifest(dataset + "/val.txt");
  std::vector<Instance> test_set = load_manifest(dataset + "/test.txt");

  std::ostringstream ratio_csv;
  ratio_csv << "ratio,mean_makespan,std_makespan,mean_emission,std_emission\n";
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    const double e_max = RunConfig::parse_ratio(ratios[ri]);
    // deterministic per (seed, ratio) sidecar regeneration
    auto reattach = [&](std::vector<Instance> set, std::uint64_t tag) {
      for (auto& inst : set)
        inst = attach_emissions(
            inst, EmissionSource::sampled(Rng::derive(seed, tag * 1000003ull + ri), 1.0, e_max));
      return set;
    };
    const auto train_r = reattach(train_set, 1);
    const auto val_r = reattach(val_set, 2);
    const auto test_r = reattach(test_set, 3);

    MethodScores scores;
    scores.method = ratios[ri];
    if (do_train) {
      TrainConfig tc;
      tc.train_set = train_r;
      tc.val_set = val_r;
      tc.hyper = hyper_from(cfg);
      tc.reward = reward_from(cfg);
      tc.reward.lambda = lambda;
      tc.mode = policy_mode_from_name(cfg.get_string("mode", "luca"));
      tc.seed = seed;
      tc.encoder = encoder.get();
      const TrainResult result = train(tc);
      save_policy(result.params, lambda, out_dir + "/ckpt_ratio_" + std::to_string(ri) + ".txt");
      for (const Instance& inst : test_r) {
        const EvalOutcome out = greedy_schedule(inst, result.params, encoder.get());
        scores.makespans.push_back(out.makespan);
        scores.emissions.push_back(out.emission);
      }
    } else {
      const std::string method = cfg.get_string("method", "mwkr");
      EvalContext ctx;
      ctx.instances = test_r;
      ctx.seed = seed;
      ctx.encoder = encoder.get();
      scores = evaluate_method(method, ctx, nullptr);
      scores.method = ratios[ri];
    }
    const auto [ms_mean, ms_std] = mean_std(scores.makespans);
    const auto [em_mean, em_std] = mean_std(scores.emissions);
    ratio_csv << ratios[ri] << ',' << format_double(ms_mean) << ',' << format_double(ms_std)
              << ',' << format_double(em_mean) << ',' << format_double(em_std) << '\n';
    std::printf("ratio %s: makespan %.2f +- %.2f, emission %.2f +- %.2f\n", ratios[ri].c_str(),
                ms_mean, ms_std, em_mean, em_std);
  }
  atomic_write(out_dir + "/sweep_ratio.csv", ratio_csv.str());
  echo_config(cfg, out_dir);
  return 0;
}

int cmd_oracle(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  std::vector<Instance> instances;
  if (cfg.has("instance")) {
    const std::string path = cfg.require_string("instance");
    Instance inst = parse_fjsp(read_text_file(path), fs::path(path).stem().string());
    fs::path em_path = fs::path(path);
    em_path.replace_extension(".em");
    if (fs::exists(em_path)) {
      const auto rates = parse_emissions(read_text_file(em_path.string()), inst.n_machines());
      inst = attach_emissions(inst, EmissionSource::explicit_list(rates));
    }
    instances.push_back(std::move(inst));
  } else {
    instances = load_manifest(cfg.require_string("manifest"));
  }

  Objective obj{cfg.get_double("lambda", 0.0, 0.0, 1.0)};
  SearchLimits lim;
  lim.max_nodes = cfg.get_int("max_nodes", 20'000'000, 1, 1L << 60);
  lim.max_seconds = cfg.get_double("max_seconds", 60.0, 0.001, 1e9);
  lim.max_total_ops = static_cast<int>(cfg.get_int("cap", 12, 1, 64));

  std::ostringstream csv;
  csv << "instance,value,proven_optimal,nodes,makespan,emission\n";
  for (const Instance& inst : instances) {
    const ExactResult res = solve_exact(inst, obj, lim);
    State s = State::reset(inst);
    for (const auto& e : res.best_schedule) s.step({e.job_id, e.op_index, e.machine_id});
    csv << inst.name << ',' << format_double(res.best_value) << ',' << (res.proven_optimal ? 1 : 0)
        << ',' << res.explored_nodes << ',' << format_double(s.makespan()) << ','
        << format_double(s.total_emission()) << '\n';
    atomic_write(out_dir + "/schedule_" + inst.name + ".csv", schedule_csv(s));
    std::printf("%s: value %.4f (%s, %ld nodes)\n", inst.name.c_str(), res.best_value,
                res.proven_optimal ? "optimal" : "limit hit", res.explored_nodes);
  }
  atomic_write(out_dir + "/oracle.csv", csv.str());
  echo_config(cfg, out_dir);
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  const std::string out_dir = cfg.require_string("out");
  std::ostringstream md;
  md << "# Benchmark report\n\n";

  if (fs::exists(out_dir + "/summary.txt")) {
    md << "## Evaluation summary\n\n```\n" << read_text_file(out_dir + "/summary.txt")
       << "```\n\n";
  }
  if (fs::exists(out_dir + "/gantt_best.svg")) md << "![best schedule](gantt_best.svg)\n\n";
  if (fs::exists(out_dir + "/gantt_worst.svg")) md << "![worst schedule](gantt_worst.svg)\n\n";

  if (fs::exists(out_dir + "/pareto.csv")) {
    // scatter of (makespan, emission) per lambda
    std::istringstream in(read_text_file(out_dir + "/pareto.csv"));
    std::string line;
    std::getline(in, line);  // header
    struct Pt {
      double lambda, ms, em;
    };
    std::vector<Pt> pts;
    while (std::getline(in, line)) {
      Pt p{};
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.lambda, &p.ms, &p.em) == 3)
        pts.push_back(p);
    }
    if (!pts.empty()) {
      double ms_lo = pts[0].ms, ms_hi = pts[0].ms, em_lo = pts[0].em, em_hi = pts[0].em;
      for (const auto& p : pts) {
        ms_lo = std::min(ms_lo, p.ms);
        ms_hi = std::max(ms_hi, p.ms);
        em_lo = std::min(em_lo, p.em);
        em_hi = std::max(em_hi, p.em);
      }
      const double pad_ms = std::max(1e-9, (ms_hi - ms_lo) * 0.1 + 1e-9);
      const double pad_em = std::max(1e-9, (em_hi - em_lo) * 0.1 + 1e-9);
      ms_lo -= pad_ms;
      ms_hi += pad_ms;
      em_lo -= pad_em;
      em_hi += pad_em;
      std::ostringstream svg;
      const double w = 500.0, h = 400.0, margin = 50.0;
      svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
          << "\" height=\"" << h << "\">\n";
      svg << "  <line x1=\"" << margin << "\" y1=\"" << (h - margin) << "\" x2=\"" << (w - 10)
          << "\" y2=\"" << (h - margin) << "\" stroke=\"#333\"/>\n";
      svg << "  <line x1=\"" << margin << "\" y1=\"10\" x2=\"" << margin << "\" y2=\""
          << (h - margin) << "\" stroke=\"#333\"/>\n";
      svg << "  <text x=\"" << (w / 2) << "\" y=\"" << (h - 12)
          << "\" font-size=\"12\" text-anchor=\"middle\">makespan</text>\n";
      svg << "  <text x=\"14\" y=\"" << (h / 2)
          << "\" font-size=\"12\" transform=\"rotate(-90 14 " << (h / 2)
          << ")\" text-anchor=\"middle\">emission</text>\n";
      for (const auto& p : pts) {
        const double x = margin + (p.ms - ms_lo) / (ms_hi - ms_lo) * (w - margin - 10);
        const double y = (h - margin) - (p.em - em_lo) / (em_hi - em_lo) * (h - margin - 10);
        svg << "  <circle class=\"pt\" cx=\"" << x << "\" cy=\"" << y
            << "\" r=\"4\" fill=\"#2266cc\"/>\n";
        svg << "  <text x=\"" << (x + 6) << "\" y=\"" << (y - 6) << "\" font-size=\"10\">l="
            << format_double(p.lambda) << "</text>\n";
      }
      svg << "</svg>\n";
      atomic_write(out_dir + "/pareto.svg", svg.str());
      md << "## Pareto sweep\n\n![pareto](pareto.svg)\n\n";
    }
  }
  if (fs::exists(out_dir + "/sweep_ratio.csv")) {
    md << "## Emission-ratio sweep\n\n```\n" << read_text_file(out_dir + "/sweep_ratio.csv")
       << "```\n\n";
  }
  if (fs::exists(out_dir + "/config_effective.txt")) {
    md << "## Effective configuration\n\n```\n" << read_text_file(out_dir + "/config_effective.txt")
       << "```\n";
  }
  atomic_write(out_dir + "/report.md", md.str());
  std::printf("report written to %s/report.md\n", out_dir.c_str());
  return 0;
}

}  // namespace luca
