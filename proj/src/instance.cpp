#include "luca/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace luca {

double OperationSpec::min_time() const {
  double best = alternatives.front().second;
  for (const auto& [m, p] : alternatives) best = std::min(best, p);
  return best;
}

double OperationSpec::mean_time() const {
  double sum = 0.0;
  for (const auto& [m, p] : alternatives) sum += p;
  return sum / static_cast<double>(alternatives.size());
}

bool OperationSpec::eligible(int machine_id) const {
  for (const auto& [m, p] : alternatives)
    if (m == machine_id) return true;
  return false;
}

double OperationSpec::time_on(int machine_id) const {
  for (const auto& [m, p] : alternatives)
    if (m == machine_id) return p;
  throw std::invalid_argument("machine " + std::to_string(machine_id) +
                              " not eligible for job " + std::to_string(job_id) + " op " +
                              std::to_string(op_index));
}

void GenConfig::validate() const {
  if (n_jobs < 1) throw ConfigError("n_jobs must be >= 1");
  if (n_machines < 1) throw ConfigError("n_machines must be >= 1");
  if (ops_per_job_min < 1 || ops_per_job_max < ops_per_job_min)
    throw ConfigError("ops_per_job range invalid");
  if (!(proc_time_min > 0.0) || proc_time_max < proc_time_min)
    throw ConfigError("proc_time range invalid");
  if (!(flexibility > 0.0) || flexibility > 1.0) throw ConfigError("flexibility must be in (0,1]");
  if (!(e_min > 0.0) || e_max < e_min) throw ConfigError("emission rate range invalid");
}

void Instance::finalize() {
  if (jobs.empty()) throw ConfigError("instance has no jobs");
  if (machines.empty()) throw ConfigError("instance has no machines");
  const int m = n_machines();
  for (int j = 0; j < m; ++j) {
    if (machines[j].machine_id != j) throw ConfigError("machine ids must be 0..m-1 in order");
    if (!(machines[j].emission_rate > 0.0)) throw ConfigError("emission rates must be positive");
  }

  total_ops_ = 0;
  flat_offset_.assign(jobs.size(), 0);
  min_suffix_.assign(jobs.size(), {});
  max_proc_time_ = 0.0;
  horizon_ = 0.0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].empty()) throw ConfigError("job " + std::to_string(i) + " has no operations");
    flat_offset_[i] = total_ops_;
    total_ops_ += static_cast<int>(jobs[i].size());
    for (std::size_t k = 0; k < jobs[i].size(); ++k) {
      const auto& op = jobs[i][k];
      if (op.job_id != static_cast<int>(i) || op.op_index != static_cast<int>(k))
        throw ConfigError("operation indices inconsistent with position");
      if (op.alternatives.empty())
        throw ConfigError("operation without alternatives in job " + std::to_string(i));
      double max_alt = 0.0;
      int prev_machine = -1;
      for (const auto& [mid, p] : op.alternatives) {
        if (mid < 0 || mid >= m)
          throw ConfigError("alternative references unknown machine " + std::to_string(mid));
        if (mid <= prev_machine) throw ConfigError("alternatives must be sorted by machine id");
        prev_machine = mid;
        if (!(p > 0.0)) throw ConfigError("processing times must be positive");
        max_proc_time_ = std::max(max_proc_time_, p);
        max_alt = std::max(max_alt, p);
      }
      horizon_ += max_alt;
    }
    // suffix sums of min-alternative times
    auto& suf = min_suffix_[i];
    suf.assign(jobs[i].size() + 1, 0.0);
    for (int k = static_cast<int>(jobs[i].size()) - 1; k >= 0; --k)
      suf[k] = jobs[i][k].min_time() + suf[k + 1];
  }
  max_emission_rate_ = 0.0;
  for (const auto& mp : machines) max_emission_rate_ = std::max(max_emission_rate_, mp.emission_rate);
}

std::pair<int, int> Instance::op_from_flat(int flat) const {
  for (int i = n_jobs() - 1; i >= 0; --i)
    if (flat >= flat_offset_[i]) return {i, flat - flat_offset_[i]};
  throw std::invalid_argument("flat op id out of range");
}

double Instance::min_work_suffix(int job, int k) const { return min_suffix_[job][k]; }

bool structurally_equal(const Instance& a, const Instance& b) {
  if (a.n_jobs() != b.n_jobs() || a.n_machines() != b.n_machines()) return false;
  for (int i = 0; i < a.n_jobs(); ++i) {
    if (a.jobs[i].size() != b.jobs[i].size()) return false;
    for (std::size_t k = 0; k < a.jobs[i].size(); ++k)
      if (a.jobs[i][k].alternatives != b.jobs[i][k].alternatives) return false;
  }
  return true;
}

Instance generate_instance(std::uint64_t seed, const GenConfig& cfg) {
  cfg.validate();
  Rng rng(Rng::derive(seed, 0x67656e));  // instance-body stream
  Instance inst;
  inst.name = "syn" + std::to_string(seed) + "_" + std::to_string(cfg.n_jobs) + "x" +
              std::to_string(cfg.n_machines);
  inst.provenance = {Provenance::Kind::synthetic, seed, cfg, ""};

  inst.machines.resize(cfg.n_machines);
  Rng erng(Rng::derive(seed, 0x656d69));  // emission stream, matches attach_emissions
  for (int j = 0; j < cfg.n_machines; ++j) {
    inst.machines[j].machine_id = j;
    inst.machines[j].emission_rate = round_to_tenth(erng.uniform(cfg.e_min, cfg.e_max));
    if (inst.machines[j].emission_rate < cfg.e_min) inst.machines[j].emission_rate = cfg.e_min;
  }

  inst.jobs.resize(cfg.n_jobs);
  for (int i = 0; i < cfg.n_jobs; ++i) {
    const int k_i = rng.uniform_int(cfg.ops_per_job_min, cfg.ops_per_job_max);
    inst.jobs[i].resize(k_i);
    for (int k = 0; k < k_i; ++k) {
      OperationSpec& op = inst.jobs[i][k];
      op.job_id = i;
      op.op_index = k;
      for (int j = 0; j < cfg.n_machines; ++j)
        if (rng.uniform01() < cfg.flexibility) op.alternatives.emplace_back(j, 0.0);
      if (op.alternatives.empty())
        op.alternatives.emplace_back(rng.uniform_int(0, cfg.n_machines - 1), 0.0);
      for (auto& [m, p] : op.alternatives) {
        p = round_to_tenth(rng.uniform(cfg.proc_time_min, cfg.proc_time_max));
        if (p < cfg.proc_time_min) p = round_to_tenth(cfg.proc_time_min + 0.05);
        if (!(p > 0.0)) p = 0.1;
      }
    }
  }
  inst.finalize();
  return inst;
}

namespace {

// whitespace tokenizer that tracks line numbers for parse diagnostics
class TokenStream {
 public:
  explicit TokenStream(const std::string& text) : text_(text) {}

  bool next(std::string& out) {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) return false;
    std::size_t start = pos_;
    token_line_ = line_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    out = text_.substr(start, pos_ - start);
    return true;
  }

  // line on which the next token starts, without consuming it
  int peek_line() {
    std::size_t p = pos_;
    int l = line_;
    while (p < text_.size() && is_space(text_[p])) {
      if (text_[p] == '\n') ++l;
      ++p;
    }
    return p < text_.size() ? l : -1;
  }

  int expect_int(const std::string& what) {
    std::string tok;
    if (!next(tok)) throw ParseError("unexpected end of file, expected " + what, line_);
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected integer for " + what + ", got '" + tok + "'", line_);
    }
  }

  double expect_double(const std::string& what) {
    std::string tok;
    if (!next(tok)) throw ParseError("unexpected end of file, expected " + what, line_);
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected number for " + what + ", got '" + tok + "'", line_);
    }
  }

  bool at_end() { return peek_line() < 0; }

  int line() const { return line_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int token_line_ = 1;
};

}  // namespace

Instance parse_fjsp(const std::string& text, const std::string& name) {
  TokenStream ts(text);
  const int header_line = ts.peek_line();
  if (header_line < 0) throw ParseError("empty document", 1);
  const int n = ts.expect_int("job count");
  const int m = ts.expect_int("machine count");
  if (n < 1) throw ParseError("job count must be >= 1", ts.line());
  if (m < 1) throw ParseError("machine count must be >= 1", ts.line());
  // optional avg-flexibility token(s): anything else on the header line is ignored
  while (ts.peek_line() == header_line) {
    (void)ts.expect_double("header flexibility token");
  }

  Instance inst;
  inst.name = name;
  inst.provenance = {Provenance::Kind::parsed, 0, {}, name};
  inst.machines.resize(m);
  for (int j = 0; j < m; ++j) inst.machines[j] = {j, 1.0};

  inst.jobs.resize(n);
  for (int i = 0; i < n; ++i) {
    if (ts.at_end())
      throw ParseError("header claims " + std::to_string(n) + " jobs but job " +
                           std::to_string(i) + " is missing",
                       ts.line());
    const int k_i = ts.expect_int("operation count of job " + std::to_string(i));
    if (k_i < 1) throw ParseError("job " + std::to_string(i) + " needs >= 1 operation", ts.line());
    inst.jobs[i].resize(k_i);
    for (int k = 0; k < k_i; ++k) {
      OperationSpec& op = inst.jobs[i][k];
      op.job_id = i;
      op.op_index = k;
      const int a = ts.expect_int("alternative count");
      if (a < 1) throw ParseError("operation needs >= 1 alternative", ts.line());
      for (int q = 0; q < a; ++q) {
        const int mid = ts.expect_int("machine id");
        const double p = ts.expect_double("processing time");
        if (mid < 1 || mid > m)
          throw ParseError(
              "machine id " + std::to_string(mid) + " out of range 1.." + std::to_string(m),
              ts.line());
        if (!(p > 0.0)) throw ParseError("processing time must be positive", ts.line());
        op.alternatives.emplace_back(mid - 1, p);
      }
      std::sort(op.alternatives.begin(), op.alternatives.end());
      for (std::size_t q = 1; q < op.alternatives.size(); ++q)
        if (op.alternatives[q].first == op.alternatives[q - 1].first)
          throw ParseError("duplicate machine id in alternatives", ts.line());
    }
  }
  if (!ts.at_end()) throw ParseError("trailing tokens after last job", ts.line());
  inst.finalize();
  return inst;
}

std::string serialize_fjsp(const Instance& inst) {
  std::ostringstream out;
  out << inst.n_jobs() << ' ' << inst.n_machines() << '\n';
  for (const auto& job : inst.jobs) {
    out << job.size();
    for (const auto& op : job) {
      out << ' ' << op.alternatives.size();
      for (const auto& [m, p] : op.alternatives) {
        out << ' ' << (m + 1) << ' ';
        if (has_tenth_granularity(p))
          out << format_fixed1(p);
        else
          out << format_double(p);
      }
    }
    out << '\n';
  }
  return out.str();
}

EmissionSource EmissionSource::explicit_list(std::vector<double> r) {
  EmissionSource s;
  s.kind = Kind::explicit_rates;
  s.rates = std::move(r);
  return s;
}

EmissionSource EmissionSource::sampled(std::uint64_t seed, double e_min, double e_max) {
  EmissionSource s;
  s.kind = Kind::sampled;
  s.seed = seed;
  s.e_min = e_min;
  s.e_max = e_max;
  return s;
}

Instance attach_emissions(const Instance& inst, const EmissionSource& source) {
  Instance out = inst;
  if (source.kind == EmissionSource::Kind::explicit_rates) {
    if (static_cast<int>(source.rates.size()) != inst.n_machines())
      throw ConfigError("expected " + std::to_string(inst.n_machines()) + " rates, got " +
                        std::to_string(source.rates.size()));
    for (int j = 0; j < inst.n_machines(); ++j) {
      if (!(source.rates[j] > 0.0)) throw ConfigError("emission rates must be positive");
      out.machines[j].emission_rate = source.rates[j];
    }
  } else {
    if (!(source.e_min > 0.0) || source.e_max < source.e_min)
      throw ConfigError("emission rate range invalid");
    Rng rng(Rng::derive(source.seed, 0x656d69));
    for (int j = 0; j < inst.n_machines(); ++j) {
      double r = round_to_tenth(rng.uniform(source.e_min, source.e_max));
      if (r < source.e_min) r = source.e_min;
      out.machines[j].emission_rate = r;
    }
  }
  out.finalize();
  return out;
}

std::string serialize_emissions(const Instance& inst) {
  std::ostringstream out;
  for (int j = 0; j < inst.n_machines(); ++j) {
    if (j) out << ' ';
    out << format_double(inst.machines[j].emission_rate);
  }
  out << '\n';
  return out.str();
}

std::vector<double> parse_emissions(const std::string& text, int n_machines) {
  TokenStream ts(text);
  std::vector<double> rates;
  rates.reserve(n_machines);
  for (int j = 0; j < n_machines; ++j) {
    const double r = ts.expect_double("emission rate " + std::to_string(j));
    if (!(r > 0.0)) throw ParseError("emission rates must be positive", ts.line());
    rates.push_back(r);
  }
  if (!ts.at_end()) throw ParseError("trailing tokens in emission sidecar", ts.line());
  return rates;
}

DatasetSplit split_dataset(const std::vector<Instance>& instances,
                           const std::array<double, 3>& fractions, std::uint64_t seed) {
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  for (double f : fractions)
    if (f < 0.0) throw ConfigError("split fractions must be nonnegative");

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::derive(seed, 0x73706c69));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.index(i)]);

  const auto n = instances.size();
  auto count = [&](double f) { return static_cast<std::size_t>(std::llround(f * static_cast<double>(n))); };
  std::size_t n_train = std::min(n, count(fractions[0]));
  std::size_t n_val = std::min(n - n_train, count(fractions[1]));

  DatasetSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    const Instance& inst = instances[order[i]];
    if (i < n_train)
      split.train.push_back(inst);
    else if (i < n_train + n_val)
      split.val.push_back(inst);
    else
      split.test.push_back(inst);
  }
  return split;
}

}  // namespace luca
