#include "luca/rewards.hpp"

#include <cmath>

namespace luca {

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
  std::vector<double> returns(rewards.size(), 0.0);
  double acc = 0.0;
  for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
    acc = rewards[t] + gamma * acc;
    returns[t] = acc;
  }
  return returns;
}

std::vector<double> zscore(const std::vector<double>& values, double eps) {
  if (values.empty()) throw std::invalid_argument("zscore: empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double denom = std::sqrt(var) + eps;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / denom;
  return out;
}

std::vector<double> combine_rewards(const std::vector<double>& r_ms_norm,
                                    const std::vector<double>& r_ce_norm, double lambda) {
  if (r_ms_norm.size() != r_ce_norm.size())
    throw std::invalid_argument("combine_rewards: length mismatch");
  std::vector<double> out(r_ms_norm.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - lambda) * r_ms_norm[i] + lambda * r_ce_norm[i];
  return out;
}

std::vector<double> advantages(const std::vector<double>& returns,
                               const std::vector<double>& values) {
  if (returns.size() != values.size()) throw std::invalid_argument("advantages: length mismatch");
  std::vector<double> out(returns.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = returns[i] - values[i];
  return out;
}

}  // namespace luca
