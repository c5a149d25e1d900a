#pragma once

#include <utility>
#include <vector>

#include "luca/common.hpp"
#include "luca/sim_env.hpp"

namespace luca {

enum class NormalizeScope { returns, immediate };

struct RewardConfig {
  double lambda = 0.5;   // 0 = pure makespan, 1 = pure emission
  double gamma = 1.0;    // discount; episodes are short and finite
  double zscore_eps = 1e-8;
  NormalizeScope scope = NormalizeScope::returns;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0,1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0,1]");
    if (!(zscore_eps > 0.0)) throw ConfigError("zscore_eps must be positive");
  }
};

// r_ms = -(makespan lower-bound increment), r_ce = -(emission increment)
inline std::pair<double, double> immediate_rewards(const StepOutcome& outcome) {
  return {-outcome.delta_makespan_lb, -outcome.delta_emission};
}

// R_t = sum_{v>=0} gamma^v r_{t+v}, horizon = episode end
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

// (v - mean) / (population std + eps)
std::vector<double> zscore(const std::vector<double>& values, double eps);

// R = (1-lambda) * R_ms + lambda * R_ce, elementwise
std::vector<double> combine_rewards(const std::vector<double>& r_ms_norm,
                                    const std::vector<double>& r_ce_norm, double lambda);

// A_t = R_t - V(s_t)
std::vector<double> advantages(const std::vector<double>& returns,
                               const std::vector<double>& values);

}  // namespace luca
