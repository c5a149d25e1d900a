#pragma once

// Central finite-difference gradient checking against a scalar loss.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace luca::testing {

struct FdReport {
  double worst_err = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  bool pass = true;
};

// err = |a - n| / max(|a|, |n|, floor); pass if err <= rel_tol everywhere
inline FdReport check_gradient(std::vector<double> params,
                               const std::function<double(const std::vector<double>&)>& loss,
                               const std::vector<double>& analytic, double rel_tol,
                               double abs_floor = 1e-6, double step = 1e-6) {
  FdReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    const double h = step * std::max(1.0, std::fabs(saved));
    params[i] = saved + h;
    const double up = loss(params);
    params[i] = saved - h;
    const double down = loss(params);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double err = std::fabs(analytic[i] - numeric) /
                       std::max({std::fabs(analytic[i]), std::fabs(numeric), abs_floor});
    if (err > report.worst_err) {
      report.worst_err = err;
      report.worst_index = i;
      report.analytic_at_worst = analytic[i];
      report.numeric_at_worst = numeric;
    }
  }
  report.pass = report.worst_err <= rel_tol;
  return report;
}

}  // namespace luca::testing
