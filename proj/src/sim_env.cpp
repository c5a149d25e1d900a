#include "luca/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace luca {

State State::reset(const Instance& inst) {
  State s;
  s.inst_ = &inst;
  s.next_op_.assign(inst.n_jobs(), 0);
  s.job_ready_.assign(inst.n_jobs(), 0.0);
  s.machine_free_.assign(inst.n_machines(), 0.0);
  return s;
}

Emission State::total_emission() const {
  Emission total = 0.0;
  for (const auto& e : entries_)
    total += inst_->op(e.job_id, e.op_index).time_on(e.machine_id) *
             inst_->emission_rate(e.machine_id);
  return total;
}

Time State::lower_bound_makespan() const {
  // chains fold left to right, matching how schedule end times accumulate;
  // this keeps the bound exactly monotone in floating point
  Time lb = makespan_;
  for (int i = 0; i < inst_->n_jobs(); ++i) {
    if (job_finished(i)) continue;
    Time chain = job_ready_[i];
    for (int k = next_op_[i]; k < inst_->ops_in_job(i); ++k) chain += inst_->min_alt_time(i, k);
    lb = std::max(lb, chain);
  }
  return lb;
}

Time State::est_ready(int job, int op_index) const {
  const int nxt = next_op_[job];
  if (op_index < nxt) throw std::invalid_argument("operation already scheduled");
  Time ready = job_ready_[job];
  for (int k = nxt; k < op_index; ++k) ready += inst_->min_alt_time(job, k);
  return ready;
}

std::vector<Action> State::legal_actions() const {
  std::vector<Action> actions;
  for (int i = 0; i < inst_->n_jobs(); ++i) {
    if (job_finished(i)) continue;
    const int k = next_op_[i];
    for (const auto& [m, p] : inst_->op(i, k).alternatives) actions.push_back({i, k, m});
  }
  return actions;
}

bool State::is_legal(const Action& a) const {
  if (a.job_id < 0 || a.job_id >= inst_->n_jobs()) return false;
  if (job_finished(a.job_id) || next_op_[a.job_id] != a.op_index) return false;
  return inst_->op(a.job_id, a.op_index).eligible(a.machine_id);
}

StepOutcome State::step(const Action& a) {
  if (!is_legal(a))
    throw std::invalid_argument("illegal action (job " + std::to_string(a.job_id) + ", op " +
                                std::to_string(a.op_index) + ", machine " +
                                std::to_string(a.machine_id) + ")");
  const Time lb_before = lower_bound_makespan();
  const double p = inst_->op(a.job_id, a.op_index).time_on(a.machine_id);
  const Time start = std::max(machine_free_[a.machine_id], job_ready_[a.job_id]);
  const Time end = start + p;

  entries_.push_back({a.job_id, a.op_index, a.machine_id, start, end});
  next_op_[a.job_id] += 1;
  job_ready_[a.job_id] = end;
  machine_free_[a.machine_id] = end;
  makespan_ = std::max(makespan_, end);
  emission_so_far_ += p * inst_->emission_rate(a.machine_id);

  StepOutcome out;
  out.delta_emission = p * inst_->emission_rate(a.machine_id);
  out.delta_makespan_lb = lower_bound_makespan() - lb_before;
  out.done = done();
  return out;
}

std::vector<Action> legal_actions(const State& s) { return s.legal_actions(); }

std::pair<State, StepOutcome> step(const State& s, const Action& a) {
  State next = s;
  StepOutcome out = next.step(a);
  return {std::move(next), out};
}

namespace {

std::string job_color(int job) {
  // evenly spaced hues, fixed saturation/lightness
  const int hue = (job * 47) % 360;
  return "hsl(" + std::to_string(hue) + ",65%,60%)";
}

}  // namespace

std::string export_gantt(const State& s) {
  const Instance& inst = s.instance();
  const int m = inst.n_machines();
  const double row_h = 28.0, top = 30.0, left = 70.0, width = 900.0;
  const double span = std::max(s.makespan(), 1.0);
  const double scale = width / span;
  const double height = top + row_h * m + 40.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << (left + width + 30.0) << "\" height=\"" << height << "\">\n";
  // machine rows and labels
  for (int j = 0; j < m; ++j) {
    const double y = top + row_h * j;
    svg << "  <text x=\"8\" y=\"" << (y + row_h * 0.65) << "\" font-size=\"12\">M" << j
        << "</text>\n";
    svg << "  <line x1=\"" << left << "\" y1=\"" << (y + row_h) << "\" x2=\"" << (left + width)
        << "\" y2=\"" << (y + row_h) << "\" stroke=\"#ddd\"/>\n";
  }
  // time axis
  const double axis_y = top + row_h * m + 10.0;
  svg << "  <line x1=\"" << left << "\" y1=\"" << axis_y << "\" x2=\"" << (left + width)
      << "\" y2=\"" << axis_y << "\" stroke=\"#333\"/>\n";
  double tick = std::pow(10.0, std::floor(std::log10(span)));
  if (span / tick < 2.0) tick /= 5.0;
  else if (span / tick < 5.0) tick /= 2.0;
  for (double t = 0.0; t <= span + 1e-9; t += tick) {
    const double x = left + t * scale;
    svg << "  <line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x << "\" y2=\""
        << (axis_y + 5.0) << "\" stroke=\"#333\"/>\n";
    svg << "  <text x=\"" << x << "\" y=\"" << (axis_y + 18.0)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << format_double(t) << "</text>\n";
  }
  // one box per scheduled operation
  for (const auto& e : s.entries()) {
    const double x = left + e.start * scale;
    const double w = std::max((e.end - e.start) * scale, 1.0);
    const double y = top + row_h * e.machine_id + 3.0;
    svg << "  <rect class=\"op\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
        << "\" height=\"" << (row_h - 6.0) << "\" fill=\"" << job_color(e.job_id)
        << "\" stroke=\"#333\"/>\n";
    svg << "  <text x=\"" << (x + 2.0) << "\" y=\"" << (y + (row_h - 6.0) * 0.7)
        << "\" font-size=\"10\">J" << e.job_id << "." << e.op_index << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string schedule_csv(const State& s) {
  std::ostringstream out;
  out << "job,op,machine,start,end,emission\n";
  for (const auto& e : s.entries()) {
    const double p = s.instance().op(e.job_id, e.op_index).time_on(e.machine_id);
    out << e.job_id << ',' << e.op_index << ',' << e.machine_id << ',' << format_double(e.start)
        << ',' << format_double(e.end) << ','
        << format_double(p * s.instance().emission_rate(e.machine_id)) << '\n';
  }
  return out.str();
}

}  // namespace luca
