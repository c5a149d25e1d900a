#include "luca/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace luca {

NormConstants NormConstants::of(const Instance& inst) {
  NormConstants n;
  n.max_p = std::max(inst.max_proc_time(), 1e-12);
  n.max_e = std::max(inst.max_emission_rate(), 1e-12);
  n.horizon = std::max(inst.horizon(), 1e-12);
  n.total_ops = std::max(inst.total_ops(), 1);
  return n;
}

GraphSnapshot build_graph(const State& state) {
  const Instance& inst = state.instance();
  GraphSnapshot g;
  g.norms = NormConstants::of(inst);
  g.n_ops = inst.total_ops();
  g.n_machines = inst.n_machines();
  g.node_features.assign(g.n_ops + g.n_machines, Vector(GraphSnapshot::node_feature_dim, 0.0));
  g.adjacency.assign(g.n_ops + g.n_machines, {});
  g.op_status.assign(g.n_ops, OpStatus::blocked);

  for (int i = 0; i < inst.n_jobs(); ++i) {
    const int nxt = state.next_op(i);
    for (int k = 0; k < inst.ops_in_job(i); ++k) {
      const int node = inst.flat_op_id(i, k);
      const auto& op = inst.op(i, k);
      OpStatus status = k < nxt ? OpStatus::done : (k == nxt ? OpStatus::ready : OpStatus::blocked);
      g.op_status[node] = status;
      Vector& f = g.node_features[node];
      f[static_cast<int>(status)] = 1.0;
      f[3] = op.min_time() / g.norms.max_p;
      f[4] = op.mean_time() / g.norms.max_p;
      f[5] = static_cast<double>(inst.ops_in_job(i) - k) / g.norms.total_ops;
      f[6] = state.job_ready_at(i) / g.norms.horizon;
      // precedence edges along the job chain
      if (k + 1 < inst.ops_in_job(i)) {
        const int succ = inst.flat_op_id(i, k + 1);
        g.adjacency[node].push_back({succ, {0.0, 0.0}});
        g.adjacency[succ].push_back({node, {0.0, 0.0}});
      }
      // eligibility edges with normalized p and p*e weights
      for (const auto& [m, p] : op.alternatives) {
        const std::array<double, 2> ew{p / g.norms.max_p,
                                       p * inst.emission_rate(m) / (g.norms.max_p * g.norms.max_e)};
        g.adjacency[node].push_back({g.machine_node(m), ew});
        g.adjacency[g.machine_node(m)].push_back({node, ew});
      }
    }
  }
  // scheduled start/end features
  for (const auto& e : state.entries()) {
    Vector& f = g.node_features[inst.flat_op_id(e.job_id, e.op_index)];
    f[7] = e.start / g.norms.horizon;
    f[8] = e.end / g.norms.horizon;
  }
  // machine nodes
  for (int m = 0; m < g.n_machines; ++m) {
    Vector& f = g.node_features[g.machine_node(m)];
    f[9] = state.machine_free_at(m) / g.norms.horizon;
    f[10] = inst.emission_rate(m) / g.norms.max_e;
  }
  return g;
}

namespace {

GnnLayerParams zero_layer(int out_dim, int in_dim) {
  return {Matrix(out_dim, in_dim), Matrix(out_dim, in_dim),
          Matrix(out_dim, GraphSnapshot::edge_feature_dim), Vector(out_dim, 0.0)};
}

void init_layer(GnnLayerParams& layer, Rng& rng) {
  for (Matrix* m : {&layer.w_self, &layer.w_nbr, &layer.w_edge}) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m->cols));
    for (double& v : m->data) v = rng.uniform(-bound, bound);
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(layer.w_self.cols));
  for (double& v : layer.b) v = rng.uniform(-bound, bound);
}

// one round of mean-aggregation message passing followed by tanh
void gnn_layer_forward(const GraphSnapshot& g, const GnnLayerParams& params,
                       const std::vector<Vector>& in, std::vector<Vector>& pre,
                       std::vector<Vector>& post) {
  const int n = static_cast<int>(in.size());
  pre.assign(n, Vector(params.b.size(), 0.0));
  post.assign(n, Vector(params.b.size(), 0.0));
  for (int i = 0; i < n; ++i) {
    Vector acc = params.w_self.mul(in[i]);
    const auto& nbrs = g.adjacency[i];
    if (!nbrs.empty()) {
      Vector msg(params.b.size(), 0.0);
      for (const auto& nb : nbrs) {
        const Vector part = params.w_nbr.mul(in[nb.id]);
        for (std::size_t d = 0; d < msg.size(); ++d) msg[d] += part[d];
        const Vector epart = params.w_edge.mul(Vector(nb.edge.begin(), nb.edge.end()));
        for (std::size_t d = 0; d < msg.size(); ++d) msg[d] += epart[d];
      }
      const double inv = 1.0 / static_cast<double>(nbrs.size());
      for (std::size_t d = 0; d < msg.size(); ++d) acc[d] += msg[d] * inv;
    }
    for (std::size_t d = 0; d < acc.size(); ++d) {
      pre[i][d] = acc[d] + params.b[d];
      post[i][d] = std::tanh(pre[i][d]);
    }
  }
}

void gnn_layer_backward(const GraphSnapshot& g, const GnnLayerParams& params,
                        const std::vector<Vector>& in, const std::vector<Vector>& post,
                        const std::vector<Vector>& d_post, GnnLayerGrads& grads,
                        std::vector<Vector>& d_in) {
  const int n = static_cast<int>(in.size());
  d_in.assign(n, Vector(in[0].size(), 0.0));
  for (int i = 0; i < n; ++i) {
    Vector d_pre(post[i].size());
    for (std::size_t d = 0; d < d_pre.size(); ++d)
      d_pre[d] = d_post[i][d] * (1.0 - post[i][d] * post[i][d]);
    grads.dw_self.add_outer(d_pre, in[i]);
    for (std::size_t d = 0; d < d_pre.size(); ++d) grads.db[d] += d_pre[d];
    {
      const Vector back = params.w_self.tmul(d_pre);
      for (std::size_t d = 0; d < back.size(); ++d) d_in[i][d] += back[d];
    }
    const auto& nbrs = g.adjacency[i];
    if (nbrs.empty()) continue;
    const double inv = 1.0 / static_cast<double>(nbrs.size());
    Vector d_msg(d_pre.size());
    for (std::size_t d = 0; d < d_pre.size(); ++d) d_msg[d] = d_pre[d] * inv;
    const Vector back_nbr = params.w_nbr.tmul(d_msg);
    for (const auto& nb : nbrs) {
      grads.dw_nbr.add_outer(d_msg, in[nb.id]);
      grads.dw_edge.add_outer(d_msg, Vector(nb.edge.begin(), nb.edge.end()));
      for (std::size_t d = 0; d < back_nbr.size(); ++d) d_in[nb.id][d] += back_nbr[d];
    }
  }
}

}  // namespace

GnnParams GnnParams::zeros() {
  GnnParams p;
  p.l1 = zero_layer(kGnnDim, GraphSnapshot::node_feature_dim);
  p.l2 = zero_layer(kGnnDim, kGnnDim);
  return p;
}

GnnParams GnnParams::init(Rng& rng) {
  GnnParams p = zeros();
  init_layer(p.l1, rng);
  init_layer(p.l2, rng);
  return p;
}

GnnResult gnn_embed(const GraphSnapshot& g, const GnnParams& params, GnnTrace* trace) {
  GnnTrace local;
  GnnTrace& t = trace ? *trace : local;
  gnn_layer_forward(g, params.l1, g.node_features, t.pre1, t.post1);
  gnn_layer_forward(g, params.l2, t.post1, t.pre2, t.post2);

  GnnResult result;
  result.node_embeddings.assign(t.post2.begin(), t.post2.begin() + g.n_ops);
  result.z_gnn.assign(kGnnDim, 0.0);
  for (int i = 0; i < g.n_ops; ++i)
    for (int d = 0; d < kGnnDim; ++d) result.z_gnn[d] += t.post2[i][d];
  for (int d = 0; d < kGnnDim; ++d) result.z_gnn[d] /= static_cast<double>(g.n_ops);
  return result;
}

GnnGrads GnnGrads::zeros_like(const GnnParams& p) {
  GnnGrads g;
  g.l1 = {Matrix(p.l1.w_self.rows, p.l1.w_self.cols), Matrix(p.l1.w_nbr.rows, p.l1.w_nbr.cols),
          Matrix(p.l1.w_edge.rows, p.l1.w_edge.cols), Vector(p.l1.b.size(), 0.0)};
  g.l2 = {Matrix(p.l2.w_self.rows, p.l2.w_self.cols), Matrix(p.l2.w_nbr.rows, p.l2.w_nbr.cols),
          Matrix(p.l2.w_edge.rows, p.l2.w_edge.cols), Vector(p.l2.b.size(), 0.0)};
  return g;
}

void gnn_backward(const GraphSnapshot& g, const GnnParams& params, const GnnTrace& trace,
                  const std::vector<Vector>& d_node_embeddings, const Vector& d_z_gnn,
                  GnnGrads& grads) {
  const int n = static_cast<int>(g.node_features.size());
  std::vector<Vector> d_post2(n, Vector(kGnnDim, 0.0));
  const double inv_ops = 1.0 / static_cast<double>(g.n_ops);
  for (int i = 0; i < g.n_ops; ++i) {
    for (int d = 0; d < kGnnDim; ++d) d_post2[i][d] += d_z_gnn[d] * inv_ops;
    if (!d_node_embeddings.empty())
      for (int d = 0; d < kGnnDim; ++d) d_post2[i][d] += d_node_embeddings[i][d];
  }
  std::vector<Vector> d_post1;
  gnn_layer_backward(g, params.l2, trace.post1, trace.post2, d_post2, grads.l2, d_post1);
  std::vector<Vector> d_input;  // gradients w.r.t. raw features, unused
  gnn_layer_backward(g, params.l1, g.node_features, trace.post1, d_post1, grads.l1, d_input);
}

// ---- impact store ----

ImpactStore::ImpactStore(int n_ops, int refresh_period)
    : refresh_period_(refresh_period),
      logs_(n_ops),
      delta_ms_(n_ops, 0.0),
      delta_ce_(n_ops, 0.0),
      ms_flag_(n_ops, 0),
      ce_flag_(n_ops, 0) {}

void ImpactStore::set_percentile_thresholds(double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw ConfigError("quantile must be in (0,1)");
  percentile_mode_ = true;
  quantile_ = quantile;
}

void ImpactStore::set_fixed_thresholds(double tau_ms, double tau_ce) {
  percentile_mode_ = false;
  tau_ms_ = tau_ms;
  tau_ce_ = tau_ce;
}

void ImpactStore::record_impact(int flat_op, double d_ms, double d_ce, int iteration) {
  logs_.at(flat_op).push_back({iteration, d_ms, d_ce});
}

namespace {

// threshold leaving ceil(fraction * n) distinct values strictly above it
double top_fraction_threshold(std::vector<double> values, double fraction) {
  if (values.empty()) return std::numeric_limits<double>::infinity();
  std::sort(values.begin(), values.end(), std::greater<double>());
  const auto n = values.size();
  const auto flag_count =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  if (flag_count >= n) return -std::numeric_limits<double>::infinity();
  return values[flag_count];
}

}  // namespace

void ImpactStore::refresh_hints() {
  std::vector<double> ms_values, ce_values;
  std::vector<int> logged;
  for (int op = 0; op < n_ops(); ++op) {
    ms_flag_[op] = 0;
    ce_flag_[op] = 0;
    const auto& log = logs_[op];
    if (log.empty()) {
      delta_ms_[op] = 0.0;
      delta_ce_[op] = 0.0;
      continue;
    }
    double sum_ms = 0.0, sum_ce = 0.0;
    for (const auto& rec : log) {
      sum_ms += rec.d_ms;
      sum_ce += rec.d_ce;
    }
    delta_ms_[op] = sum_ms / static_cast<double>(log.size());
    delta_ce_[op] = sum_ce / static_cast<double>(log.size());
    logged.push_back(op);
    ms_values.push_back(delta_ms_[op]);
    ce_values.push_back(delta_ce_[op]);
  }
  double tau_ms = tau_ms_, tau_ce = tau_ce_;
  if (percentile_mode_) {
    tau_ms = top_fraction_threshold(ms_values, 1.0 - quantile_);
    tau_ce = top_fraction_threshold(ce_values, 1.0 - quantile_);
  }
  for (int op : logged) {
    ms_flag_[op] = delta_ms_[op] > tau_ms ? 1 : 0;
    ce_flag_[op] = delta_ce_[op] > tau_ce ? 1 : 0;
  }
  for (auto& log : logs_) log.clear();
}

// ---- state prompt ----

PromptRecord build_state_prompt(const State& state, const ImpactStore& store) {
  const Instance& inst = state.instance();
  PromptRecord rec;
  std::ostringstream doc;
  bool first = true;
  for (int i = 0; i < inst.n_jobs(); ++i) {
    const int nxt = state.next_op(i);
    const int ops_left = inst.ops_in_job(i) - nxt;
    for (int k = nxt; k < inst.ops_in_job(i); ++k) {
      const int flat = inst.flat_op_id(i, k);
      const auto& op = inst.op(i, k);
      std::ostringstream frag;
      frag << "{Job " << i << ", Op " << k << ", " << ops_left << " ops left; est_start="
           << format_fixed1(state.est_ready(i, k)) << ", dur=" << format_fixed1(op.mean_time())
           << "; machines=";
      bool first_m = true;
      for (const auto& [m, p] : op.alternatives) {
        if (!first_m) frag << '|';
        first_m = false;
        frag << m << ':' << format_fixed1(p);
      }
      if (store.n_ops() > 0 && store.makespan_flag(flat)) frag << "; Hint: High Makespan Impact";
      if (store.n_ops() > 0 && store.emission_flag(flat)) frag << "; Hint: High Emission Impact";
      frag << '}';
      rec.flat_ids.push_back(flat);
      rec.fragments.push_back(frag.str());
      if (!first) doc << ", ";
      first = false;
      doc << rec.fragments.back();
    }
  }
  rec.document = doc.str();
  return rec;
}

namespace {

void expect_literal(const std::string& s, std::size_t& pos, const std::string& lit) {
  if (s.compare(pos, lit.size(), lit) != 0)
    throw ParseError("prompt fragment: expected '" + lit + "' at position " + std::to_string(pos));
  pos += lit.size();
}

double read_number(const std::string& s, std::size_t& pos) {
  std::size_t used = 0;
  const double v = std::stod(s.substr(pos), &used);
  pos += used;
  return v;
}

int read_int(const std::string& s, std::size_t& pos) {
  std::size_t used = 0;
  const int v = std::stoi(s.substr(pos), &used);
  pos += used;
  return v;
}

}  // namespace

ParsedFragment parse_prompt_fragment(const std::string& fragment) {
  ParsedFragment out;
  std::size_t pos = 0;
  expect_literal(fragment, pos, "{Job ");
  out.job = read_int(fragment, pos);
  expect_literal(fragment, pos, ", Op ");
  out.op = read_int(fragment, pos);
  expect_literal(fragment, pos, ", ");
  out.ops_left = read_int(fragment, pos);
  expect_literal(fragment, pos, " ops left; est_start=");
  out.est_start = read_number(fragment, pos);
  expect_literal(fragment, pos, ", dur=");
  out.dur = read_number(fragment, pos);
  expect_literal(fragment, pos, "; machines=");
  while (true) {
    const int m = read_int(fragment, pos);
    expect_literal(fragment, pos, ":");
    const double p = read_number(fragment, pos);
    out.machines.emplace_back(m, p);
    if (pos < fragment.size() && fragment[pos] == '|') {
      ++pos;
      continue;
    }
    break;
  }
  if (fragment.compare(pos, 28, "; Hint: High Makespan Impact") == 0) {
    out.hint_makespan = true;
    pos += 28;
  }
  if (fragment.compare(pos, 28, "; Hint: High Emission Impact") == 0) {
    out.hint_emission = true;
    pos += 28;
  }
  expect_literal(fragment, pos, "}");
  if (pos != fragment.size()) throw ParseError("prompt fragment: trailing characters");
  return out;
}

// ---- gated fusion ----

FusionParams FusionParams::zeros() {
  FusionParams p;
  p.w_proj = Matrix(kGnnDim, kLlmDim);
  p.b_proj.assign(kGnnDim, 0.0);
  p.w_gate = Matrix(1, 2 * kGnnDim);
  p.b_gate.assign(1, 0.0);
  return p;
}

FusionParams FusionParams::init(Rng& rng) {
  FusionParams p = zeros();
  const double bp = 1.0 / std::sqrt(static_cast<double>(kLlmDim));
  for (double& v : p.w_proj.data) v = rng.uniform(-bp, bp);
  for (double& v : p.b_proj) v = rng.uniform(-bp, bp);
  const double bg = 1.0 / std::sqrt(static_cast<double>(2 * kGnnDim));
  for (double& v : p.w_gate.data) v = rng.uniform(-bg, bg);
  for (double& v : p.b_gate) v = rng.uniform(-bg, bg);
  return p;
}

FuseTrace fuse(const Vector& z_llm, const Vector& z_gnn, const FusionParams& params) {
  if (static_cast<int>(z_llm.size()) != kLlmDim || static_cast<int>(z_gnn.size()) != kGnnDim)
    throw std::invalid_argument("fuse: embedding dimension mismatch");
  FuseTrace t;
  t.z_llm = z_llm;
  t.z_gnn = z_gnn;
  t.proj = params.w_proj.mul(z_llm);
  for (int d = 0; d < kGnnDim; ++d) t.proj[d] += params.b_proj[d];
  double u = params.b_gate[0];
  for (int d = 0; d < kGnnDim; ++d) u += params.w_gate.at(0, d) * t.proj[d];
  for (int d = 0; d < kGnnDim; ++d) u += params.w_gate.at(0, kGnnDim + d) * z_gnn[d];
  t.u = u;
  t.gate = 1.0 / (1.0 + std::exp(-u));
  t.h.assign(kGnnDim, 0.0);
  for (int d = 0; d < kGnnDim; ++d) t.h[d] = t.gate * t.proj[d] + (1.0 - t.gate) * z_gnn[d];
  return t;
}

FusionGrads FusionGrads::zeros_like(const FusionParams& p) {
  FusionGrads g;
  g.dw_proj = Matrix(p.w_proj.rows, p.w_proj.cols);
  g.db_proj.assign(p.b_proj.size(), 0.0);
  g.dw_gate = Matrix(p.w_gate.rows, p.w_gate.cols);
  g.db_gate.assign(p.b_gate.size(), 0.0);
  return g;
}

void fuse_backward(const FusionParams& params, const FuseTrace& t, const Vector& dh,
                   FusionGrads& grads, Vector* d_z_llm, Vector* d_z_gnn) {
  // h_d = g * proj_d + (1-g) * z_d
  double dg = 0.0;
  Vector d_proj(kGnnDim, 0.0);
  Vector d_z(kGnnDim, 0.0);
  for (int d = 0; d < kGnnDim; ++d) {
    dg += dh[d] * (t.proj[d] - t.z_gnn[d]);
    d_proj[d] = dh[d] * t.gate;
    d_z[d] = dh[d] * (1.0 - t.gate);
  }
  const double du = dg * t.gate * (1.0 - t.gate);
  for (int d = 0; d < kGnnDim; ++d) {
    grads.dw_gate.at(0, d) += du * t.proj[d];
    grads.dw_gate.at(0, kGnnDim + d) += du * t.z_gnn[d];
    d_proj[d] += du * params.w_gate.at(0, d);
    d_z[d] += du * params.w_gate.at(0, kGnnDim + d);
  }
  grads.db_gate[0] += du;
  grads.dw_proj.add_outer(d_proj, t.z_llm);
  for (int d = 0; d < kGnnDim; ++d) grads.db_proj[d] += d_proj[d];
  if (d_z_llm) {
    const Vector back = params.w_proj.tmul(d_proj);
    for (int d = 0; d < kLlmDim; ++d) (*d_z_llm)[d] += back[d];
  }
  if (d_z_gnn)
    for (int d = 0; d < kGnnDim; ++d) (*d_z_gnn)[d] += d_z[d];
}

}  // namespace luca
