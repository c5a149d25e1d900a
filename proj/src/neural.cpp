#include "luca/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace luca {

Vector Matrix::mul(const Vector& x) const {
  if (static_cast<int>(x.size()) != cols)
    throw std::invalid_argument("matrix-vector dimension mismatch: " + std::to_string(cols) +
                                " vs " + std::to_string(x.size()));
  Vector y(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* row = data.data() + static_cast<std::size_t>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

Vector Matrix::tmul(const Vector& x) const {
  if (static_cast<int>(x.size()) != rows)
    throw std::invalid_argument("matrix^T-vector dimension mismatch");
  Vector y(cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* row = data.data() + static_cast<std::size_t>(r) * cols;
    const double xr = x[r];
    for (int c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
  return y;
}

void Matrix::add_outer(const Vector& u, const Vector& v, double scale) {
  for (int r = 0; r < rows; ++r) {
    double* row = data.data() + static_cast<std::size_t>(r) * cols;
    const double ur = u[r] * scale;
    for (int c = 0; c < cols; ++c) row[c] += ur * v[c];
  }
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh_fn;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ConfigError("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh_fn: return "tanh";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

namespace {

double apply_act(Activation a, double x) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::tanh_fn: return std::tanh(x);
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

// derivative expressed through pre-activation x and post-activation y
double act_grad(Activation a, double x, double y) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::tanh_fn: return 1.0 - y * y;
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

}  // namespace

DenseNet make_dense(const std::vector<int>& dims, const std::vector<Activation>& acts) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw ConfigError("dense net needs n+1 dims for n layers");
  DenseNet net;
  net.layers.resize(acts.size());
  for (std::size_t l = 0; l < acts.size(); ++l) {
    net.layers[l].w = Matrix(dims[l + 1], dims[l]);
    net.layers[l].b.assign(dims[l + 1], 0.0);
    net.layers[l].act = acts[l];
  }
  return net;
}

void init_uniform(DenseNet& net, Rng& rng) {
  for (auto& layer : net.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.w.cols));
    for (double& w : layer.w.data) w = rng.uniform(-bound, bound);
    for (double& b : layer.b) b = rng.uniform(-bound, bound);
  }
}

Vector forward(const DenseNet& net, const Vector& x) {
  Vector cur = x;
  for (const auto& layer : net.layers) {
    Vector pre = layer.w.mul(cur);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] = apply_act(layer.act, pre[i] + layer.b[i]);
    cur = std::move(pre);
  }
  return cur;
}

ForwardTrace forward_trace(const DenseNet& net, const Vector& x) {
  ForwardTrace trace;
  trace.input = x;
  trace.pre.reserve(net.layers.size());
  trace.post.reserve(net.layers.size());
  const Vector* cur = &trace.input;
  for (const auto& layer : net.layers) {
    Vector pre = layer.w.mul(*cur);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += layer.b[i];
    Vector post(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) post[i] = apply_act(layer.act, pre[i]);
    trace.pre.push_back(std::move(pre));
    trace.post.push_back(std::move(post));
    cur = &trace.post.back();
  }
  return trace;
}

DenseGrads zero_grads_like(const DenseNet& net) {
  DenseGrads g;
  g.dw.reserve(net.layers.size());
  g.db.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    g.dw.emplace_back(layer.w.rows, layer.w.cols);
    g.db.emplace_back(layer.b.size(), 0.0);
  }
  return g;
}

Vector backward(const DenseNet& net, const ForwardTrace& trace, const Vector& upstream,
                DenseGrads& grads) {
  if (upstream.size() != trace.post.back().size())
    throw std::invalid_argument("upstream gradient dimension mismatch");
  Vector delta = upstream;
  for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
    const auto& layer = net.layers[l];
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] *= act_grad(layer.act, trace.pre[l][i], trace.post[l][i]);
    const Vector& below = (l == 0) ? trace.input : trace.post[l - 1];
    grads.dw[l].add_outer(delta, below);
    for (std::size_t i = 0; i < delta.size(); ++i) grads.db[l][i] += delta[i];
    delta = layer.w.tmul(delta);
  }
  return delta;
}

Vector backward(const DenseNet& net, const Vector& x, const Vector& upstream, DenseGrads& grads) {
  return backward(net, forward_trace(net, x), upstream, grads);
}

void adam_step(Vector& params, const Vector& grads, OptState& opt) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: shape mismatch");
  if (opt.m.size() != params.size()) {
    opt.m.assign(params.size(), 0.0);
    opt.v.assign(params.size(), 0.0);
  }
  opt.step_count += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * grads[i];
    opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
    const double mhat = opt.m[i] / bc1;
    const double vhat = opt.v[i] / bc2;
    params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
}

Vector softmax(const Vector& logits, const std::vector<std::uint8_t>& mask) {
  if (logits.size() != mask.size()) throw std::invalid_argument("softmax: mask size mismatch");
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i)
    if (mask[i] && logits[i] > max_logit) max_logit = logits[i];
  if (max_logit == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("softmax: all entries masked");
  Vector probs(logits.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!mask[i]) continue;
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i)
    if (mask[i]) probs[i] /= sum;
  return probs;
}

Vector softmax(const Vector& logits) {
  return softmax(logits, std::vector<std::uint8_t>(logits.size(), 1));
}

std::string save_checkpoint(const std::vector<NamedArray>& arrays) {
  std::ostringstream out;
  out << "luca-ckpt v1\n";
  for (const auto& arr : arrays) {
    out << arr.name << ' ' << arr.value.rows << ' ' << arr.value.cols << '\n';
    for (int r = 0; r < arr.value.rows; ++r) {
      for (int c = 0; c < arr.value.cols; ++c) {
        if (c) out << ' ';
        out << format_double(arr.value.at(r, c));
      }
      out << '\n';
    }
  }
  return out.str();
}

std::vector<NamedArray> parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (header != "luca-ckpt v1") throw ParseError("bad checkpoint header: '" + header + "'");
  std::vector<NamedArray> arrays;
  std::string name;
  while (in >> name) {
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
      throw ParseError("bad shape for array '" + name + "'");
    NamedArray arr{name, Matrix(rows, cols)};
    for (double& v : arr.value.data)
      if (!(in >> v)) throw ParseError("truncated values for array '" + name + "'");
    arrays.push_back(std::move(arr));
  }
  return arrays;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace luca
