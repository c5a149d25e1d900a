#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "luca/common.hpp"

namespace luca {

using Vector = std::vector<double>;

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  // y = W x
  Vector mul(const Vector& x) const;
  // y = W^T x
  Vector tmul(const Vector& x) const;
  // W += scale * outer(u, v)
  void add_outer(const Vector& u, const Vector& v, double scale = 1.0);

  bool operator==(const Matrix&) const = default;
};

enum class Activation { identity, tanh_fn, relu, sigmoid };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

struct DenseLayer {
  Matrix w;
  Vector b;
  Activation act = Activation::identity;
};

struct DenseNet {
  std::vector<DenseLayer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().w.cols; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().w.rows; }
};

// dims = {in, h1, ..., out}; acts, one per layer
DenseNet make_dense(const std::vector<int>& dims, const std::vector<Activation>& acts);
// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))
void init_uniform(DenseNet& net, Rng& rng);

Vector forward(const DenseNet& net, const Vector& x);

struct ForwardTrace {
  Vector input;
  std::vector<Vector> pre;   // per layer, pre-activation
  std::vector<Vector> post;  // per layer, post-activation
  const Vector& output() const { return post.back(); }
};

ForwardTrace forward_trace(const DenseNet& net, const Vector& x);

struct DenseGrads {
  std::vector<Matrix> dw;
  std::vector<Vector> db;
};

DenseGrads zero_grads_like(const DenseNet& net);

// accumulates parameter gradients into `grads`, returns d(loss)/d(input)
Vector backward(const DenseNet& net, const ForwardTrace& trace, const Vector& upstream,
                DenseGrads& grads);
Vector backward(const DenseNet& net, const Vector& x, const Vector& upstream, DenseGrads& grads);

// Bias-corrected adaptive-moment update over a flat parameter vector.
struct OptState {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  Vector m;
  Vector v;
};

void adam_step(Vector& params, const Vector& grads, OptState& opt);

// Masked, shift-stable softmax. Masked entries are exactly 0.
Vector softmax(const Vector& logits, const std::vector<std::uint8_t>& mask);
Vector softmax(const Vector& logits);

// ---- checkpoint container: versioned named-array text format ----

struct NamedArray {
  std::string name;
  Matrix value;
};

std::string save_checkpoint(const std::vector<NamedArray>& arrays);
std::vector<NamedArray> parse_checkpoint(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace luca
