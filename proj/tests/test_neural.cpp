#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "luca/neural.hpp"
#include "support/fd.hpp"

using namespace luca;

namespace {

DenseNet random_net(std::uint64_t seed, const std::vector<int>& dims,
                    const std::vector<Activation>& acts) {
  DenseNet net = make_dense(dims, acts);
  Rng rng(seed);
  init_uniform(net, rng);
  return net;
}

Vector flatten_net(const DenseNet& net) {
  Vector flat;
  for (const auto& layer : net.layers) {
    flat.insert(flat.end(), layer.w.data.begin(), layer.w.data.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

void unflatten_net(DenseNet& net, const Vector& flat) {
  std::size_t pos = 0;
  for (auto& layer : net.layers) {
    std::copy(flat.begin() + pos, flat.begin() + pos + layer.w.data.size(),
              layer.w.data.begin());
    pos += layer.w.data.size();
    std::copy(flat.begin() + pos, flat.begin() + pos + layer.b.size(), layer.b.begin());
    pos += layer.b.size();
  }
}

}  // namespace

TEST_CASE("forward: identity net reproduces input") {
  DenseNet net = make_dense({3, 3}, {Activation::identity});
  for (int i = 0; i < 3; ++i) net.layers[0].w.at(i, i) = 1.0;
  const Vector y = forward(net, {1.0, -2.0, 3.0});
  CHECK(y == Vector{1.0, -2.0, 3.0});
}

TEST_CASE("forward: zero tanh net gives zeros, zero sigmoid gives 0.5") {
  const DenseNet tanh_net = make_dense({4, 2}, {Activation::tanh_fn});
  for (double y : forward(tanh_net, {1, 2, 3, 4})) CHECK(y == 0.0);
  const DenseNet sig_net = make_dense({4, 1}, {Activation::sigmoid});
  CHECK(forward(sig_net, {1, 2, 3, 4})[0] == 0.5);
}

TEST_CASE("forward rejects dimension mismatch") {
  const DenseNet net = make_dense({3, 2}, {Activation::identity});
  CHECK_THROWS_AS(forward(net, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("backward: single linear layer gradient is the outer product") {
  DenseNet net = make_dense({3, 2}, {Activation::identity});
  net.layers[0].w.at(0, 0) = 1.0;
  const Vector x{1.0, 2.0, 3.0};
  const Vector upstream{2.0, -1.0};
  DenseGrads grads = zero_grads_like(net);
  const Vector dx = backward(net, x, upstream, grads);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(grads.dw[0].at(r, c) == upstream[r] * x[c]);
  CHECK(grads.db[0] == upstream);
  CHECK(dx == Vector{2.0, 0.0, 0.0});  // w^T upstream with only w(0,0)=1
}

TEST_CASE("backward: zero upstream yields zero gradients") {
  DenseNet net = random_net(3, {4, 5, 2}, {Activation::tanh_fn, Activation::identity});
  DenseGrads grads = zero_grads_like(net);
  backward(net, {0.1, 0.2, 0.3, 0.4}, {0.0, 0.0}, grads);
  for (const auto& m : grads.dw)
    for (double v : m.data) CHECK(v == 0.0);
}

TEST_CASE("backward matches central finite differences on random nets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseNet net = random_net(seed, {5, 8, 4, 1},
                              {Activation::tanh_fn,
                               seed % 2 ? Activation::relu : Activation::sigmoid,
                               Activation::identity});
    Rng rng(seed + 100);
    Vector x(5);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);

    DenseGrads grads = zero_grads_like(net);
    backward(net, x, {1.0}, grads);
    Vector analytic;
    for (std::size_t l = 0; l < grads.dw.size(); ++l) {
      analytic.insert(analytic.end(), grads.dw[l].data.begin(), grads.dw[l].data.end());
      analytic.insert(analytic.end(), grads.db[l].begin(), grads.db[l].end());
    }

    auto loss = [&](const Vector& flat) {
      DenseNet probe = net;
      unflatten_net(probe, flat);
      return forward(probe, x)[0];
    };
    const auto report = testing::check_gradient(flatten_net(net), loss, analytic, 1e-5);
    CAPTURE(seed);
    CAPTURE(report.worst_err);
    CHECK(report.pass);
  }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Vector params{1.0, -2.0, 3.0};
  const Vector before = params;
  OptState opt;
  adam_step(params, {0.0, 0.0, 0.0}, opt);
  CHECK(params == before);
}

TEST_CASE("adam: first step moves by ~lr against the gradient sign") {
  Vector params{0.0, 0.0};
  OptState opt;
  opt.lr = 1e-3;
  adam_step(params, {2.5, -0.3}, opt);
  CHECK(params[0] == doctest::Approx(-1e-3).epsilon(1e-4));
  CHECK(params[1] == doctest::Approx(1e-3).epsilon(1e-4));
}

TEST_CASE("adam: deterministic across identical runs") {
  Vector p1{0.5, 0.5}, p2{0.5, 0.5};
  OptState o1, o2;
  for (int i = 0; i < 10; ++i) {
    const Vector g{0.1 * i, -0.2};
    adam_step(p1, g, o1);
    adam_step(p2, g, o2);
  }
  CHECK(p1 == p2);
}

TEST_CASE("softmax: uniform over unmasked, exact zeros on masked") {
  const Vector probs = softmax({1.0, 1.0, 1.0, 1.0}, {1, 0, 1, 0});
  CHECK(probs[0] == 0.5);
  CHECK(probs[1] == 0.0);
  CHECK(probs[2] == 0.5);
  CHECK(probs[3] == 0.0);
}

TEST_CASE("softmax: stability and shift invariance") {
  const Vector big = softmax({1000.0, 0.0});
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] == doctest::Approx(0.0));

  const Vector a = softmax({0.3, -1.2, 2.0});
  const Vector b = softmax({0.3 + 17.0, -1.2 + 17.0, 2.0 + 17.0});
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::fabs(a[i] - b[i]) < 1e-12);
    sum += a[i];
  }
  CHECK(std::fabs(sum - 1.0) < 1e-12);
}

TEST_CASE("softmax: all-masked input throws") {
  CHECK_THROWS_AS(softmax({1.0, 2.0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("checkpoint: bit-identical round trip") {
  Rng rng(5);
  std::vector<NamedArray> arrays;
  Matrix a(3, 4);
  for (double& v : a.data) v = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform_int(-8, 8));
  arrays.push_back({"layer.w", a});
  Matrix b(1, 1);
  b.at(0, 0) = 0.1 + 0.2;  // not exactly 0.3
  arrays.push_back({"meta.x", b});

  const std::string text = save_checkpoint(arrays);
  CHECK(text.rfind("luca-ckpt v1\n", 0) == 0);
  const auto parsed = parse_checkpoint(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].name == "layer.w");
  CHECK(parsed[0].value == a);
  CHECK(parsed[1].value.at(0, 0) == b.at(0, 0));

  // second trip is byte-identical
  CHECK(save_checkpoint(parsed) == text);
}

TEST_CASE("checkpoint: malformed input rejected") {
  CHECK_THROWS_AS(parse_checkpoint("not-a-checkpoint\n"), ParseError);
  CHECK_THROWS_AS(parse_checkpoint("luca-ckpt v1\nw 2 2\n1 2 3\n"), ParseError);
}
