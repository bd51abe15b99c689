#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aicc/checkpoint.hpp"
#include "aicc/errors.hpp"
#include "aicc/neuralnet.hpp"
#include "aicc/random.hpp"

using aicc::Activation;
using aicc::Mlp;
using aicc::NetworkArch;
using aicc::Vector;
using doctest::Approx;

namespace {

// Straightforward second evaluation straight from the weight/bias accessors.
Vector reference_forward(const Mlp& net, Vector x) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto w = net.weights(l);
    const auto b = net.biases(l);
    Vector z(net.layer_out(l));
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = b[i];
      for (std::size_t j = 0; j < x.size(); ++j) z[i] += w[i * x.size() + j] * x[j];
      if (l + 1 < net.layer_count()) {
        switch (net.arch().hidden_activation) {
          case Activation::relu: z[i] = std::max(0.0, z[i]); break;
          case Activation::tanh: z[i] = std::tanh(z[i]); break;
          case Activation::linear: break;
        }
      }
    }
    x = std::move(z);
  }
  return x;
}

Vector random_vector(aicc::Rng& rng, std::size_t n) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Random non-zero biases so relu kinks are not all at the origin.
void jitter_biases(Mlp& net, aicc::Rng& rng) {
  for (std::size_t l = 0; l < net.layer_count(); ++l)
    for (double& b : net.mutable_biases(l)) b = rng.uniform(-0.5, 0.5);
}

bool away_from_kinks(const Mlp& net, const Vector& input, double margin) {
  aicc::MlpTape tape;
  net.forward(input, tape);
  for (std::size_t l = 0; l + 1 < tape.preacts.size(); ++l)
    for (double z : tape.preacts[l])
      if (std::abs(z) < margin) return false;
  return true;
}

const aicc::OutputLoss half_square = [](std::span<const double> y, Vector* grad) {
  double s = 0.0;
  if (grad) grad->assign(y.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += 0.5 * (y[i] - 0.3) * (y[i] - 0.3);
    if (grad) (*grad)[i] = y[i] - 0.3;
  }
  return s;
};

}  // namespace

TEST_CASE("architecture bookkeeping") {
  const NetworkArch arch{4, {5, 3}, 2};
  CHECK(arch.layer_widths() == std::vector<std::size_t>{4, 5, 3, 2});
  CHECK(arch.parameter_count() == 4 * 5 + 5 + 5 * 3 + 3 + 3 * 2 + 2);
  CHECK(Mlp(arch).params().size() == arch.parameter_count());
  CHECK_THROWS_AS((NetworkArch{0, {3}, 1}.validate()), aicc::DimensionError);
  CHECK_THROWS_AS((NetworkArch{2, {3, 0}, 1}.validate()), aicc::DimensionError);
  CHECK(aicc::parse_activation("tanh") == Activation::tanh);
  CHECK(aicc::to_string(Activation::relu) == "relu");
  CHECK_THROWS_AS(aicc::parse_activation("gelu"), aicc::FormatError);
}

TEST_CASE("forward examples") {
  const Mlp zero(NetworkArch{3, {4, 4}, 2});
  CHECK(zero.forward(Vector{1, -2, 3}) == Vector{0, 0});

  Mlp ident(NetworkArch{3, {}, 3});
  auto w = ident.mutable_weights(0);
  for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  CHECK(ident.forward(Vector{1.5, -2, 7}) == Vector{1.5, -2, 7});

  CHECK_THROWS_AS(zero.forward(Vector{1, 2}), aicc::DimensionError);
}

TEST_CASE("forward matches independent evaluation") {
  for (Activation act : {Activation::relu, Activation::tanh, Activation::linear}) {
    aicc::Rng rng(7);
    Mlp net(NetworkArch{6, {8, 5}, 3, act}, rng);
    jitter_biases(net, rng);
    for (int i = 0; i < 10; ++i) {
      const Vector x = random_vector(rng, 6);
      const Vector got = net.forward(x);
      const Vector want = reference_forward(net, x);
      for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == Approx(want[j]).epsilon(1e-14));
      CHECK(net.forward(x) == got);
    }
  }
}

TEST_CASE("seeded initialization is deterministic") {
  aicc::Rng a(99), b(99);
  const Mlp na(NetworkArch{5, {7}, 2}, a);
  const Mlp nb(NetworkArch{5, {7}, 2}, b);
  CHECK(std::equal(na.params().begin(), na.params().end(), nb.params().begin()));
  // He-uniform bound for the relu layer.
  const double limit = std::sqrt(6.0 / 5.0);
  for (double w : na.weights(0)) CHECK(std::abs(w) <= limit);
  for (double bias : na.biases(0)) CHECK(bias == 0.0);
}

TEST_CASE("backward on a one-neuron linear net") {
  Mlp net(NetworkArch{1, {}, 1});
  net.mutable_weights(0)[0] = 0.7;
  net.mutable_biases(0)[0] = -0.1;
  aicc::MlpTape tape;
  net.forward(Vector{2.0}, tape);
  const aicc::MlpGradients g = net.backward(tape, Vector{1.0});
  CHECK(g.params[0] == Approx(2.0));
  CHECK(g.params[1] == Approx(1.0));
  CHECK(g.input[0] == Approx(0.7));
}

TEST_CASE("relu blocks gradient at negative pre-activation") {
  Mlp net(NetworkArch{1, {1}, 1});
  net.mutable_weights(0)[0] = 1.0;
  net.mutable_biases(0)[0] = -5.0;
  net.mutable_weights(1)[0] = 3.0;
  aicc::MlpTape tape;
  net.forward(Vector{1.0}, tape);
  const aicc::MlpGradients g = net.backward(tape, Vector{1.0});
  CHECK(g.params[0] == 0.0);  // first-layer weight
  CHECK(g.params[1] == 0.0);  // first-layer bias
  CHECK(g.input[0] == 0.0);
}

TEST_CASE("stale tapes are rejected") {
  aicc::Rng rng(1);
  Mlp net(NetworkArch{2, {3}, 1}, rng);
  aicc::MlpTape tape;
  net.forward(Vector{0.1, 0.2}, tape);
  net.mutable_params()[0] += 0.1;
  CHECK_THROWS_AS(net.backward(tape, Vector{1.0}), aicc::DimensionError);

  const Mlp other(NetworkArch{2, {3}, 1}, rng);
  net.forward(Vector{0.1, 0.2}, tape);
  CHECK_THROWS_AS(other.backward(tape, Vector{1.0}), aicc::DimensionError);
  CHECK_THROWS_AS(net.backward(tape, Vector{1.0, 2.0}), aicc::DimensionError);
}

TEST_CASE("gradient check: linear net with quadratic loss") {
  aicc::Rng rng(3);
  Mlp net(NetworkArch{4, {}, 3}, rng);
  jitter_biases(net, rng);
  const Vector x = random_vector(rng, 4);
  CHECK(aicc::finite_difference_check(net, x, half_square) < 1e-7);
}

TEST_CASE("gradient check: tanh nets") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    aicc::Rng rng(seed);
    Mlp net(NetworkArch{5, {6, 4}, 2, Activation::tanh}, rng);
    jitter_biases(net, rng);
    const Vector x = random_vector(rng, 5);
    CHECK(aicc::finite_difference_check(net, x, half_square) < 1e-6);
  }
}

TEST_CASE("gradient check: relu nets away from kinks") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 20; ++seed) {
    aicc::Rng rng(1000 + seed);
    Mlp net(NetworkArch{5, {8, 8}, 3}, rng);
    jitter_biases(net, rng);
    const Vector x = random_vector(rng, 5);
    if (!away_from_kinks(net, x, 1e-3)) continue;
    ++checked;
    CHECK(aicc::finite_difference_check(net, x, half_square) < 1e-4);
  }
}

TEST_CASE("finite_difference_check restores parameters and samples coordinates") {
  aicc::Rng rng(4);
  Mlp net(NetworkArch{3, {4}, 2, Activation::tanh}, rng);
  const std::vector<double> before(net.params().begin(), net.params().end());
  aicc::GradientCheckOptions opts;
  opts.max_coords = 5;
  CHECK(aicc::finite_difference_check(net, Vector{0.1, 0.2, 0.3}, half_square, opts) < 1e-6);
  CHECK(std::equal(before.begin(), before.end(), net.params().begin()));

  // A deliberately wrong gradient is caught.
  std::vector<double> params{1.0, 2.0};
  const std::vector<double> wrong{2.0, 4.5};
  const double err = aicc::finite_difference_check(
      params, wrong, [&] { return params[0] * params[0] + params[1] * params[1]; });
  CHECK(err > 0.1);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  aicc::Adam adam({}, {2});
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.0, 0.0};
  std::vector<std::span<double>> ps{p};
  std::vector<std::span<const double>> gs{g};
  adam.step(ps, gs);
  CHECK(p == std::vector<double>{1.0, -2.0});
  CHECK(adam.steps_taken() == 1);
}

TEST_CASE("adam: first step moves by about base_lr against the gradient") {
  for (double grad : {0.02, -3.0, 500.0}) {
    aicc::Adam adam({}, {1});
    std::vector<double> p{0.5};
    const std::vector<double> g{grad};
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    adam.step(ps, gs);
    const double moved = p[0] - 0.5;
    CHECK(moved * grad < 0.0);
    CHECK(std::abs(moved) == Approx(1e-3).epsilon(1e-3));
  }
}

TEST_CASE("adam: converges on a 1-D quadratic") {
  aicc::AdamOptions opts;
  opts.base_lr = 0.05;
  aicc::Adam adam(opts, {1});
  std::vector<double> p{4.0};
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> g{2.0 * (p[0] - 1.5)};
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    adam.step(ps, gs);
  }
  CHECK(std::abs(p[0] - 1.5) < 1e-3);
}

TEST_CASE("adam: learning rate schedule") {
  aicc::AdamOptions opts;
  opts.decay_steps = 10.0;
  aicc::Adam adam(opts, {1});
  CHECK(adam.learning_rate() == Approx(1e-3));
  std::vector<double> p{0.0};
  const std::vector<double> g{1.0};
  for (int i = 0; i < 10; ++i) {
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    adam.step(ps, gs);
  }
  CHECK(adam.learning_rate() == Approx(1e-3 * 0.96));

  // No decay reduces to constant-lr Adam.
  aicc::AdamOptions flat;
  flat.decay_steps = 0.0;
  aicc::Adam constant(flat, {1});
  for (int i = 0; i < 50; ++i) {
    std::vector<std::span<double>> ps{p};
    std::vector<std::span<const double>> gs{g};
    constant.step(ps, gs);
  }
  CHECK(constant.learning_rate() == 1e-3);
}

TEST_CASE("adam: non-finite gradient aborts without touching parameters") {
  aicc::Adam adam({}, {2, 1});
  std::vector<double> a{1.0, 2.0}, b{3.0};
  const std::vector<double> ga{0.5, 0.5}, gb{std::nan("")};
  std::vector<std::span<double>> ps{a, b};
  std::vector<std::span<const double>> gs{ga, gb};
  CHECK_THROWS_AS(adam.step(ps, gs), aicc::NumericalError);
  CHECK(a == std::vector<double>{1.0, 2.0});
  CHECK(b == std::vector<double>{3.0});
  CHECK(adam.steps_taken() == 0);

  std::vector<std::span<double>> short_ps{a};
  CHECK_THROWS_AS(adam.step(short_ps, gs), aicc::DimensionError);
}

TEST_CASE("mlp archive round trip") {
  aicc::Rng rng(12);
  const Mlp net(NetworkArch{3, {4, 2}, 2, Activation::tanh}, rng);
  aicc::ParamArchive archive;
  net.save(archive, "net");
  std::stringstream buf;
  archive.write(buf);
  const Mlp back = Mlp::load(aicc::ParamArchive::read(buf), "net");
  CHECK(back.arch() == net.arch());
  CHECK(std::equal(net.params().begin(), net.params().end(), back.params().begin()));
  CHECK(archive.tensor("net.layer0.weight").shape == std::vector<std::size_t>{4, 3});
  CHECK_THROWS_AS(Mlp::load(archive, "missing"), aicc::FormatError);
}
