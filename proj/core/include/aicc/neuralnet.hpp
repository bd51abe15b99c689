#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aicc/linalg.hpp"
#include "aicc/random.hpp"

namespace aicc {

class ParamArchive;

enum class Activation { relu, tanh, linear };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected network shape. The output layer is always linear.
struct NetworkArch {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_layers{100, 100};
  std::size_t output_dim = 0;
  Activation hidden_activation = Activation::relu;

  void validate() const;
  /// input_dim, hidden..., output_dim
  std::vector<std::size_t> layer_widths() const;
  std::size_t parameter_count() const;

  friend bool operator==(const NetworkArch&, const NetworkArch&) = default;
};

/// Activations recorded by a forward pass, consumed by Mlp::backward.
struct MlpTape {
  std::uint64_t stamp = 0;
  std::vector<Vector> inputs;   ///< input to each layer (inputs[0] is the network input)
  std::vector<Vector> preacts;  ///< pre-activation of each layer
};

struct MlpGradients {
  std::vector<double> params;  ///< same layout as Mlp::params()
  Vector input;
};

/// Multilayer perceptron with a flat parameter buffer.
///
/// Layout per layer l: weights (row-major, out x in) followed by biases.
class Mlp {
 public:
  /// All parameters zero.
  explicit Mlp(NetworkArch arch);
  /// He-uniform weights for relu layers, Glorot-uniform for tanh and the
  /// linear output layer; zero biases.
  Mlp(NetworkArch arch, Rng& rng);

  Mlp(const Mlp& other);
  Mlp& operator=(const Mlp& other);
  Mlp(Mlp&&) noexcept = default;
  Mlp& operator=(Mlp&&) noexcept = default;

  const NetworkArch& arch() const noexcept { return arch_; }
  std::size_t layer_count() const noexcept { return offsets_.size(); }
  std::size_t layer_in(std::size_t l) const { return widths_[l]; }
  std::size_t layer_out(std::size_t l) const { return widths_[l + 1]; }

  std::span<const double> params() const noexcept { return params_; }
  /// Invalidates outstanding tapes.
  std::span<double> mutable_params() noexcept;

  std::span<const double> weights(std::size_t l) const;
  std::span<const double> biases(std::size_t l) const;
  std::span<double> mutable_weights(std::size_t l);
  std::span<double> mutable_biases(std::size_t l);

  Vector forward(std::span<const double> input) const;
  Vector forward(std::span<const double> input, MlpTape& tape) const;

  /// Adds d(loss)/d(params) into param_grad and returns d(loss)/d(input).
  /// Throws DimensionError when the tape was not produced by this network
  /// in its current parameter state.
  Vector backward(const MlpTape& tape, std::span<const double> output_grad,
                  std::span<double> param_grad) const;
  MlpGradients backward(const MlpTape& tape, std::span<const double> output_grad) const;

  void save(ParamArchive& archive, const std::string& prefix) const;
  static Mlp load(const ParamArchive& archive, const std::string& prefix);

 private:
  void layout();
  void touch() noexcept;

  NetworkArch arch_;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  std::uint64_t stamp_ = 0;
};

struct AdamOptions {
  double base_lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  double decay_rate = 0.96;
  /// Zero disables decay.
  double decay_steps = 1000.0;
};

/// Adam with an exponentially decaying learning rate
/// lr(t) = base_lr * decay_rate^(t / decay_steps), t counted before the update.
///
/// State is kept per parameter block; step() expects blocks in the order
/// given at construction.
class Adam {
 public:
  Adam(AdamOptions options, std::vector<std::size_t> block_sizes);

  const AdamOptions& options() const noexcept { return options_; }
  std::uint64_t steps_taken() const noexcept { return step_; }
  double learning_rate() const noexcept;

  /// Throws NumericalError (leaving params untouched) on non-finite gradients.
  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads);

 private:
  AdamOptions options_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

struct GradientCheckOptions {
  double step = 1e-5;
  /// Denominator floor of the relative error, for near-zero gradients.
  double floor = 1e-6;
  /// Check at most this many coordinates (sampled with `seed`); 0 checks all.
  std::size_t max_coords = 0;
  std::uint64_t seed = 0;
};

/// Worst |analytic - numeric| / max(|analytic|, |numeric|, floor) over the
/// checked coordinates, with numeric gradients by central differences.
/// `params` is perturbed in place and restored.
double finite_difference_check(std::span<double> params, std::span<const double> analytic,
                               const std::function<double()>& loss,
                               const GradientCheckOptions& options = {});

/// Loss of a network output and its gradient with respect to that output.
using OutputLoss = std::function<double(std::span<const double> output, Vector* grad)>;

/// Gradient check of an Mlp's parameters for a single input.
double finite_difference_check(Mlp& net, std::span<const double> input, const OutputLoss& loss,
                               const GradientCheckOptions& options = {});

}  // namespace aicc
