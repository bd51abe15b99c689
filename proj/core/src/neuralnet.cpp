#include "aicc/neuralnet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "aicc/checkpoint.hpp"
#include "aicc/errors.hpp"

namespace aicc {

namespace {

std::uint64_t next_stamp() noexcept {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::relu:
      return z > 0.0 ? z : 0.0;
    case Activation::tanh:
      return std::tanh(z);
    case Activation::linear:
      return z;
  }
  return z;
}

double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::linear:
      return 1.0;
  }
  return 1.0;
}

std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(dims[i]);
  }
  return out;
}

std::vector<std::size_t> split_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? text.npos : comma - pos);
    try {
      dims.push_back(std::stoul(tok));
    } catch (const std::exception&) {
      throw FormatError("bad dimension list '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return dims;
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::linear:
      return "linear";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw FormatError("unknown activation '" + std::string(name) + "'");
}

void NetworkArch::validate() const {
  if (input_dim == 0 || output_dim == 0) throw DimensionError("network dims must be positive");
  for (std::size_t h : hidden_layers)
    if (h == 0) throw DimensionError("hidden layer widths must be positive");
}

std::vector<std::size_t> NetworkArch::layer_widths() const {
  std::vector<std::size_t> w;
  w.push_back(input_dim);
  w.insert(w.end(), hidden_layers.begin(), hidden_layers.end());
  w.push_back(output_dim);
  return w;
}

std::size_t NetworkArch::parameter_count() const {
  const auto w = layer_widths();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) n += w[l] * w[l + 1] + w[l + 1];
  return n;
}

Mlp::Mlp(NetworkArch arch) : arch_(std::move(arch)) {
  arch_.validate();
  layout();
  params_.assign(arch_.parameter_count(), 0.0);
  stamp_ = next_stamp();
}

Mlp::Mlp(NetworkArch arch, Rng& rng) : Mlp(std::move(arch)) {
  const std::size_t layers = layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const bool hidden = l + 1 < layers;
    const auto fan_in = static_cast<double>(layer_in(l));
    const auto fan_out = static_cast<double>(layer_out(l));
    const double limit = hidden && arch_.hidden_activation == Activation::relu
                             ? std::sqrt(6.0 / fan_in)
                             : std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : mutable_weights(l)) w = rng.uniform(-limit, limit);
  }
}

Mlp::Mlp(const Mlp& other)
    : arch_(other.arch_),
      widths_(other.widths_),
      offsets_(other.offsets_),
      params_(other.params_),
      stamp_(next_stamp()) {}

Mlp& Mlp::operator=(const Mlp& other) {
  if (this != &other) {
    arch_ = other.arch_;
    widths_ = other.widths_;
    offsets_ = other.offsets_;
    params_ = other.params_;
    stamp_ = next_stamp();
  }
  return *this;
}

void Mlp::layout() {
  widths_ = arch_.layer_widths();
  offsets_.clear();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(off);
    off += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
}

void Mlp::touch() noexcept { stamp_ = next_stamp(); }

std::span<double> Mlp::mutable_params() noexcept {
  touch();
  return params_;
}

std::span<const double> Mlp::weights(std::size_t l) const {
  return {params_.data() + offsets_.at(l), layer_in(l) * layer_out(l)};
}

std::span<const double> Mlp::biases(std::size_t l) const {
  return {params_.data() + offsets_.at(l) + layer_in(l) * layer_out(l), layer_out(l)};
}

std::span<double> Mlp::mutable_weights(std::size_t l) {
  touch();
  return {params_.data() + offsets_.at(l), layer_in(l) * layer_out(l)};
}

std::span<double> Mlp::mutable_biases(std::size_t l) {
  touch();
  return {params_.data() + offsets_.at(l) + layer_in(l) * layer_out(l), layer_out(l)};
}

Vector Mlp::forward(std::span<const double> input) const {
  MlpTape tape;
  return forward(input, tape);
}

Vector Mlp::forward(std::span<const double> input, MlpTape& tape) const {
  if (input.size() != arch_.input_dim) {
    throw DimensionError("mlp forward: input length " + std::to_string(input.size()) +
                         ", expected " + std::to_string(arch_.input_dim));
  }
  const std::size_t layers = layer_count();
  tape.stamp = stamp_;
  tape.inputs.resize(layers);
  tape.preacts.resize(layers);

  Vector x(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = layer_in(l);
    const std::size_t out = layer_out(l);
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    Vector z(out);
    for (std::size_t i = 0; i < out; ++i) {
      const double* row = w + i * in;
      double s = b[i];
      for (std::size_t j = 0; j < in; ++j) s += row[j] * x[j];
      z[i] = s;
    }
    const Activation act = l + 1 < layers ? arch_.hidden_activation : Activation::linear;
    Vector a(out);
    for (std::size_t i = 0; i < out; ++i) a[i] = activate(act, z[i]);
    tape.inputs[l] = std::move(x);
    tape.preacts[l] = std::move(z);
    x = std::move(a);
  }
  return x;
}

Vector Mlp::backward(const MlpTape& tape, std::span<const double> output_grad,
                     std::span<double> param_grad) const {
  const std::size_t layers = layer_count();
  if (tape.stamp != stamp_ || tape.inputs.size() != layers) {
    throw DimensionError("mlp backward: tape does not belong to this network state");
  }
  if (output_grad.size() != arch_.output_dim) {
    throw DimensionError("mlp backward: output gradient length mismatch");
  }
  if (param_grad.size() != params_.size()) {
    throw DimensionError("mlp backward: gradient buffer length mismatch");
  }

  Vector delta(output_grad.begin(), output_grad.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = layer_in(l);
    const std::size_t out = layer_out(l);
    const Activation act = l + 1 < layers ? arch_.hidden_activation : Activation::linear;
    if (act != Activation::linear) {
      for (std::size_t i = 0; i < out; ++i) delta[i] *= activate_derivative(act, tape.preacts[l][i]);
    }
    const double* w = params_.data() + offsets_[l];
    double* gw = param_grad.data() + offsets_[l];
    double* gb = gw + in * out;
    const Vector& x = tape.inputs[l];
    Vector prev(in, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      const double d = delta[i];
      gb[i] += d;
      if (d == 0.0) continue;
      const double* row = w + i * in;
      double* grow = gw + i * in;
      for (std::size_t j = 0; j < in; ++j) {
        grow[j] += d * x[j];
        prev[j] += row[j] * d;
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

MlpGradients Mlp::backward(const MlpTape& tape, std::span<const double> output_grad) const {
  MlpGradients g;
  g.params.assign(params_.size(), 0.0);
  g.input = backward(tape, output_grad, g.params);
  return g;
}

void Mlp::save(ParamArchive& archive, const std::string& prefix) const {
  archive.set_meta(prefix + ".input_dim", std::to_string(arch_.input_dim));
  archive.set_meta(prefix + ".hidden_layers", join_dims(arch_.hidden_layers));
  archive.set_meta(prefix + ".output_dim", std::to_string(arch_.output_dim));
  archive.set_meta(prefix + ".activation", std::string(to_string(arch_.hidden_activation)));
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto w = weights(l);
    const auto b = biases(l);
    archive.add_tensor(prefix + ".layer" + std::to_string(l) + ".weight",
                       {layer_out(l), layer_in(l)}, {w.begin(), w.end()});
    archive.add_tensor(prefix + ".layer" + std::to_string(l) + ".bias", {layer_out(l)},
                       {b.begin(), b.end()});
  }
}

Mlp Mlp::load(const ParamArchive& archive, const std::string& prefix) {
  NetworkArch arch;
  try {
    arch.input_dim = std::stoul(archive.meta(prefix + ".input_dim"));
    arch.output_dim = std::stoul(archive.meta(prefix + ".output_dim"));
  } catch (const std::logic_error&) {
    throw FormatError("bad network dims for '" + prefix + "'");
  }
  arch.hidden_layers = split_dims(archive.meta(prefix + ".hidden_layers"));
  arch.hidden_activation = parse_activation(archive.meta(prefix + ".activation"));

  Mlp net(arch);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto& w = archive.tensor(prefix + ".layer" + std::to_string(l) + ".weight");
    const auto& b = archive.tensor(prefix + ".layer" + std::to_string(l) + ".bias");
    const std::vector<std::size_t> wshape{net.layer_out(l), net.layer_in(l)};
    const std::vector<std::size_t> bshape{net.layer_out(l)};
    if (w.shape != wshape || b.shape != bshape) {
      throw FormatError("tensor shape mismatch in '" + prefix + "' layer " + std::to_string(l));
    }
    std::copy(w.data.begin(), w.data.end(), net.mutable_weights(l).begin());
    std::copy(b.data.begin(), b.data.end(), net.mutable_biases(l).begin());
  }
  return net;
}

Adam::Adam(AdamOptions options, std::vector<std::size_t> block_sizes) : options_(options) {
  for (std::size_t n : block_sizes) {
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

double Adam::learning_rate() const noexcept {
  if (options_.decay_steps <= 0.0) return options_.base_lr;
  return options_.base_lr *
         std::pow(options_.decay_rate, static_cast<double>(step_) / options_.decay_steps);
}

void Adam::step(std::span<const std::span<double>> params,
                std::span<const std::span<const double>> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DimensionError("adam: block count mismatch");
  }
  for (std::size_t b = 0; b < m_.size(); ++b) {
    if (params[b].size() != m_[b].size() || grads[b].size() != m_[b].size()) {
      throw DimensionError("adam: block " + std::to_string(b) + " size mismatch");
    }
    for (std::size_t i = 0; i < grads[b].size(); ++i) {
      if (!std::isfinite(grads[b][i])) {
        throw NumericalError("adam: non-finite gradient in block " + std::to_string(b) +
                             " at index " + std::to_string(i) + " (step " +
                             std::to_string(step_) + ")");
      }
    }
  }

  const double lr = learning_rate();
  const double t = static_cast<double>(step_ + 1);
  const double bias1 = 1.0 - std::pow(options_.beta1, t);
  const double bias2 = 1.0 - std::pow(options_.beta2, t);
  for (std::size_t b = 0; b < m_.size(); ++b) {
    auto& m = m_[b];
    auto& v = v_[b];
    const auto g = grads[b];
    auto p = params[b];
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g[i];
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
  ++step_;
}

double finite_difference_check(std::span<double> params, std::span<const double> analytic,
                               const std::function<double()>& loss,
                               const GradientCheckOptions& options) {
  if (params.size() != analytic.size()) {
    throw DimensionError("finite_difference_check: gradient length mismatch");
  }
  std::vector<std::size_t> coords(params.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.max_coords != 0 && options.max_coords < coords.size()) {
    Rng rng(options.seed);
    for (std::size_t i = 0; i < options.max_coords; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(coords.size() - i));
      std::swap(coords[i], coords[j]);
    }
    coords.resize(options.max_coords);
  }

  double worst = 0.0;
  for (std::size_t i : coords) {
    const double saved = params[i];
    params[i] = saved + options.step;
    const double up = loss();
    params[i] = saved - options.step;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), options.floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

double finite_difference_check(Mlp& net, std::span<const double> input, const OutputLoss& loss,
                               const GradientCheckOptions& options) {
  MlpTape tape;
  const Vector out = net.forward(input, tape);
  Vector out_grad;
  loss(out, &out_grad);
  const MlpGradients grads = net.backward(tape, out_grad);

  auto params = net.mutable_params();
  return finite_difference_check(
      params, grads.params, [&] { return loss(net.forward(input), nullptr); }, options);
}

}  // namespace aicc
