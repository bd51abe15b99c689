#include "aicc/scheme.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "aicc/checkpoint.hpp"
#include "aicc/errors.hpp"

namespace aicc {

namespace {

void require_inputs(std::span<const Matrix> inputs, std::size_t k, std::size_t m) {
  if (inputs.size() != k) {
    throw DimensionError("expected " + std::to_string(k) + " input matrices, got " +
                         std::to_string(inputs.size()));
  }
  for (const Matrix& x : inputs) {
    if (x.rows() != m || x.cols() != m) {
      throw DimensionError("input matrix is " + std::to_string(x.rows()) + "x" +
                           std::to_string(x.cols()) + ", expected " + std::to_string(m) + "x" +
                           std::to_string(m));
    }
  }
}

std::string join(const std::vector<double>& xs) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

template <typename T>
std::vector<T> split(const std::string& text) {
  std::vector<T> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(tok));
      } else {
        out.push_back(static_cast<T>(std::stoull(tok)));
      }
    } catch (const std::logic_error&) {
      throw FormatError("bad list value '" + tok + "'");
    }
  }
  return out;
}

std::size_t meta_size(const ParamArchive& archive, const std::string& key) {
  try {
    return std::stoul(archive.meta(key));
  } catch (const std::logic_error&) {
    throw FormatError("bad value for meta key '" + key + "'");
  }
}

void check_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite gradient in ") + what);
  }
}

}  // namespace

std::vector<double> default_betas(std::size_t k) {
  std::vector<double> b(k);
  for (std::size_t i = 0; i < k; ++i) b[i] = static_cast<double>(i + 1) / static_cast<double>(k);
  return b;
}

std::vector<double> default_alphas(std::size_t n_nodes) {
  std::vector<double> a(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    a[i] = static_cast<double>(i + 1) / static_cast<double>(n_nodes + 1);
  }
  return a;
}

NetworkArch SchemeConfig::encoder_arch() const {
  return NetworkArch{input_len(), hidden_layers, m * m, activation};
}

NetworkArch SchemeConfig::lambda0_arch() const {
  return NetworkArch{input_len(), hidden_layers, v * m * m, activation};
}

std::vector<double> SchemeConfig::anchors() const {
  return betas.empty() ? default_betas(k) : betas;
}

void SchemeConfig::validate() const {
  if (m == 0 || k == 0 || v == 0) throw DimensionError("M, K and V must be positive");
  const auto b = anchors();
  if (b.size() != k) {
    throw DimensionError("expected " + std::to_string(k) + " betas, got " +
                         std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (b[i] == b[j]) throw InvalidNodes("betas must be pairwise distinct");
  encoder_arch().validate();
}

std::size_t recovery_threshold(const SchemeConfig& config) { return config.recovery_threshold(); }

Vector flatten_inputs(std::span<const Matrix> inputs) {
  Vector flat;
  for (const Matrix& x : inputs) flat.insert(flat.end(), x.data().begin(), x.data().end());
  return flat;
}

EncoderCoefficients derive_encoder_coeffs(std::span<const Mlp> encoders,
                                          std::span<const Matrix> inputs) {
  if (inputs.empty()) throw DimensionError("derive_encoder_coeffs: no inputs");
  const std::size_t m = inputs.front().rows();
  require_inputs(inputs, inputs.size(), m);
  const Vector flat = flatten_inputs(inputs);
  EncoderCoefficients coeffs;
  coeffs.u.reserve(encoders.size());
  for (const Mlp& net : encoders) {
    if (net.arch().output_dim != m * m) {
      throw DimensionError("encoder network must output M^2 values");
    }
    coeffs.u.push_back(unvec(net.forward(flat), m, m));
  }
  return coeffs;
}

Matrix encode(const EncoderCoefficients& coeffs, double alpha) {
  if (coeffs.u.empty()) throw DimensionError("encode: no coefficients");
  Matrix acc = coeffs.u.back();
  for (std::size_t g = coeffs.u.size() - 1; g-- > 0;) {
    acc *= alpha;
    acc += coeffs.u[g];
  }
  return acc;
}

ComputationCoefficients derive_computation_coeffs(const Mlp& lambda0,
                                                  std::span<const Matrix> lambda_rest,
                                                  std::span<const Matrix> inputs) {
  if (inputs.empty()) throw DimensionError("derive_computation_coeffs: no inputs");
  const std::size_t m = inputs.front().rows();
  require_inputs(inputs, inputs.size(), m);
  const std::size_t m2 = m * m;
  if (lambda0.arch().output_dim % m2 != 0) {
    throw DimensionError("lambda0 output must be a multiple of M^2");
  }
  const std::size_t v = lambda0.arch().output_dim / m2;

  ComputationCoefficients coeffs;
  coeffs.v.push_back(unvec(lambda0.forward(flatten_inputs(inputs)), v, m2));
  coeffs.from_network.push_back(true);
  for (const Matrix& vp : lambda_rest) {
    if (vp.rows() != v || vp.cols() != m2) {
      throw DimensionError("standalone computation coefficient must be V x M^2");
    }
    coeffs.v.push_back(vp);
    coeffs.from_network.push_back(false);
  }
  return coeffs;
}

Vector worker_compute(const ComputationCoefficients& coeffs, const Matrix& x_tilde) {
  if (coeffs.v.empty()) throw DimensionError("worker_compute: no coefficients");
  if (!x_tilde.is_square() || coeffs.v.front().cols() != x_tilde.size()) {
    throw DimensionError("worker_compute: encoded matrix does not match coefficients");
  }
  const auto powers = mat_powers(x_tilde, static_cast<unsigned>(coeffs.v.size() - 1));
  Vector y(coeffs.v.front().rows(), 0.0);
  for (std::size_t p = 0; p < coeffs.v.size(); ++p) {
    const Vector term = matvec(coeffs.v[p], powers[p].data());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += term[i];
  }
  return y;
}

InterpolatedPoly interpolate_results(std::span<const WorkerResult> results,
                                     std::size_t threshold) {
  if (results.size() < threshold) throw InsufficientResults(threshold, results.size());
  std::vector<double> nodes;
  std::vector<Vector> values;
  for (std::size_t i = 0; i < threshold; ++i) {
    nodes.push_back(results[i].alpha);
    values.push_back(results[i].y);
  }
  return InterpolatedPoly(std::move(nodes), std::move(values));
}

std::vector<Vector> decode(std::span<const WorkerResult> results, const SchemeConfig& config) {
  const InterpolatedPoly poly = interpolate_results(results, config.recovery_threshold());
  std::vector<Vector> out;
  for (double beta : config.anchors()) out.push_back(poly(beta));
  return out;
}

double cost(std::span<const double> f_hat, std::span<const double> f) {
  return cost(CostKind::euclidean, f_hat, f);
}

double cost_eigvec(std::span<const double> f_hat, std::span<const double> f) {
  return cost(CostKind::unit_norm_penalty, f_hat, f);
}

double cost(CostKind kind, std::span<const double> f_hat, std::span<const double> f,
            Vector* grad) {
  if (f_hat.size() != f.size()) {
    throw DimensionError("cost: prediction length " + std::to_string(f_hat.size()) +
                         " vs target length " + std::to_string(f.size()));
  }
  const std::size_t n = f.size();
  Vector diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = f_hat[i] - f[i];
  const double dist = norm2(diff);
  double c = dist;
  if (grad) {
    grad->assign(n, 0.0);
    // Zero distance takes the zero subgradient; NaN must still propagate.
    if (dist != 0.0)
      for (std::size_t i = 0; i < n; ++i) (*grad)[i] = diff[i] / dist;
  }
  if (kind == CostKind::unit_norm_penalty) {
    const double len = norm2(f_hat);
    const double excess = len - 1.0;
    c += 5.0 * excess * excess;
    if (grad && len != 0.0) {
      for (std::size_t i = 0; i < n; ++i) (*grad)[i] += 10.0 * excess * f_hat[i] / len;
    }
  }
  return c;
}

SchemeModel::SchemeModel(SchemeConfig config) : SchemeModel(std::move(config), true) {}

SchemeModel SchemeModel::zeros(SchemeConfig config) { return SchemeModel(std::move(config), false); }

SchemeModel::SchemeModel(SchemeConfig config, bool randomize)
    : config_(std::move(config)), lambda0_(NetworkArch{1, {1}, 1}) {
  config_.validate();
  if (config_.betas.empty()) config_.betas = default_betas(config_.k);
  Rng rng(config_.seed);
  for (std::size_t g = 0; g <= config_.g; ++g) {
    encoders_.push_back(randomize ? Mlp(config_.encoder_arch(), rng) : Mlp(config_.encoder_arch()));
  }
  lambda0_ = randomize ? Mlp(config_.lambda0_arch(), rng) : Mlp(config_.lambda0_arch());
  const std::size_t m2 = config_.m * config_.m;
  const double limit = std::sqrt(6.0 / static_cast<double>(m2 + config_.v));
  for (std::size_t p = 1; p <= config_.p; ++p) {
    Matrix vp(config_.v, m2);
    if (randomize)
      for (double& x : vp.data()) x = rng.uniform(-limit, limit);
    lambda_rest_.push_back(std::move(vp));
  }
}

EncoderCoefficients SchemeModel::encoder_coeffs(std::span<const Matrix> inputs) const {
  require_inputs(inputs, config_.k, config_.m);
  return derive_encoder_coeffs(encoders_, inputs);
}

ComputationCoefficients SchemeModel::computation_coeffs(std::span<const Matrix> inputs) const {
  require_inputs(inputs, config_.k, config_.m);
  return derive_computation_coeffs(lambda0_, lambda_rest_, inputs);
}

std::vector<Vector> SchemeModel::predict_direct(std::span<const Matrix> inputs) const {
  const EncoderCoefficients enc = encoder_coeffs(inputs);
  const ComputationCoefficients comp = computation_coeffs(inputs);
  std::vector<Vector> out;
  for (double beta : config_.betas) out.push_back(worker_compute(comp, encode(enc, beta)));
  return out;
}

std::vector<std::size_t> SchemeModel::block_sizes() const {
  std::vector<std::size_t> sizes;
  for (const Mlp& net : encoders_) sizes.push_back(net.params().size());
  sizes.push_back(lambda0_.params().size());
  for (const Matrix& vp : lambda_rest_) sizes.push_back(vp.size());
  return sizes;
}

std::vector<std::span<double>> SchemeModel::mutable_blocks() {
  std::vector<std::span<double>> blocks;
  for (Mlp& net : encoders_) blocks.push_back(net.mutable_params());
  blocks.push_back(lambda0_.mutable_params());
  for (Matrix& vp : lambda_rest_) blocks.push_back(vp.data());
  return blocks;
}

std::size_t SchemeModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t s : block_sizes()) n += s;
  return n;
}

void SchemeModel::save(ParamArchive& archive) const {
  archive.set_meta("scheme.m", std::to_string(config_.m));
  archive.set_meta("scheme.k", std::to_string(config_.k));
  archive.set_meta("scheme.g", std::to_string(config_.g));
  archive.set_meta("scheme.p", std::to_string(config_.p));
  archive.set_meta("scheme.v", std::to_string(config_.v));
  archive.set_meta("scheme.betas", join(config_.betas));
  archive.set_meta("scheme.hidden_layers", join(config_.hidden_layers));
  archive.set_meta("scheme.activation", std::string(to_string(config_.activation)));
  archive.set_meta("scheme.seed", std::to_string(config_.seed));
  for (std::size_t g = 0; g < encoders_.size(); ++g) {
    encoders_[g].save(archive, "encoder" + std::to_string(g));
  }
  lambda0_.save(archive, "lambda0");
  for (std::size_t p = 0; p < lambda_rest_.size(); ++p) {
    const Matrix& vp = lambda_rest_[p];
    archive.add_tensor("lambda" + std::to_string(p + 1) + ".matrix", {vp.rows(), vp.cols()},
                       {vp.data().begin(), vp.data().end()});
  }
}

SchemeModel SchemeModel::load(const ParamArchive& archive) {
  SchemeConfig cfg;
  cfg.m = meta_size(archive, "scheme.m");
  cfg.k = meta_size(archive, "scheme.k");
  cfg.g = meta_size(archive, "scheme.g");
  cfg.p = meta_size(archive, "scheme.p");
  cfg.v = meta_size(archive, "scheme.v");
  cfg.betas = split<double>(archive.meta("scheme.betas"));
  cfg.hidden_layers = split<std::size_t>(archive.meta("scheme.hidden_layers"));
  cfg.activation = parse_activation(archive.meta("scheme.activation"));
  try {
    cfg.seed = std::stoull(archive.meta("scheme.seed"));
  } catch (const std::logic_error&) {
    throw FormatError("bad scheme.seed");
  }

  SchemeModel model = zeros(cfg);
  for (std::size_t g = 0; g < model.encoders_.size(); ++g) {
    Mlp net = Mlp::load(archive, "encoder" + std::to_string(g));
    if (net.arch() != cfg.encoder_arch()) {
      throw FormatError("encoder" + std::to_string(g) + " architecture does not match config");
    }
    model.encoders_[g] = std::move(net);
  }
  Mlp lam = Mlp::load(archive, "lambda0");
  if (lam.arch() != cfg.lambda0_arch()) {
    throw FormatError("lambda0 architecture does not match config");
  }
  model.lambda0_ = std::move(lam);
  for (std::size_t p = 0; p < model.lambda_rest_.size(); ++p) {
    const auto& t = archive.tensor("lambda" + std::to_string(p + 1) + ".matrix");
    Matrix& vp = model.lambda_rest_[p];
    if (t.shape != std::vector<std::size_t>{vp.rows(), vp.cols()}) {
      throw FormatError("lambda" + std::to_string(p + 1) + " shape does not match config");
    }
    vp = Matrix(vp.rows(), vp.cols(), t.data);
  }
  return model;
}

void SchemeModel::save(const std::filesystem::path& path) const {
  ParamArchive archive;
  save(archive);
  archive.save(path);
}

SchemeModel SchemeModel::load(const std::filesystem::path& path) {
  return load(ParamArchive::load(path));
}

SchemeGradients SchemeGradients::zeros_like(const SchemeModel& model) {
  SchemeGradients g;
  for (const Mlp& net : model.encoders()) g.encoders.emplace_back(net.params().size(), 0.0);
  g.lambda0.assign(model.lambda0().params().size(), 0.0);
  for (const Matrix& vp : model.lambda_rest()) g.lambda_rest.emplace_back(vp.rows(), vp.cols());
  return g;
}

void SchemeGradients::scale(double s) {
  for (auto& e : encoders)
    for (double& x : e) x *= s;
  for (double& x : lambda0) x *= s;
  for (Matrix& m : lambda_rest) m *= s;
}

SchemeGradients& SchemeGradients::operator+=(const SchemeGradients& other) {
  if (encoders.size() != other.encoders.size() ||
      lambda_rest.size() != other.lambda_rest.size()) {
    throw DimensionError("gradient structure mismatch");
  }
  for (std::size_t g = 0; g < encoders.size(); ++g)
    for (std::size_t i = 0; i < encoders[g].size(); ++i) encoders[g][i] += other.encoders[g][i];
  for (std::size_t i = 0; i < lambda0.size(); ++i) lambda0[i] += other.lambda0[i];
  for (std::size_t p = 0; p < lambda_rest.size(); ++p) lambda_rest[p] += other.lambda_rest[p];
  return *this;
}

std::vector<std::span<const double>> SchemeGradients::blocks() const {
  std::vector<std::span<const double>> out;
  for (const auto& e : encoders) out.emplace_back(e);
  out.emplace_back(lambda0);
  for (const Matrix& m : lambda_rest) out.push_back(m.data());
  return out;
}

std::vector<double> SchemeGradients::flatten() const {
  std::vector<double> flat;
  for (auto b : blocks()) flat.insert(flat.end(), b.begin(), b.end());
  return flat;
}

ForwardResult forward_train(const SchemeModel& model, std::span<const Matrix> inputs,
                            std::span<const Vector> targets, CostKind cost_kind) {
  const SchemeConfig& cfg = model.config();
  require_inputs(inputs, cfg.k, cfg.m);
  if (targets.size() != cfg.k) throw DimensionError("forward_train: need one target per input");

  ForwardResult result;
  TrainTape& tape = result.tape;
  tape.cost_kind = cost_kind;
  tape.targets.assign(targets.begin(), targets.end());

  const Vector flat = flatten_inputs(inputs);
  EncoderCoefficients enc;
  tape.encoder_tapes.resize(model.encoders().size());
  for (std::size_t g = 0; g < model.encoders().size(); ++g) {
    enc.u.push_back(unvec(model.encoders()[g].forward(flat, tape.encoder_tapes[g]), cfg.m, cfg.m));
  }
  const std::size_t m2 = cfg.m * cfg.m;
  tape.comp.v.push_back(unvec(model.lambda0().forward(flat, tape.lambda0_tape), cfg.v, m2));
  tape.comp.from_network.push_back(true);
  for (const Matrix& vp : model.lambda_rest()) {
    tape.comp.v.push_back(vp);
    tape.comp.from_network.push_back(false);
  }

  double total = 0.0;
  for (std::size_t k = 0; k < cfg.k; ++k) {
    const Matrix x_tilde = encode(enc, cfg.betas[k]);
    auto powers = mat_powers(x_tilde, static_cast<unsigned>(cfg.p));
    Vector y(cfg.v, 0.0);
    for (std::size_t p = 0; p <= cfg.p; ++p) {
      const Vector term = matvec(tape.comp.v[p], powers[p].data());
      for (std::size_t i = 0; i < cfg.v; ++i) y[i] += term[i];
    }
    total += cost(cost_kind, y, targets[k]);
    tape.powers.push_back(std::move(powers));
    tape.predictions.push_back(std::move(y));
  }
  result.loss = total / static_cast<double>(cfg.k);
  return result;
}

ForwardResult forward_train(const SchemeModel& model, std::span<const Matrix> inputs,
                            const ProblemSpec& problem) {
  if (problem.output_dim() != model.config().v || problem.m() != model.config().m) {
    throw DimensionError("forward_train: problem dimensions do not match the scheme");
  }
  std::vector<Vector> targets;
  for (const Matrix& x : inputs) targets.push_back(problem.target(x));
  return forward_train(model, inputs, targets, problem.cost_kind());
}

void backward_train(const SchemeModel& model, const TrainTape& tape, double loss_grad,
                    SchemeGradients& accum) {
  const SchemeConfig& cfg = model.config();
  const std::size_t m = cfg.m;
  const std::size_t m2 = m * m;
  const double per_k = loss_grad / static_cast<double>(cfg.k);

  std::vector<Matrix> d_u(cfg.g + 1, Matrix(m, m));
  std::vector<Matrix> d_v(cfg.p + 1, Matrix(cfg.v, m2));

  for (std::size_t k = 0; k < cfg.k; ++k) {
    Vector grad;
    cost(tape.cost_kind, tape.predictions[k], tape.targets[k], &grad);
    for (double& x : grad) x *= per_k;
    const auto& powers = tape.powers[k];

    // d/dV_p = grad vec(A^p)^T
    for (std::size_t p = 0; p <= cfg.p; ++p) {
      const auto flat = powers[p].data();
      for (std::size_t j = 0; j < m2; ++j) {
        const double aj = flat[j];
        if (aj == 0.0) continue;
        auto col = d_v[p].col(j);
        for (std::size_t i = 0; i < cfg.v; ++i) col[i] += grad[i] * aj;
      }
    }

    // d/dA of sum_p V_p vec(A^p): sum_{i<p} (A^i)^T D_p (A^{p-1-i})^T.
    Matrix d_a(m, m);
    for (std::size_t p = 1; p <= cfg.p; ++p) {
      const Matrix d_p = unvec(matvec_transposed(tape.comp.v[p], grad), m, m);
      for (std::size_t i = 0; i < p; ++i) {
        d_a += powers[i].transpose() * d_p * powers[p - 1 - i].transpose();
      }
    }
    double scale = 1.0;
    for (std::size_t g = 0; g <= cfg.g; ++g) {
      d_u[g].add_scaled(d_a, scale);
      scale *= cfg.betas[k];
    }
  }

  for (std::size_t g = 0; g <= cfg.g; ++g) {
    model.encoders()[g].backward(tape.encoder_tapes[g], d_u[g].data(), accum.encoders[g]);
  }
  model.lambda0().backward(tape.lambda0_tape, d_v[0].data(), accum.lambda0);
  for (std::size_t p = 1; p <= cfg.p; ++p) accum.lambda_rest[p - 1] += d_v[p];

  for (const auto& e : accum.encoders) check_finite(e, "encoder networks");
  check_finite(accum.lambda0, "lambda0 network");
  for (const Matrix& vp : accum.lambda_rest) check_finite(vp.data(), "computation coefficients");
}

SchemeGradients backward_train(const SchemeModel& model, const TrainTape& tape,
                               double loss_grad) {
  SchemeGradients g = SchemeGradients::zeros_like(model);
  backward_train(model, tape, loss_grad, g);
  return g;
}

}  // namespace aicc
