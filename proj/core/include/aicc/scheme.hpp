#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aicc/datagen.hpp"
#include "aicc/interpolation.hpp"
#include "aicc/linalg.hpp"
#include "aicc/neuralnet.hpp"

namespace aicc {

class ParamArchive;

/// beta_k = k/K for k = 1..K.
std::vector<double> default_betas(std::size_t k);
/// alpha_n = n/(n_nodes+1) for n = 1..n_nodes.
std::vector<double> default_alphas(std::size_t n_nodes);

/// Hyperparameters of the learned coded-computation scheme.
struct SchemeConfig {
  std::size_t m = 10;  ///< input matrix dimension
  std::size_t k = 3;   ///< inputs per dataset
  std::size_t g = 2;   ///< encoder polynomial degree
  std::size_t p = 2;   ///< computation polynomial degree
  std::size_t v = 1;   ///< output dimension of f
  std::vector<double> betas;  ///< K distinct anchors; empty means default_betas(k)
  std::vector<std::size_t> hidden_layers{100, 100};
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;

  /// Recovery threshold G*P + 1.
  std::size_t recovery_threshold() const noexcept { return g * p + 1; }
  /// Network input length K*M^2.
  std::size_t input_len() const noexcept { return k * m * m; }

  NetworkArch encoder_arch() const;
  NetworkArch lambda0_arch() const;
  /// betas, or default_betas(k) when none were set.
  std::vector<double> anchors() const;
  /// Throws DimensionError / InvalidNodes.
  void validate() const;
};

std::size_t recovery_threshold(const SchemeConfig& config);

/// U_0..U_G, each MxM.
struct EncoderCoefficients {
  std::vector<Matrix> u;
};

/// V_0..V_P, each V x M^2. V_0 comes from the network, V_1..V_P are
/// standalone learned matrices shared by every dataset.
struct ComputationCoefficients {
  std::vector<Matrix> v;
  std::vector<bool> from_network;
};

/// A worker's answer: its evaluation node and h(e(alpha)).
struct WorkerResult {
  double alpha = 0.0;
  Vector y;
};

/// K column-major inputs concatenated in order.
Vector flatten_inputs(std::span<const Matrix> inputs);

EncoderCoefficients derive_encoder_coeffs(std::span<const Mlp> encoders,
                                          std::span<const Matrix> inputs);

/// e(alpha) = sum_g U_g alpha^g, Horner form.
Matrix encode(const EncoderCoefficients& coeffs, double alpha);

ComputationCoefficients derive_computation_coeffs(const Mlp& lambda0,
                                                  std::span<const Matrix> lambda_rest,
                                                  std::span<const Matrix> inputs);

/// h(X~) = sum_p V_p vec(X~^p).
Vector worker_compute(const ComputationCoefficients& coeffs, const Matrix& x_tilde);

/// Interpolates the first R = G*P+1 results. Throws InsufficientResults or
/// InvalidNodes.
InterpolatedPoly interpolate_results(std::span<const WorkerResult> results,
                                     std::size_t threshold);

/// f_hat_k = v(beta_k) for the degree-GP polynomial through the first R
/// results.
std::vector<Vector> decode(std::span<const WorkerResult> results, const SchemeConfig& config);

/// ||f_hat - f||
double cost(std::span<const double> f_hat, std::span<const double> f);
/// ||f_hat - f|| + 5 (||f_hat|| - 1)^2
double cost_eigvec(std::span<const double> f_hat, std::span<const double> f);
/// Cost of the given kind; writes d(cost)/d(f_hat) into grad when non-null.
double cost(CostKind kind, std::span<const double> f_hat, std::span<const double> f,
            Vector* grad = nullptr);

/// All learnable state: encoder networks, the V_0 network and V_1..V_P.
class SchemeModel {
 public:
  /// Seeded initialization from config.seed.
  explicit SchemeModel(SchemeConfig config);
  /// All parameters zero.
  static SchemeModel zeros(SchemeConfig config);

  const SchemeConfig& config() const noexcept { return config_; }

  std::span<const Mlp> encoders() const noexcept { return encoders_; }
  std::span<Mlp> encoders() noexcept { return encoders_; }
  const Mlp& lambda0() const noexcept { return lambda0_; }
  Mlp& lambda0() noexcept { return lambda0_; }
  std::span<const Matrix> lambda_rest() const noexcept { return lambda_rest_; }
  std::span<Matrix> lambda_rest() noexcept { return lambda_rest_; }

  EncoderCoefficients encoder_coeffs(std::span<const Matrix> inputs) const;
  ComputationCoefficients computation_coeffs(std::span<const Matrix> inputs) const;

  /// h(e(beta_k)) for every k, bypassing interpolation.
  std::vector<Vector> predict_direct(std::span<const Matrix> inputs) const;

  /// Parameter blocks in a fixed order: encoders, lambda0, V_1..V_P.
  std::vector<std::size_t> block_sizes() const;
  std::vector<std::span<double>> mutable_blocks();
  std::size_t parameter_count() const;

  void save(ParamArchive& archive) const;
  static SchemeModel load(const ParamArchive& archive);
  void save(const std::filesystem::path& path) const;
  static SchemeModel load(const std::filesystem::path& path);

 private:
  SchemeModel(SchemeConfig config, bool randomize);

  SchemeConfig config_;
  std::vector<Mlp> encoders_;
  Mlp lambda0_;
  std::vector<Matrix> lambda_rest_;
};

/// Gradient buffers shaped like a SchemeModel.
struct SchemeGradients {
  std::vector<std::vector<double>> encoders;
  std::vector<double> lambda0;
  std::vector<Matrix> lambda_rest;

  static SchemeGradients zeros_like(const SchemeModel& model);
  void scale(double s);
  SchemeGradients& operator+=(const SchemeGradients& other);
  /// Same block order as SchemeModel::mutable_blocks().
  std::vector<std::span<const double>> blocks() const;
  std::vector<double> flatten() const;
};

/// Everything backward_train needs from a forward pass.
struct TrainTape {
  std::vector<MlpTape> encoder_tapes;
  MlpTape lambda0_tape;
  ComputationCoefficients comp;
  std::vector<std::vector<Matrix>> powers;  ///< per k: e(beta_k)^0..^P
  std::vector<Vector> predictions;
  std::vector<Vector> targets;
  CostKind cost_kind = CostKind::euclidean;
};

struct ForwardResult {
  double loss = 0.0;  ///< mean over k of the cost
  TrainTape tape;
};

/// Training forward pass: f_hat_k = h(e(beta_k)) directly against the given
/// targets.
ForwardResult forward_train(const SchemeModel& model, std::span<const Matrix> inputs,
                            std::span<const Vector> targets, CostKind cost_kind);
/// Same, with targets from the problem's oracle.
ForwardResult forward_train(const SchemeModel& model, std::span<const Matrix> inputs,
                            const ProblemSpec& problem);

/// Reverse-mode gradients of loss_grad * loss, added into `accum`.
/// Throws NumericalError on non-finite gradients.
void backward_train(const SchemeModel& model, const TrainTape& tape, double loss_grad,
                    SchemeGradients& accum);
SchemeGradients backward_train(const SchemeModel& model, const TrainTape& tape,
                               double loss_grad = 1.0);

}  // namespace aicc
