#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "aicc/linalg.hpp"

namespace aicc {

/// Matrix polynomials used to exercise exact Lagrange coded computation.
enum class LccFunction { square, cube, square_plus_self };

std::string_view to_string(LccFunction f);
LccFunction parse_lcc_function(std::string_view name);
std::size_t degree(LccFunction f);
Matrix apply(LccFunction f, const Matrix& x);

/// (K-1) d + 1
std::size_t lcc_recovery_threshold(std::size_t k, std::size_t d);

struct LccConfig {
  std::size_t k = 0;
  std::size_t degree = 1;
  std::vector<double> betas;   ///< K interpolation anchors
  std::vector<double> alphas;  ///< N evaluation nodes, one per worker

  /// betas = k/K, alphas = n/(N+1).
  static LccConfig make(std::size_t k, std::size_t degree, std::size_t n_workers);
  std::size_t threshold() const { return lcc_recovery_threshold(k, degree); }
  /// Throws InvalidNodes on duplicate betas or alphas.
  void validate() const;
};

struct LccWorkerResult {
  double alpha = 0.0;
  Matrix value;
};

/// X~_n = u(alpha_n) for the degree-(K-1) matrix polynomial with u(beta_k) = X_k.
std::vector<Matrix> lcc_encode(std::span<const Matrix> inputs, const LccConfig& config);

/// Interpolates the degree-(K-1)d composite from the first (K-1)d+1 results
/// and evaluates it at every beta_k. Throws InsufficientResults below the
/// threshold and InvalidNodes on repeated alphas.
std::vector<Matrix> lcc_decode(std::span<const LccWorkerResult> results, std::size_t f_degree,
                               const LccConfig& config);

}  // namespace aicc
