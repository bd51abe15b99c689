#include "aicc/lcc.hpp"

#include <string>

#include "aicc/errors.hpp"
#include "aicc/interpolation.hpp"

namespace aicc {

namespace {

void require_distinct(std::span<const double> xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j]) throw InvalidNodes(std::string(what) + " must be pairwise distinct");
}

}  // namespace

std::string_view to_string(LccFunction f) {
  switch (f) {
    case LccFunction::square:
      return "square";
    case LccFunction::cube:
      return "cube";
    case LccFunction::square_plus_self:
      return "square_plus_self";
  }
  return "?";
}

LccFunction parse_lcc_function(std::string_view name) {
  if (name == "square") return LccFunction::square;
  if (name == "cube") return LccFunction::cube;
  if (name == "square_plus_self") return LccFunction::square_plus_self;
  throw FormatError("unknown lcc function '" + std::string(name) +
                    "' (expected square|cube|square_plus_self)");
}

std::size_t degree(LccFunction f) { return f == LccFunction::cube ? 3 : 2; }

Matrix apply(LccFunction f, const Matrix& x) {
  switch (f) {
    case LccFunction::square:
      return x * x;
    case LccFunction::cube:
      return x * x * x;
    case LccFunction::square_plus_self:
      return x * x + x;
  }
  return x;
}

std::size_t lcc_recovery_threshold(std::size_t k, std::size_t d) { return (k - 1) * d + 1; }

LccConfig LccConfig::make(std::size_t k, std::size_t degree, std::size_t n_workers) {
  LccConfig cfg;
  cfg.k = k;
  cfg.degree = degree;
  for (std::size_t i = 1; i <= k; ++i) cfg.betas.push_back(static_cast<double>(i) / k);
  for (std::size_t n = 1; n <= n_workers; ++n) {
    cfg.alphas.push_back(static_cast<double>(n) / static_cast<double>(n_workers + 1));
  }
  return cfg;
}

void LccConfig::validate() const {
  if (k == 0) throw DimensionError("LCC needs at least one input");
  if (betas.size() != k) throw DimensionError("LCC needs one beta per input");
  require_distinct(betas, "betas");
  require_distinct(alphas, "alphas");
}

std::vector<Matrix> lcc_encode(std::span<const Matrix> inputs, const LccConfig& config) {
  config.validate();
  if (inputs.size() != config.k) throw DimensionError("lcc_encode: input count != K");
  for (const Matrix& x : inputs) {
    if (!x.is_square() || x.rows() != inputs.front().rows()) {
      throw DimensionError("lcc_encode: inputs must be square and equally sized");
    }
  }
  const BarycentricInterpolator u(config.betas);
  std::vector<Matrix> encoded;
  encoded.reserve(config.alphas.size());
  for (double a : config.alphas) encoded.push_back(u.evaluate(a, inputs));
  return encoded;
}

std::vector<Matrix> lcc_decode(std::span<const LccWorkerResult> results, std::size_t f_degree,
                               const LccConfig& config) {
  const std::size_t threshold = lcc_recovery_threshold(config.k, f_degree);
  if (results.size() < threshold) throw InsufficientResults(threshold, results.size());
  std::vector<double> nodes;
  std::vector<Matrix> values;
  for (std::size_t i = 0; i < threshold; ++i) {
    nodes.push_back(results[i].alpha);
    values.push_back(results[i].value);
  }
  const BarycentricInterpolator v(std::move(nodes));
  std::vector<Matrix> out;
  for (double b : config.betas) out.push_back(v.evaluate(b, values));
  return out;
}

}  // namespace aicc
