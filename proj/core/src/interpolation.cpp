#include "aicc/interpolation.hpp"

#include <algorithm>
#include <string>

#include "aicc/errors.hpp"

namespace aicc {

BarycentricInterpolator::BarycentricInterpolator(std::vector<double> nodes)
    : nodes_(std::move(nodes)), weights_(nodes_.size(), 1.0) {
  if (nodes_.empty()) throw InvalidNodes("interpolation needs at least one node");
  const std::size_t n = nodes_.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      const double diff = nodes_[j] - nodes_[m];
      if (diff == 0.0) {
        throw InvalidNodes("duplicate interpolation node " + std::to_string(nodes_[j]));
      }
      weights_[j] /= diff;
    }
  }
}

std::vector<double> BarycentricInterpolator::basis(double x) const {
  const std::size_t n = nodes_.size();
  std::vector<double> ell(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (x == nodes_[j]) {
      ell[j] = 1.0;
      return ell;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    ell[j] = weights_[j] / (x - nodes_[j]);
    denom += ell[j];
  }
  for (double& e : ell) e /= denom;
  return ell;
}

Vector BarycentricInterpolator::evaluate(double x, std::span<const Vector> values) const {
  if (values.size() != nodes_.size()) {
    throw DimensionError("interpolation: " + std::to_string(values.size()) + " values for " +
                         std::to_string(nodes_.size()) + " nodes");
  }
  const std::size_t dim = values.front().size();
  const std::vector<double> ell = basis(x);
  Vector out(dim, 0.0);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j].size() != dim) throw DimensionError("interpolation: ragged node values");
    if (ell[j] == 0.0) continue;
    for (std::size_t i = 0; i < dim; ++i) out[i] += ell[j] * values[j][i];
  }
  return out;
}

Matrix BarycentricInterpolator::evaluate(double x, std::span<const Matrix> values) const {
  if (values.size() != nodes_.size()) {
    throw DimensionError("interpolation: " + std::to_string(values.size()) + " values for " +
                         std::to_string(nodes_.size()) + " nodes");
  }
  const std::vector<double> ell = basis(x);
  Matrix out(values.front().rows(), values.front().cols());
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (ell[j] == 0.0) continue;
    out.add_scaled(values[j], ell[j]);
  }
  return out;
}

InterpolatedPoly::InterpolatedPoly(std::vector<double> nodes, std::vector<Vector> values)
    : interp_(std::move(nodes)), values_(std::move(values)) {
  if (values_.size() != interp_.nodes().size()) {
    throw DimensionError("InterpolatedPoly: node/value count mismatch");
  }
}

}  // namespace aicc
