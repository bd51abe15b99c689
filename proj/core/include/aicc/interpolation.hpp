#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aicc/linalg.hpp"

namespace aicc {

/// Barycentric Lagrange interpolation (second form) over a fixed node set.
///
/// Weights are precomputed once; evaluating the basis at a point costs O(n).
/// Vector- and matrix-valued data are interpolated coordinatewise by
/// combining node values with the basis weights.
class BarycentricInterpolator {
 public:
  /// Throws InvalidNodes if the nodes are not pairwise distinct or empty.
  explicit BarycentricInterpolator(std::vector<double> nodes);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t degree() const noexcept { return nodes_.size() - 1; }

  /// Lagrange basis values l_j(x) for every node j.
  std::vector<double> basis(double x) const;

  /// p(x) for vector data; values[j] is the sample at nodes()[j].
  Vector evaluate(double x, std::span<const Vector> values) const;
  Matrix evaluate(double x, std::span<const Matrix> values) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// The unique degree-(n-1) vector polynomial through n (node, value) pairs.
class InterpolatedPoly {
 public:
  InterpolatedPoly(std::vector<double> nodes, std::vector<Vector> values);

  std::size_t degree() const noexcept { return interp_.degree(); }
  std::size_t dim() const noexcept { return values_.front().size(); }
  Vector operator()(double x) const { return interp_.evaluate(x, values_); }

 private:
  BarycentricInterpolator interp_;
  std::vector<Vector> values_;
};

}  // namespace aicc
