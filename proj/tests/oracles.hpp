// Independent reference implementations used only by the tests. Nothing here
// calls into the library's numerical routines.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "aicc/linalg.hpp"
#include "aicc/random.hpp"

namespace oracle {

using aicc::Matrix;
using aicc::Vector;

inline Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline Matrix naive_power(const Matrix& x, unsigned p) {
  Matrix r(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) r(i, i) = 1.0;
  for (unsigned i = 0; i < p; ++i) r = naive_product(r, x);
  return r;
}

/// Laplace expansion along the first row.
inline double cofactor_det(const Matrix& x) {
  const std::size_t n = x.rows();
  if (n == 1) return x(0, 0);
  if (n == 2) return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, cc++) = x(i, j);
      }
    }
    det += (c % 2 == 0 ? 1.0 : -1.0) * x(0, c) * cofactor_det(minor);
  }
  return det;
}

/// Roots of the characteristic polynomial of a symmetric 3x3 matrix by the
/// trigonometric solution of the depressed cubic, ascending.
inline std::array<double, 3> symmetric3_eigenvalues(const Matrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> d{a(0, 0), a(1, 1), a(2, 2)};
    std::sort(d.begin(), d.end());
    return d;
  }
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Matrix b(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  const double r = std::clamp(cofactor_det(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> out{e1, e2, e3};
  std::sort(out.begin(), out.end());
  return out;
}

/// Truncated Taylor series; accurate for small norms.
inline Matrix taylor_exp(const Matrix& x, int terms = 40) {
  const std::size_t n = x.rows();
  Matrix sum(n, n), term(n, n);
  for (std::size_t i = 0; i < n; ++i) sum(i, i) = term(i, i) = 1.0;
  for (int k = 1; k < terms; ++k) {
    term = naive_product(term, x);
    for (double& v : term.data()) v /= k;
    for (std::size_t i = 0; i < n * n; ++i) sum.data()[i] += term.data()[i];
  }
  return sum;
}

/// Normalized power iteration; first non-negligible component made positive.
inline Vector power_iteration(const Matrix& x, int steps = 10000) {
  const std::size_t n = x.rows();
  Vector v(n, 1.0);
  for (int s = 0; s < steps; ++s) {
    Vector w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i] += x(i, j) * v[j];
    double len = 0.0;
    for (double e : w) len += e * e;
    len = std::sqrt(len);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / len;
  }
  for (double e : v) {
    if (std::abs(e) > 1e-12) {
      if (e < 0.0)
        for (double& f : v) f = -f;
      break;
    }
  }
  return v;
}

/// sum_g coeffs[g] * alpha^g with explicit powers.
inline Matrix power_sum(const std::vector<Matrix>& coeffs, double alpha) {
  Matrix out(coeffs.front().rows(), coeffs.front().cols());
  for (std::size_t g = 0; g < coeffs.size(); ++g) {
    const double w = std::pow(alpha, static_cast<double>(g));
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += w * coeffs[g].data()[i];
  }
  return out;
}

inline Matrix random_matrix(aicc::Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

inline Matrix random_symmetric(aicc::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Matrix a = random_matrix(rng, n, n, lo, hi);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_error(const Vector& got, const Vector& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace oracle
