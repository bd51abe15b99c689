#include "aicc/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "aicc/errors.hpp"

namespace aicc {

namespace {

void require_square(const Matrix& x, const char* what) {
  if (!x.is_square()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("matrix shape mismatch: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> col_major)
    : rows_(rows), cols_(cols), data_(std::move(col_major)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged row literal");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

void Matrix::add_scaled(const Matrix& other, double s) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols()) +
                         " and " + std::to_string(b.rows()) + " differ");
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < b.cols(); ++j) {
    double* cj = c.col(j).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      const double* ak = a.col(k).data();
      for (std::size_t i = 0; i < n; ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw DimensionError("matvec: vector length mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    const double* aj = a.col(j).data();
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += aj[i] * xj;
  }
  return y;
}

Vector matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw DimensionError("matvec_transposed: vector length mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double trace(const Matrix& x) {
  require_square(x, "trace");
  double t = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) t += x(i, i);
  return t;
}

Vector vec(const Matrix& x) { return Vector(x.data().begin(), x.data().end()); }

Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(v.begin(), v.end()));
}

Matrix mat_pow(const Matrix& x, unsigned p) {
  require_square(x, "mat_pow");
  Matrix result = Matrix::identity(x.rows());
  for (unsigned i = 0; i < p; ++i) result = result * x;
  return result;
}

std::vector<Matrix> mat_powers(const Matrix& x, unsigned max_power) {
  require_square(x, "mat_powers");
  std::vector<Matrix> powers;
  powers.reserve(max_power + 1);
  powers.push_back(Matrix::identity(x.rows()));
  for (unsigned p = 1; p <= max_power; ++p) powers.push_back(powers.back() * x);
  return powers;
}

double frobenius_norm(const Matrix& x) { return norm2(x.data()); }

double one_norm(const Matrix& x) {
  double best = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (double v : x.col(j)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double operator_norm(const Matrix& x) {
  require_square(x, "operator_norm");
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 10000;

  const std::size_t n = x.cols();
  if (n == 0) return 0.0;
  const Matrix gram = x.transpose() * x;

  // Fractional parts of multiples of the golden ratio: a start vector that is
  // not orthogonal to the dominant singular direction for structured inputs.
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) * 0.6180339887498949;
    v[i] = 0.5 + (t - std::floor(t));
  }
  double len = norm2(v);
  for (double& e : v) e /= len;

  double lambda = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector w = matvec(gram, v);
    const double next = norm2(w);
    if (next == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / next;
    const bool converged = std::abs(next - lambda) <= kTolerance * next;
    lambda = next;
    if (converged) break;
  }
  return std::sqrt(lambda);
}

LuDecomposition::LuDecomposition(Matrix a) : lu_(std::move(a)) {
  require_square(lu_, "lu");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        pivot = i;
      }
    }
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pivot, j));
      std::swap(perm_[k], perm_[pivot]);
      sign_ = -sign_;
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) lu_(i, k) *= inv;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double ukj = lu_(k, j);
      if (ukj == 0.0) continue;
      for (std::size_t i = k + 1; i < n; ++i) lu_(i, j) -= lu_(i, k) * ukj;
    }
  }
}

double LuDecomposition::determinant() const noexcept {
  if (singular_) return 0.0;
  double det = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

Matrix LuDecomposition::solve(const Matrix& b) const {
  const std::size_t n = lu_.rows();
  if (b.rows() != n) throw DimensionError("lu solve: right-hand side row mismatch");
  if (singular_) throw NumericalError("lu solve: matrix is singular");
  Matrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    auto xc = x.col(c);
    for (std::size_t i = 0; i < n; ++i) xc[i] = b(perm_[i], c);
    for (std::size_t i = 0; i < n; ++i) {
      double s = xc[i];
      for (std::size_t k = 0; k < i; ++k) s -= lu_(i, k) * xc[k];
      xc[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = xc[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= lu_(i, k) * xc[k];
      xc[i] = s / lu_(i, i);
    }
  }
  return x;
}

double lu_determinant(const Matrix& x) { return LuDecomposition(x).determinant(); }

SymmetricEigen sym_eigen(const Matrix& x) {
  require_square(x, "sym_eigen");
  const std::size_t n = x.rows();
  constexpr int kMaxSweeps = 100;

  Matrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = 0.5 * (x(i, j) + x(j, i));
  Matrix v = Matrix::identity(n);

  // Absolute 1e-12 for unit-scale input; scaled up for large entries where
  // rounding alone keeps the off-diagonal mass above it.
  const double tolerance = 1e-12 * std::max(1.0, frobenius_norm(a));

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < kMaxSweeps && off_norm() >= tolerance; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    std::copy(v.col(order[j]).begin(), v.col(order[j]).end(), out.vectors.col(j).begin());
  }
  return out;
}

Vector sym_eigenvalues(const Matrix& x) { return sym_eigen(x).values; }

Vector dominant_eigenvector(const Matrix& x) {
  SymmetricEigen eig = sym_eigen(x);
  const std::size_t n = eig.values.size();
  if (n == 0) throw DimensionError("dominant_eigenvector: empty matrix");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(eig.values[i]) > std::abs(eig.values[j]);
  });
  if (n > 1) {
    const double top = std::abs(eig.values[order[0]]);
    const double second = std::abs(eig.values[order[1]]);
    if (top - second <= 1e-10 * std::max(1.0, top)) {
      throw DegenerateInput("dominant_eigenvector: largest |eigenvalue| is not simple");
    }
  }

  auto col = eig.vectors.col(order[0]);
  Vector out(col.begin(), col.end());
  const double len = norm2(out);
  for (double& e : out) e /= len;
  for (double e : out) {
    if (std::abs(e) > 1e-12) {
      if (e < 0.0)
        for (double& f : out) f = -f;
      break;
    }
  }
  return out;
}

Matrix matrix_exp(const Matrix& x) {
  require_square(x, "matrix_exp");
  const std::size_t n = x.rows();
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};

  const double norm = one_norm(x);
  int squarings = 0;
  if (norm > 1.0) squarings = static_cast<int>(std::ceil(std::log2(norm)));
  const Matrix a = x * std::ldexp(1.0, -squarings);

  const Matrix id = Matrix::identity(n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u_inner += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Matrix u = a * u_inner;

  Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix result = LuDecomposition(v - u).solve(v + u);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace aicc
