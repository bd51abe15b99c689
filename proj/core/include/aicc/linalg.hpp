#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace aicc {

using Vector = std::vector<double>;

/// Dense real matrix stored column-major, so vec() is a flat copy.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> col_major);

  /// Builds a matrix from row literals: from_rows({{1, 2}, {3, 4}}).
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * rows_]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  Matrix transpose() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  /// this += s * other
  void add_scaled(const Matrix& other, double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

/// y = A x
Vector matvec(const Matrix& a, std::span<const double> x);
/// y = A^T x
Vector matvec_transposed(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double trace(const Matrix& x);

/// Column-stacking vectorization: entry (i + j*rows) is x(i, j).
Vector vec(const Matrix& x);
/// Inverse of vec for the given shape.
Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols);

/// x^p by repeated left-to-right multiplication; x^0 is the identity.
Matrix mat_pow(const Matrix& x, unsigned p);
/// All powers x^0 .. x^max_power, each one product away from the previous.
std::vector<Matrix> mat_powers(const Matrix& x, unsigned max_power);

double frobenius_norm(const Matrix& x);

/// Largest singular value via power iteration on X^T X.
double operator_norm(const Matrix& x);

/// Maximum absolute column sum.
double one_norm(const Matrix& x);

/// LU factorization with partial pivoting (PA = LU, L unit lower, packed).
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a);

  double determinant() const noexcept;
  bool singular() const noexcept { return singular_; }
  /// Solves A X = B. Throws NumericalError when A is singular.
  Matrix solve(const Matrix& b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

double lu_determinant(const Matrix& x);

struct SymmetricEigen {
  Vector values;   ///< ascending
  Matrix vectors;  ///< column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition of the symmetric part of x.
SymmetricEigen sym_eigen(const Matrix& x);
Vector sym_eigenvalues(const Matrix& x);

/// Unit eigenvector of the largest-|lambda| eigenvalue, with the first
/// component of magnitude above 1e-12 made positive. Throws DegenerateInput
/// when the two largest |lambda| coincide within 1e-10.
Vector dominant_eigenvector(const Matrix& x);

/// e^x via scaling and squaring around a degree-13 Pade approximant.
Matrix matrix_exp(const Matrix& x);

}  // namespace aicc
