// SPDX-License-Identifier: Apache-2.0
//
// Small dense real linear algebra. Every truncated form in this library is a
// handful of n x n matrices with n rarely above 6, so everything is stored
// row-major in a std::vector and computed directly.
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nsfold {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector unit(std::size_t n, std::size_t i);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& std_vector() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept;
  double norm() const noexcept;      // Euclidean
  double norm_max() const noexcept;

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  Vector& operator*=(double s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);
Vector operator-(Vector a);
double dot(const Vector& a, const Vector& b);

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0);
  // Row-major rows; throws DimensionMismatch unless the rows form a square.
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);
  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static SquareMatrix identity(std::size_t n);

  std::size_t dim() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::span<const double> row_major() const noexcept { return a_; }
  std::vector<std::vector<double>> rows() const;

  bool all_finite() const noexcept;
  double norm_max() const noexcept;

  Vector row(std::size_t i) const;
  Vector column(std::size_t j) const;
  void set_column(std::size_t j, const Vector& v);
  // Matrix with row `skip_row` and column `skip_col` removed.
  SquareMatrix minor_matrix(std::size_t skip_row, std::size_t skip_col) const;
  SquareMatrix transposed() const;

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b);
SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b);
SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);
SquareMatrix operator*(double s, SquareMatrix a);
Vector operator*(const SquareMatrix& a, const Vector& x);
// Row vector times matrix: returns (v^T A)^T.
Vector left_multiply(const Vector& v, const SquareMatrix& a);
// a + u v^T
SquareMatrix rank_one_update(const SquareMatrix& a, const Vector& u, const Vector& v);

/// Determinant by Gaussian elimination with partial pivoting.
double determinant(const SquareMatrix& a);

/// adj(A)_{ij} = (-1)^{i+j} m_{ji}, where m_{ji} is the minor with row j and
/// column i deleted. Satisfies A adj(A) = adj(A) A = det(A) I for every finite
/// A, including singular ones. Cofactor expansion for n <= 4; above that the
/// LU inverse scaled by det(A), falling back to cofactors near singularity.
SquareMatrix adjugate(const SquareMatrix& a);

/// e_1^T adj(A). Built only from minors that delete column 1, so the result
/// does not depend on the first column of A at all.
Vector first_row_of_adjugate(const SquareMatrix& a);

/// Scale-aware singularity threshold 1e-12 * max(1, |A|_max)^n.
double singularity_tolerance(const SquareMatrix& a);
bool is_singular(const SquareMatrix& a);

/// Solves A x = rhs. Throws SingularMatrix when |det(A)| is below
/// singularity_tolerance(A).
Vector solve(const SquareMatrix& a, const Vector& rhs);

}  // namespace nsfold
