// SPDX-License-Identifier: Apache-2.0
#include "nsfold/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nsfold/errors.hpp"

namespace nsfold {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) +
                    " does not match " + std::to_string(b));
  }
}

// In-place LU factorization with partial pivoting (Doolittle, row-major).
// Returns the permutation sign, or 0 when an exact zero pivot is met.
struct LuFactors {
  std::size_t n = 0;
  std::vector<double> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool exact_zero_pivot = false;
};

LuFactors lu_factor(const SquareMatrix& a) {
  LuFactors f;
  f.n = a.dim();
  f.lu.assign(a.row_major().begin(), a.row_major().end());
  f.perm.resize(f.n);
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  const std::size_t n = f.n;
  auto at = [&](std::size_t i, std::size_t j) -> double& { return f.lu[i * n + j]; };

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        piv = i;
      }
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    if (at(k, k) == 0.0) {
      f.exact_zero_pivot = true;
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = at(i, k) / at(k, k);
      at(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= m * at(k, j);
    }
  }
  return f;
}

double lu_determinant(const LuFactors& f) {
  if (f.exact_zero_pivot) return 0.0;
  double d = f.sign;
  for (std::size_t k = 0; k < f.n; ++k) d *= f.lu[k * f.n + k];
  return d;
}

Vector lu_solve(const LuFactors& f, const Vector& rhs) {
  const std::size_t n = f.n;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu[i * n + j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu[ii * n + j] * x[j];
    x[ii] = s / f.lu[ii * n + ii];
  }
  return x;
}

// Determinant of A with row r and column c removed, without materializing
// recursion: small minors go through the same LU path.
double minor_determinant(const SquareMatrix& a, std::size_t r, std::size_t c) {
  if (a.dim() == 1) return 1.0;
  return determinant(a.minor_matrix(r, c));
}

SquareMatrix cofactor_adjugate(const SquareMatrix& a) {
  const std::size_t n = a.dim();
  SquareMatrix adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double m = minor_determinant(a, j, i);
      adj(i, j) = ((i + j) % 2 == 0) ? m : -m;
    }
  }
  return adj;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::NotAFold: return "NotAFold";
    case ErrorCode::InvalidResetLaw: return "InvalidResetLaw";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::ChatterBudgetExceeded: return "ChatterBudgetExceeded";
    case ErrorCode::RepellingSliding: return "RepellingSliding";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Vector

Vector Vector::unit(std::size_t n, std::size_t i) {
  Vector e(n);
  e[i] = 1.0;
  return e;
}

bool Vector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Vector::norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Vector::norm_max() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Vector& Vector::operator+=(const Vector& o) {
  require_same_size(size(), o.size(), "vector +");
  for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& o) {
  require_same_size(size(), o.size(), "vector -");
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator-(Vector a) { return a *= -1.0; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// SquareMatrix

SquareMatrix::SquareMatrix(std::size_t n, double fill) : n_(n), a_(n * n, fill) {}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()) {
  a_.reserve(n_ * n_);
  for (const auto& r : rows) {
    require_same_size(r.size(), n_, "matrix row");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  SquareMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_same_size(rows[i].size(), rows.size(), "matrix row");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<std::vector<double>> SquareMatrix::rows() const {
  std::vector<std::vector<double>> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    out[i].assign(a_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                  a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
  return out;
}

bool SquareMatrix::all_finite() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

double SquareMatrix::norm_max() const noexcept {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

Vector SquareMatrix::row(std::size_t i) const {
  Vector r(n_);
  for (std::size_t j = 0; j < n_; ++j) r[j] = (*this)(i, j);
  return r;
}

Vector SquareMatrix::column(std::size_t j) const {
  Vector c(n_);
  for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
  return c;
}

void SquareMatrix::set_column(std::size_t j, const Vector& v) {
  require_same_size(v.size(), n_, "set_column");
  for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = v[i];
}

SquareMatrix SquareMatrix::minor_matrix(std::size_t skip_row, std::size_t skip_col) const {
  SquareMatrix m(n_ - 1);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (i == skip_row) continue;
    std::size_t c = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == skip_col) continue;
      m(r, c++) = (*this)(i, j);
    }
    ++r;
  }
  return m;
}

SquareMatrix SquareMatrix::transposed() const {
  SquareMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b) {
  require_same_size(a.dim(), b.dim(), "matrix +");
  SquareMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
  require_same_size(a.dim(), b.dim(), "matrix -");
  SquareMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
  require_same_size(a.dim(), b.dim(), "matrix *");
  const std::size_t n = a.dim();
  SquareMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SquareMatrix operator*(double s, SquareMatrix a) {
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) a(i, j) *= s;
  return a;
}

Vector operator*(const SquareMatrix& a, const Vector& x) {
  require_same_size(a.dim(), x.size(), "matrix-vector");
  Vector y(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vector left_multiply(const Vector& v, const SquareMatrix& a) {
  require_same_size(a.dim(), v.size(), "vector-matrix");
  Vector y(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) y[j] += v[i] * a(i, j);
  return y;
}

SquareMatrix rank_one_update(const SquareMatrix& a, const Vector& u, const Vector& v) {
  require_same_size(a.dim(), u.size(), "rank-one update");
  require_same_size(a.dim(), v.size(), "rank-one update");
  SquareMatrix c = a;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) += u[i] * v[j];
  return c;
}

// ---------------------------------------------------------------------------
// Determinant, adjugate, solve

double determinant(const SquareMatrix& a) {
  const std::size_t n = a.dim();
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return lu_determinant(lu_factor(a));
}

double singularity_tolerance(const SquareMatrix& a) {
  const double scale = std::max(1.0, a.norm_max());
  return 1e-12 * std::pow(scale, static_cast<double>(a.dim()));
}

bool is_singular(const SquareMatrix& a) {
  return std::abs(determinant(a)) <= singularity_tolerance(a);
}

SquareMatrix adjugate(const SquareMatrix& a) {
  const std::size_t n = a.dim();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "adjugate of an empty matrix");
  if (n == 1) return SquareMatrix::identity(1);
  if (n <= 4) return cofactor_adjugate(a);

  const LuFactors f = lu_factor(a);
  const double det = lu_determinant(f);
  if (std::abs(det) <= singularity_tolerance(a) * 1e3) return cofactor_adjugate(a);
  SquareMatrix adj(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector col = lu_solve(f, Vector::unit(n, j));
    for (std::size_t i = 0; i < n; ++i) adj(i, j) = det * col[i];
  }
  return adj;
}

Vector first_row_of_adjugate(const SquareMatrix& a) {
  const std::size_t n = a.dim();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "adjugate of an empty matrix");
  Vector row(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double m = minor_determinant(a, j, 0);
    row[j] = (j % 2 == 0) ? m : -m;
  }
  return row;
}

Vector solve(const SquareMatrix& a, const Vector& rhs) {
  require_same_size(a.dim(), rhs.size(), "solve");
  const LuFactors f = lu_factor(a);
  const double det = lu_determinant(f);
  if (std::abs(det) <= singularity_tolerance(a)) {
    throw Error(ErrorCode::SingularMatrix,
                "matrix is singular to tolerance (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  Vector x = lu_solve(f, rhs);
  // One step of iterative refinement.
  const Vector r = rhs - a * x;
  x += lu_solve(f, r);
  return x;
}

}  // namespace nsfold
