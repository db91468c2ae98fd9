// SPDX-License-Identifier: Apache-2.0
#include "nsfold/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsfold/errors.hpp"

namespace nsfold {

namespace {

void check_square(const SquareMatrix& a, std::size_t n, const char* name) {
  if (a.dim() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " is " + std::to_string(a.dim()) + "x" +
                    std::to_string(a.dim()) + " but the state has dimension " +
                    std::to_string(n));
  }
  if (!a.all_finite()) throw Error(ErrorCode::InvalidArgument, std::string(name) + " has non-finite entries");
}

void check_vector(const Vector& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(n));
  }
  if (!v.all_finite()) throw Error(ErrorCode::InvalidArgument, std::string(name) + " has non-finite entries");
}

void check_mu(double mu) {
  if (!std::isfinite(mu)) throw Error(ErrorCode::InvalidArgument, "mu is not finite");
}

// A_L and A_R must agree outside column 1 for the form to be continuous.
void check_continuity(const SquareMatrix& left, const SquareMatrix& right) {
  const std::size_t n = left.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < n; ++j) {
      const double l = left(i, j);
      const double r = right(i, j);
      if (std::abs(l - r) > 1e-12 * (1.0 + std::max(std::abs(l), std::abs(r)))) {
        throw Error(ErrorCode::InvalidArgument,
                    "A_L and A_R differ at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + "); they may differ only in column 1");
      }
    }
  }
}

bool negligible(double value, double scale) { return std::abs(value) <= 1e-12 * std::max(1.0, scale); }

double sign_of(double v) { return v > 0.0 ? 1.0 : -1.0; }

// The two regular solutions of a continuous pair (map or ODE) classify the
// same way: opposite determinant signs put both on the same side.
BebClass classify_pair(double det_left, double det_right) {
  return (det_left > 0.0) != (det_right > 0.0) ? BebClass::NonsmoothFold : BebClass::Persistence;
}

EquilibriumReport degenerate(std::string reason) {
  EquilibriumReport r;
  r.beb_class = BebClass::Degenerate;
  r.degenerate_reason = std::move(reason);
  return r;
}

// Drops row `skip` of an m x k coefficient block (m = k + 1) and solves the
// remaining square system.
Vector solve_dropping_row(const std::vector<Vector>& rows, const Vector& rhs, std::size_t skip) {
  const std::size_t k = rows.empty() ? 0 : rows.front().size();
  SquareMatrix m(k);
  Vector r(k);
  std::size_t out = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == skip) continue;
    for (std::size_t j = 0; j < k; ++j) m(out, j) = rows[i][j];
    r[out] = rhs[i];
    ++out;
  }
  try {
    return solve(m, r);
  } catch (const Error&) {
    throw Error(ErrorCode::DegenerateForm, "pseudo-equilibrium system is singular");
  }
}

Vector embed_on_manifold(const Vector& y) {
  Vector x(y.size() + 1);
  for (std::size_t i = 0; i < y.size(); ++i) x[i + 1] = y[i];
  return x;
}

Certificate make_certificate(const EquilibriumReport& r, double rate) {
  Certificate c;
  c.direction = sign_of(r.s) * r.adjugate_row;
  c.rate = rate;
  c.det_left = r.det_left;
  c.det_right_or_qc = r.det_right_or_qc;
  return c;
}

void require_fold(const EquilibriumReport& r, const char* what) {
  if (r.beb_class == BebClass::Degenerate) {
    throw Error(ErrorCode::DegenerateForm, std::string(what) + ": " + r.degenerate_reason);
  }
  if (!r.both_virtual()) {
    throw Error(ErrorCode::NotAFold,
                std::string(what) + ": both solutions must be virtual for a divergence certificate");
  }
}

}  // namespace

const char* to_string(Admissibility a) noexcept {
  switch (a) {
    case Admissibility::Admissible: return "Admissible";
    case Admissibility::Virtual: return "Virtual";
    case Admissibility::Boundary: return "Boundary";
  }
  return "?";
}

const char* to_string(SolutionKind k) noexcept {
  switch (k) {
    case SolutionKind::RegularLeft: return "RegularLeft";
    case SolutionKind::RegularRight: return "RegularRight";
    case SolutionKind::Pseudo: return "Pseudo";
  }
  return "?";
}

const char* to_string(BebClass c) noexcept {
  switch (c) {
    case BebClass::Persistence: return "Persistence";
    case BebClass::NonsmoothFold: return "NonsmoothFold";
    case BebClass::Degenerate: return "Degenerate";
  }
  return "?";
}

double boundary_tolerance(double mu) { return 1e-9 * (1.0 + std::abs(mu)); }

Admissibility label_by_sign(double value, bool admissible_if_negative, double mu) {
  if (std::abs(value) <= boundary_tolerance(mu)) return Admissibility::Boundary;
  const bool negative = value < 0.0;
  return negative == admissible_if_negative ? Admissibility::Admissible : Admissibility::Virtual;
}

bool EquilibriumReport::both_virtual() const {
  return solutions.size() == 2 &&
         std::all_of(solutions.begin(), solutions.end(),
                     [](const Solution& s) { return s.admissibility == Admissibility::Virtual; });
}

bool EquilibriumReport::both_admissible() const {
  return solutions.size() == 2 &&
         std::all_of(solutions.begin(), solutions.end(),
                     [](const Solution& s) { return s.admissibility == Admissibility::Admissible; });
}

// ---------------------------------------------------------------------------
// Forms

Vector PwlMap::apply_left(const Vector& x) const { return A_L * x + mu * b; }
Vector PwlMap::apply_right(const Vector& x) const { return A_R * x + mu * b; }
Vector PwlMap::apply(const Vector& x) const { return x[0] <= 0.0 ? apply_left(x) : apply_right(x); }

void PwlMap::validate() const {
  const std::size_t n = b.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty state dimension");
  check_square(A_L, n, "A_L");
  check_square(A_R, n, "A_R");
  check_vector(b, n, "b");
  check_mu(mu);
  check_continuity(A_L, A_R);
}

Vector PwlOde::field_left(const Vector& x) const { return A_L * x + mu * b; }
Vector PwlOde::field_right(const Vector& x) const { return A_R * x + mu * b; }
Vector PwlOde::field(const Vector& x) const { return x[0] <= 0.0 ? field_left(x) : field_right(x); }

void PwlOde::validate() const {
  const std::size_t n = b.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty state dimension");
  check_square(A_L, n, "A_L");
  check_square(A_R, n, "A_R");
  check_vector(b, n, "b");
  check_mu(mu);
  check_continuity(A_L, A_R);
}

Vector FilippovForm::field_left(const Vector& x) const { return A * x + mu * b; }

void FilippovForm::validate() const {
  const std::size_t n = b.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty state dimension");
  check_square(A, n, "A");
  check_vector(b, n, "b");
  check_vector(c, n, "c");
  check_mu(mu);
}

Vector HybridForm::field(const Vector& x) const { return A * x + mu * b; }

double HybridForm::velocity(const Vector& x) const {
  double v = mu * b[0];
  for (std::size_t j = 0; j < dim(); ++j) v += A(0, j) * x[j];
  return v;
}

double HybridForm::acceleration(const Vector& x) const {
  const Vector f = field(x);
  double a = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) a += A(0, j) * f[j];
  return a;
}

double HybridForm::reset_gain() const {
  double k = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) k += A(0, j) * c[j];
  return k;
}

Vector HybridForm::reset(const Vector& x) const { return x + velocity(x) * c; }

Vector HybridForm::sticking_field(const Vector& x) const {
  return field(x) - (acceleration(x) / reset_gain()) * c;
}

void HybridForm::validate() const {
  const std::size_t n = b.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty state dimension");
  check_square(A, n, "A");
  check_vector(b, n, "b");
  check_vector(c, n, "c");
  check_mu(mu);
  if (c[0] != 0.0) throw Error(ErrorCode::InvalidArgument, "hybrid form requires c_1 = 0 exactly");
}

// ---------------------------------------------------------------------------
// Maps

EquilibriumReport map_fixed_points(const PwlMap& m) {
  m.validate();
  const std::size_t n = m.dim();
  const SquareMatrix I = SquareMatrix::identity(n);
  const SquareMatrix left = I - m.A_L;
  const SquareMatrix right = I - m.A_R;

  if (is_singular(left)) return degenerate("det(I - A_L) vanishes");
  if (is_singular(right)) return degenerate("det(I - A_R) vanishes");

  EquilibriumReport r;
  r.det_left = determinant(left);
  r.det_right_or_qc = determinant(right);
  r.adjugate_row = first_row_of_adjugate(left);
  const double pb = dot(r.adjugate_row, m.b);
  r.s = pb * m.mu;

  const Vector rhs = m.mu * m.b;
  Solution xl{solve(left, rhs), SolutionKind::RegularLeft};
  Solution xr{solve(right, rhs), SolutionKind::RegularRight};
  xl.deciding_value = xl.location[0];
  xr.deciding_value = xr.location[0];
  xl.admissibility = label_by_sign(xl.deciding_value, true, m.mu);
  xr.admissibility = label_by_sign(xr.deciding_value, false, m.mu);
  r.solutions = {xl, xr};

  if (negligible(pb, r.adjugate_row.norm() * m.b.norm())) {
    r.beb_class = BebClass::Degenerate;
    r.degenerate_reason = "p^T b vanishes";
  } else {
    r.beb_class = classify_pair(r.det_left, r.det_right_or_qc);
  }
  return r;
}

Certificate map_certificate(const PwlMap& m) {
  const EquilibriumReport r = map_fixed_points(m);
  require_fold(r, "map certificate");
  return make_certificate(r, std::abs(r.s));
}

// ---------------------------------------------------------------------------
// Continuous piecewise-linear ODEs

EquilibriumReport ode_equilibria(const PwlOde& o) {
  o.validate();
  if (is_singular(o.A_L)) return degenerate("det(A_L) vanishes");
  if (is_singular(o.A_R)) return degenerate("det(A_R) vanishes");

  EquilibriumReport r;
  r.det_left = determinant(o.A_L);
  r.det_right_or_qc = determinant(o.A_R);
  r.adjugate_row = first_row_of_adjugate(o.A_L);
  const double qb = dot(r.adjugate_row, o.b);
  r.s = qb * o.mu;

  const Vector rhs = -o.mu * o.b;
  Solution xl{solve(o.A_L, rhs), SolutionKind::RegularLeft};
  Solution xr{solve(o.A_R, rhs), SolutionKind::RegularRight};
  xl.deciding_value = xl.location[0];
  xr.deciding_value = xr.location[0];
  xl.admissibility = label_by_sign(xl.deciding_value, true, o.mu);
  xr.admissibility = label_by_sign(xr.deciding_value, false, o.mu);
  r.solutions = {xl, xr};

  if (negligible(qb, r.adjugate_row.norm() * o.b.norm())) {
    r.beb_class = BebClass::Degenerate;
    r.degenerate_reason = "q^T b vanishes";
  } else {
    r.beb_class = classify_pair(r.det_left, r.det_right_or_qc);
  }
  return r;
}

Certificate ode_certificate(const PwlOde& o) {
  const EquilibriumReport r = ode_equilibria(o);
  require_fold(r, "ODE certificate");
  return make_certificate(r, std::abs(r.s));
}

// ---------------------------------------------------------------------------
// Filippov

Vector filippov_pseudo_equilibrium(const FilippovForm& f) {
  f.validate();
  const std::size_t n = f.dim();
  if (n == 1) return Vector(1);
  // On x = (0, y): f^L = M y + r with M the columns 2..n of A and r = b mu.
  // Numerator of the sliding field: f^L_1 c - c_1 f^L. Its first row is
  // identically zero; rows 2..n are affine in y.
  const Vector r = f.mu * f.b;
  const double c1 = f.c[0];
  std::vector<Vector> rows(n, Vector(n - 1));
  Vector rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j) rows[i][j] = f.c[i] * f.A(0, j + 1) - c1 * f.A(i, j + 1);
    rhs[i] = c1 * r[i] - f.c[i] * r[0];
  }
  return embed_on_manifold(solve_dropping_row(rows, rhs, 0));
}

EquilibriumReport filippov_report(const FilippovForm& f) {
  f.validate();
  if (negligible(f.c[0], f.c.norm())) return degenerate("c_1 vanishes");
  if (is_singular(f.A)) return degenerate("det(A) vanishes");
  const Vector q = first_row_of_adjugate(f.A);
  const double qc = dot(q, f.c);
  if (negligible(qc, q.norm() * f.c.norm())) return degenerate("q^T c vanishes");
  const double qb = dot(q, f.b);

  EquilibriumReport r;
  r.adjugate_row = q;
  r.det_left = determinant(f.A);
  r.det_right_or_qc = qc;
  r.s = qb * f.mu;

  Solution xl{solve(f.A, -f.mu * f.b), SolutionKind::RegularLeft};
  xl.deciding_value = xl.location[0];
  xl.admissibility = label_by_sign(xl.deciding_value, true, f.mu);

  // f^L_1 f^R_1 at the pseudo-equilibrium equals s c_1^2 / q^T c; negative
  // means a sliding region (admissible), positive a crossing region.
  Solution xs{filippov_pseudo_equilibrium(f), SolutionKind::Pseudo};
  xs.deciding_value = r.s * f.c[0] * f.c[0] / qc;
  xs.admissibility = label_by_sign(xs.deciding_value, true, f.mu);
  r.solutions = {xl, xs};

  if (negligible(qb, q.norm() * f.b.norm())) {
    r.beb_class = BebClass::Degenerate;
    r.degenerate_reason = "q^T b vanishes";
  } else {
    r.beb_class = (r.det_left > 0.0) != (qc > 0.0) ? BebClass::NonsmoothFold : BebClass::Persistence;
  }
  return r;
}

Certificate filippov_certificate(const FilippovForm& f) {
  const EquilibriumReport r = filippov_report(f);
  require_fold(r, "Filippov certificate");
  const double sigma = sign_of(r.s);
  const double rate = std::min(std::abs(r.s), sigma * r.det_right_or_qc);
  if (!(rate > 0.0)) throw Error(ErrorCode::NotAFold, "Filippov certificate: sigma q^T c is not positive");
  return make_certificate(r, rate);
}

// ---------------------------------------------------------------------------
// Impacting hybrid systems

Vector hybrid_pseudo_equilibrium(const HybridForm& h) {
  h.validate();
  const std::size_t n = h.dim();
  if (n == 1) return Vector(1);
  // Zero of kappa f - a c on x = (0, y), kappa = e_1^T A c, a = a_1^T f with
  // a_1 the first row of A. The rows are dependent through a_1, so the row
  // with the largest |a_1i| is dropped.
  const double kappa = h.reset_gain();
  const Vector r = h.mu * h.b;
  const Vector a1 = h.A.row(0);
  double a1r = dot(a1, r);
  Vector a1M(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a1M[j] += a1[i] * h.A(i, j + 1);

  std::vector<Vector> rows(n, Vector(n - 1));
  Vector rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j) rows[i][j] = kappa * h.A(i, j + 1) - h.c[i] * a1M[j];
    rhs[i] = h.c[i] * a1r - kappa * r[i];
  }
  std::size_t skip = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(a1[i]) > std::abs(a1[skip])) skip = i;
  return embed_on_manifold(solve_dropping_row(rows, rhs, skip));
}

EquilibriumReport hybrid_report(const HybridForm& h) {
  h.validate();
  const double kappa = h.reset_gain();
  if (!(kappa < -1.0)) {
    throw Error(ErrorCode::InvalidResetLaw,
                "reset law needs e_1^T A c < -1 to map incoming to outgoing states (got " +
                    std::to_string(kappa) + ")");
  }
  if (is_singular(h.A)) return degenerate("det(A) vanishes");
  const Vector q = first_row_of_adjugate(h.A);
  const double qc = dot(q, h.c);
  if (negligible(qc, q.norm() * h.c.norm())) return degenerate("q^T c vanishes");
  const double qb = dot(q, h.b);

  EquilibriumReport r;
  r.adjugate_row = q;
  r.det_left = determinant(h.A);
  r.det_right_or_qc = qc;
  r.s = qb * h.mu;

  Solution xl{solve(h.A, -h.mu * h.b), SolutionKind::RegularLeft};
  xl.deciding_value = xl.location[0];
  xl.admissibility = label_by_sign(xl.deciding_value, true, h.mu);

  // a(x^St) = e_1^T A c s / q^T c: positive is a sticking region.
  Solution xst{hybrid_pseudo_equilibrium(h), SolutionKind::Pseudo};
  xst.deciding_value = kappa * r.s / qc;
  xst.admissibility = label_by_sign(xst.deciding_value, false, h.mu);
  r.solutions = {xl, xst};

  if (negligible(qb, q.norm() * h.b.norm())) {
    r.beb_class = BebClass::Degenerate;
    r.degenerate_reason = "q^T b vanishes";
  } else {
    r.beb_class = (r.det_left > 0.0) != (qc > 0.0) ? BebClass::NonsmoothFold : BebClass::Persistence;
  }
  return r;
}

Certificate hybrid_certificate(const HybridForm& h) {
  const EquilibriumReport r = hybrid_report(h);
  require_fold(r, "hybrid certificate");
  return make_certificate(r, std::abs(r.s));
}

}  // namespace nsfold
