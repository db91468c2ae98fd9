// SPDX-License-Identifier: Apache-2.0
//
// The four truncated normal forms at a boundary-equilibrium or
// border-collision bifurcation, their equilibria and pseudo-equilibria, and
// the monotone-direction certificates that prove divergence when both
// solutions are virtual.
//
// Conventions shared by every form:
//   * the switching manifold is x_1 = 0 (index 0 here);
//   * q (or p) is the first row of an adjugate, s = q^T b mu;
//   * a certificate direction is sign(s) * q, so certificate rates are
//     always positive.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsfold/linalg.hpp"

namespace nsfold {

/// Continuous piecewise-linear map g(x) = A_L x + b mu (x_1 <= 0),
/// A_R x + b mu (x_1 >= 0). A_L and A_R differ only in column 1.
struct PwlMap {
  SquareMatrix A_L;
  SquareMatrix A_R;
  Vector b;
  double mu = 0.0;

  std::size_t dim() const { return b.size(); }
  Vector apply(const Vector& x) const;
  Vector apply_left(const Vector& x) const;
  Vector apply_right(const Vector& x) const;
  // Throws DimensionMismatch / InvalidArgument on a malformed form.
  void validate() const;
};

/// Continuous piecewise-linear ODE x' = A_L x + b mu (x_1 <= 0),
/// A_R x + b mu (x_1 >= 0).
struct PwlOde {
  SquareMatrix A_L;
  SquareMatrix A_R;
  Vector b;
  double mu = 0.0;

  std::size_t dim() const { return b.size(); }
  Vector field(const Vector& x) const;
  Vector field_left(const Vector& x) const;
  Vector field_right(const Vector& x) const;
  void validate() const;
};

/// Filippov truncated form x' = A x + b mu (x_1 < 0), x' = c (x_1 > 0).
struct FilippovForm {
  SquareMatrix A;
  Vector b;
  Vector c;
  double mu = 0.0;

  std::size_t dim() const { return b.size(); }
  Vector field_left(const Vector& x) const;
  const Vector& field_right() const { return c; }
  void validate() const;
};

/// Impacting hybrid truncated form: x' = A x + b mu in x_1 < 0, reset
/// x -> x + v(x) c on x_1 = 0 with v(x) = e_1^T (A x + b mu) and c_1 = 0.
struct HybridForm {
  SquareMatrix A;
  Vector b;
  Vector c;
  double mu = 0.0;

  std::size_t dim() const { return b.size(); }
  Vector field(const Vector& x) const;
  double velocity(const Vector& x) const;      // v(x)
  double acceleration(const Vector& x) const;  // a(x) = e_1^T A f(x)
  double reset_gain() const;                   // e_1^T A c
  Vector reset(const Vector& x) const;         // x + v(x) c
  Vector sticking_field(const Vector& x) const;
  void validate() const;
};

enum class Admissibility { Admissible, Virtual, Boundary };
enum class SolutionKind { RegularLeft, RegularRight, Pseudo };
enum class BebClass { Persistence, NonsmoothFold, Degenerate };

const char* to_string(Admissibility a) noexcept;
const char* to_string(SolutionKind k) noexcept;
const char* to_string(BebClass c) noexcept;

struct Solution {
  Vector location;
  SolutionKind kind = SolutionKind::RegularLeft;
  Admissibility admissibility = Admissibility::Boundary;
  // The signed quantity the label was read from (x_1, or the sliding /
  // sticking sign witness for pseudo-equilibria).
  double deciding_value = 0.0;
};

struct EquilibriumReport {
  std::vector<Solution> solutions;
  BebClass beb_class = BebClass::Degenerate;
  // Set when beb_class == Degenerate.
  std::string degenerate_reason;
  // s = q^T b mu (or p^T b mu for maps).
  double s = 0.0;
  // det(I - A_L) / det(A_L) / det(A).
  double det_left = 0.0;
  // det(I - A_R) / det(A_R) / q^T c.
  double det_right_or_qc = 0.0;
  // First row of the relevant adjugate (p or q).
  Vector adjugate_row;

  bool both_virtual() const;
  bool both_admissible() const;
};

struct Certificate {
  Vector direction;  // w
  double rate = 0.0; // guaranteed increase of w^T x per iterate / unit time
  double det_left = 0.0;
  double det_right_or_qc = 0.0;
};

/// Labels a signed quantity: Admissible when admissible_if_negative matches
/// its sign, Boundary within 1e-9 (1 + |mu|) of zero.
Admissibility label_by_sign(double value, bool admissible_if_negative, double mu);
double boundary_tolerance(double mu);

EquilibriumReport map_fixed_points(const PwlMap& m);
Certificate map_certificate(const PwlMap& m);

EquilibriumReport ode_equilibria(const PwlOde& o);
Certificate ode_certificate(const PwlOde& o);

/// Pseudo-equilibrium of the sliding field on x_1 = 0, from the affine
/// numerator restricted to the manifold. Throws DegenerateForm if singular.
Vector filippov_pseudo_equilibrium(const FilippovForm& f);
EquilibriumReport filippov_report(const FilippovForm& f);
Certificate filippov_certificate(const FilippovForm& f);

/// Zero of the sticking field on x_1 = 0, v = 0.
Vector hybrid_pseudo_equilibrium(const HybridForm& h);
EquilibriumReport hybrid_report(const HybridForm& h);
Certificate hybrid_certificate(const HybridForm& h);

}  // namespace nsfold
