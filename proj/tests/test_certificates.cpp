// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "helpers.hpp"
#include "nsfold/certificates.hpp"
#include "nsfold/models.hpp"

using namespace nsfold;
using th::M;
using th::V;

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

double dot_std(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

oracle::Mat i_minus(const oracle::Mat& a) {
  oracle::Mat r = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) r[i][j] = (i == j) - a[i][j];
  return r;
}

oracle::Mat with_first_column(oracle::Mat a, const std::vector<double>& col) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i][0] = col[i];
  return a;
}

// Pseudo-equilibrium on x_1 = 0 where A x + b mu is parallel to c.
std::vector<double> pseudo_oracle(const oracle::Mat& a, const std::vector<double>& b, const std::vector<double>& c,
                                  double mu) {
  const auto q = oracle::adjugate(a)[0];
  const double lambda = dot_std(q, b) * mu / dot_std(q, c);
  std::vector<double> rhs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = lambda * c[i] - b[i] * mu;
  return oracle::cramer(a, rhs);
}

Vector random_in_ball(std::mt19937_64& rng, std::size_t n, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(n);
  do {
    for (auto& v : x) v = radius * u(rng);
  } while (x.norm() > radius);
  return x;
}

}  // namespace

// --- maps -----------------------------------------------------------------

TEST_CASE("example map fixed points at mu = 1 and mu = -1") {
  const PwlMap m = example_map({1.2, -2.4, 0.1}, 1.0);
  const EquilibriumReport r = map_fixed_points(m);
  REQUIRE(r.solutions.size() == 2);
  CHECK(th::max_diff(r.solutions[0].location, {10.0, -12.0}) <= 1e-11);
  CHECK(th::max_diff(r.solutions[1].location, {-10.0, -24.0}) <= 1e-11);
  CHECK(r.solutions[0].admissibility == Admissibility::Virtual);
  CHECK(r.solutions[1].admissibility == Admissibility::Virtual);
  CHECK(r.beb_class == BebClass::NonsmoothFold);

  const EquilibriumReport rn = map_fixed_points(example_map({1.2, -2.4, 0.1}, -1.0));
  CHECK(rn.both_admissible());
  CHECK(rn.beb_class == BebClass::NonsmoothFold);
  CHECK(th::code_of([] { map_certificate(example_map({1.2, -2.4, 0.1}, -1.0)); }) == ErrorCode::NotAFold);
}

TEST_CASE("example map at mu = 0 sits on the boundary") {
  const EquilibriumReport r = map_fixed_points(example_map({1.2, -2.4, 0.1}, 0.0));
  for (const auto& s : r.solutions) {
    CHECK(s.location.norm() == 0.0);
    CHECK(s.admissibility == Admissibility::Boundary);
  }
}

TEST_CASE("example map certificate is w = (1,1), rate 1") {
  const Certificate c = map_certificate(example_map({1.2, -2.4, 0.1}, 1.0));
  CHECK(c.direction == Vector{1.0, 1.0});
  CHECK(c.rate == 1.0);
}

TEST_CASE("3D normal form certificate") {
  const Certificate c = map_certificate(bcnf3d({0.0, 0.0, 0.5, 1.0, 1.0, 1.5}, 1.0));
  CHECK(th::max_diff(c.direction, {1.0, 1.0, 1.0}) <= 1e-14);
  CHECK(c.rate == doctest::Approx(1.0));
  CHECK(c.det_left > 0.0);
  CHECK(c.det_right_or_qc < 0.0);
}

TEST_CASE("map classification agrees with determinant signs") {
  std::mt19937_64 rng(21);
  int folds = 0, persist = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const auto al = oracle::random_matrix(rng, n, -1.5, 1.5);
    const auto ar = with_first_column(al, oracle::random_vector(rng, n, -1.5, 1.5));
    const auto b = oracle::random_vector(rng, n);
    const double dl = oracle::det(i_minus(al)), dr = oracle::det(i_minus(ar));
    const double pb = dot_std(oracle::adjugate(i_minus(al))[0], b);
    if (std::abs(dl) < 1e-3 || std::abs(dr) < 1e-3 || std::abs(pb) < 1e-3) continue;
    const EquilibriumReport r = map_fixed_points(PwlMap{M(al), M(ar), V(b), 0.7});
    const bool fold = dl * dr < 0.0;
    CHECK(r.beb_class == (fold ? BebClass::NonsmoothFold : BebClass::Persistence));
    fold ? ++folds : ++persist;
    // Fixed points against Cramer's rule.
    std::vector<double> bmu(b);
    for (auto& v : bmu) v *= 0.7;
    CHECK(th::max_diff(r.solutions[0].location, oracle::cramer(i_minus(al), bmu)) <= 1e-8);
    CHECK(th::max_diff(r.solutions[1].location, oracle::cramer(i_minus(ar), bmu)) <= 1e-8);
  }
  CHECK(folds > 20);
  CHECK(persist > 20);
}

TEST_CASE("map certificate inequality on states in a ball of radius 1e3") {
  std::mt19937_64 rng(22);
  int built = 0;
  while (built < 40) {
    const std::size_t n = 2 + built % 3;
    const auto al = oracle::random_matrix(rng, n, -1.5, 1.5);
    const auto ar = with_first_column(al, oracle::random_vector(rng, n, -1.5, 1.5));
    const auto b = oracle::random_vector(rng, n);
    const double dl = oracle::det(i_minus(al)), dr = oracle::det(i_minus(ar));
    const double pb = dot_std(oracle::adjugate(i_minus(al))[0], b);
    if (!(dl * dr < 0.0) || std::abs(pb) < 0.05) continue;
    const double mu = sgn(dl) * sgn(pb) * 0.3;  // makes p^T b mu share the sign of det(I - A_L)
    const PwlMap m{M(al), M(ar), V(b), mu};
    REQUIRE(map_fixed_points(m).both_virtual());
    const Certificate c = map_certificate(m);
    CHECK(c.rate == doctest::Approx(std::abs(pb * mu)));
    for (int k = 0; k < 10'000 / 40; ++k) {
      const Vector x = random_in_ball(rng, n, 1e3);
      CHECK(dot(c.direction, m.apply(x)) - dot(c.direction, x) >= c.rate - 1e-9);
    }
    ++built;
  }
}

TEST_CASE("degenerate maps") {
  // I - A_L singular.
  const PwlMap m{SquareMatrix{{1.0, 0.0}, {0.0, 0.5}}, SquareMatrix{{2.0, 0.0}, {0.0, 0.5}}, Vector{1.0, 0.0}, 1.0};
  const EquilibriumReport r = map_fixed_points(m);
  CHECK(r.beb_class == BebClass::Degenerate);
  CHECK_FALSE(r.degenerate_reason.empty());
  CHECK(th::code_of([&] { map_certificate(m); }) == ErrorCode::DegenerateForm);
  // p^T b = 0.
  const PwlMap m2{SquareMatrix{{0.5, 0.0}, {0.0, 0.5}}, SquareMatrix{{2.0, 0.0}, {0.0, 0.5}}, Vector{0.0, 1.0}, 1.0};
  CHECK(map_fixed_points(m2).beb_class == BebClass::Degenerate);
}

TEST_CASE("continuity is enforced on maps") {
  const PwlMap m{SquareMatrix{{0.5, 1.0}, {0.0, 0.5}}, SquareMatrix{{2.0, 0.0}, {0.0, 0.5}}, Vector{1.0, 0.0}, 1.0};
  CHECK(th::code_of([&] { map_fixed_points(m); }) == ErrorCode::InvalidArgument);
}

// --- ODEs -----------------------------------------------------------------

TEST_CASE("ODE with identical pieces: persistence") {
  const SquareMatrix a = -1.0 * SquareMatrix::identity(3);
  const EquilibriumReport r = ode_equilibria(PwlOde{a, a, Vector::unit(3, 0), 1.0});
  CHECK(th::max_diff(r.solutions[0].location, {1.0, 0.0, 0.0}) <= 1e-15);
  CHECK(r.solutions[0].admissibility == Admissibility::Virtual);
  CHECK(r.solutions[1].admissibility == Admissibility::Admissible);
  CHECK(r.beb_class == BebClass::Persistence);
}

TEST_CASE("planar ODE fold and its certificate") {
  const SquareMatrix al{{1.0, 0.0}, {0.0, -1.0}}, ar{{-1.0, 0.0}, {0.0, -1.0}};
  const PwlOde o{al, ar, Vector{1.0, 0.0}, 1.0};
  const EquilibriumReport r = ode_equilibria(o);
  CHECK(th::max_diff(r.solutions[0].location, {-1.0, 0.0}) <= 1e-15);
  CHECK(th::max_diff(r.solutions[1].location, {1.0, 0.0}) <= 1e-15);
  CHECK(r.both_admissible());
  CHECK(r.beb_class == BebClass::NonsmoothFold);
  CHECK(th::code_of([&] { ode_certificate(o); }) == ErrorCode::NotAFold);

  const PwlOde flipped{al, ar, Vector{1.0, 0.0}, -1.0};
  CHECK(ode_equilibria(flipped).both_virtual());
  const Certificate c = ode_certificate(flipped);
  // q = (-1, 0), s = q^T b mu = 1.
  CHECK(c.direction == Vector{-1.0, 0.0});
  CHECK(c.rate == 1.0);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 1000; ++k) {
    const Vector x = random_in_ball(rng, 2, 1e3);
    CHECK(dot(c.direction, flipped.field(x)) >= c.rate - 1e-9);
  }
}

TEST_CASE("random 4D ODE folds") {
  std::mt19937_64 rng(32);
  int built = 0;
  while (built < 20) {
    const auto al = oracle::random_matrix(rng, 4);
    const auto ar = with_first_column(al, oracle::random_vector(rng, 4));
    const double dl = oracle::det(al), dr = oracle::det(ar);
    if (!(dl < -1e-2 && dr > 1e-2)) continue;
    const auto b = oracle::random_vector(rng, 4);
    const double qb = dot_std(oracle::adjugate(al)[0], b);
    if (std::abs(qb) < 0.05) continue;
    const double mu = sgn(qb) * 0.5;  // q^T b mu > 0
    const PwlOde o{M(al), M(ar), V(b), mu};
    const Certificate c = ode_certificate(o);
    CHECK(c.rate == doctest::Approx(qb * mu));
    for (int k = 0; k < 250; ++k) {
      const Vector x = random_in_ball(rng, 4, 1e3);
      CHECK(dot(c.direction, o.field(x)) >= c.rate - 1e-9);
    }
    ++built;
  }
}

// --- Filippov -------------------------------------------------------------

TEST_CASE("Filippov reference instance") {
  // A = -I, b = e_1, c = (-1, 1), mu = 1: q = (-1, 0), s = -1, q^T c = 1.
  const FilippovForm f{SquareMatrix{{-1.0, 0.0}, {0.0, -1.0}}, Vector{1.0, 0.0}, Vector{-1.0, 1.0}, 1.0};
  const EquilibriumReport r = filippov_report(f);
  CHECK(r.s == -1.0);
  CHECK(r.det_right_or_qc == 1.0);
  CHECK(th::max_diff(r.solutions[0].location, {1.0, 0.0}) <= 1e-15);
  CHECK(r.solutions[0].admissibility == Admissibility::Virtual);
  // Brute force: f^L_1 f^R_1 at x^S = (0, 1) is 1 * (-1) < 0, so sliding.
  const Vector xs = r.solutions[1].location;
  CHECK(th::max_diff(xs, {0.0, 1.0}) <= 1e-15);
  CHECK(f.field_left(xs)[0] * f.c[0] < 0.0);
  CHECK(r.solutions[1].admissibility == Admissibility::Admissible);
  CHECK(r.beb_class == BebClass::Persistence);
  CHECK(th::code_of([&] { filippov_certificate(f); }) == ErrorCode::NotAFold);
}

TEST_CASE("Filippov degenerate inputs") {
  const SquareMatrix a{{-1.0, 0.0}, {0.0, -1.0}};
  CHECK(filippov_report(FilippovForm{a, Vector{1.0, 0.0}, Vector{0.0, 1.0}, 1.0}).beb_class == BebClass::Degenerate);
  CHECK(th::code_of([&] { filippov_certificate(FilippovForm{a, Vector{1.0, 0.0}, Vector{0.0, 1.0}, 1.0}); }) ==
        ErrorCode::DegenerateForm);
  const EquilibriumReport r0 = filippov_report(FilippovForm{a, Vector{1.0, 0.0}, Vector{-1.0, 1.0}, 0.0});
  for (const auto& s : r0.solutions) CHECK(s.admissibility == Admissibility::Boundary);
}

namespace {

struct FilippovCase {
  oracle::Mat a;
  std::vector<double> b, c;
  double mu;
};

FilippovCase random_filippov_fold(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    const auto a = oracle::random_matrix(rng, n);
    const double d = oracle::det(a);
    const auto b = oracle::random_vector(rng, n), c = oracle::random_vector(rng, n);
    const auto q = oracle::adjugate(a)[0];
    const double qb = dot_std(q, b), qc = dot_std(q, c);
    if (std::abs(d) < 1e-2 || std::abs(c[0]) < 0.1 || std::abs(qb) < 0.1 || !(d * qc < 0.0) || std::abs(qc) < 0.05)
      continue;
    return {a, b, c, -sgn(d) / qb};
  }
}

}  // namespace

TEST_CASE("Filippov folds: pseudo-equilibrium, labels and certificate") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 2 + k % 3;
    const FilippovCase fc = random_filippov_fold(rng, n);
    const FilippovForm f{M(fc.a), V(fc.b), V(fc.c), fc.mu};
    const EquilibriumReport r = filippov_report(f);
    REQUIRE(r.beb_class == BebClass::NonsmoothFold);
    CHECK(r.both_virtual());
    const Vector xs = r.solutions[1].location;
    CHECK(xs[0] == 0.0);
    CHECK(th::max_diff(xs, pseudo_oracle(fc.a, fc.b, fc.c, fc.mu)) <= 1e-9);
    // Virtual pseudo-equilibrium: crossing, f^L_1 f^R_1 > 0.
    CHECK(f.field_left(xs)[0] * f.c[0] > 0.0);

    const Certificate c = filippov_certificate(f);
    CHECK(c.rate == doctest::Approx(std::min(1.0, std::abs(dot(r.adjugate_row, f.c)))));
    for (int j = 0; j < 250; ++j) {
      Vector x = random_in_ball(rng, n, 1e3);
      x[0] = -std::abs(x[0]);
      CHECK(dot(c.direction, f.field_left(x)) >= std::abs(r.s) - 1e-9);
      CHECK(dot(c.direction, f.c) >= c.rate - 1e-12);
    }
  }
}

TEST_CASE("Filippov pseudo-equilibrium of an admissible sliding instance is a zero of the sliding field") {
  std::mt19937_64 rng(42);
  int checked = 0;
  while (checked < 30) {
    const std::size_t n = 2 + checked % 3;
    const auto a = oracle::random_matrix(rng, n);
    const auto b = oracle::random_vector(rng, n), c = oracle::random_vector(rng, n);
    if (std::abs(oracle::det(a)) < 1e-2 || std::abs(c[0]) < 0.1) continue;
    const FilippovForm f{M(a), V(b), V(c), 0.8};
    const EquilibriumReport r = filippov_report(f);
    if (r.beb_class == BebClass::Degenerate) continue;
    const Vector xs = r.solutions[1].location;
    const Vector fl = f.field_left(xs);
    const double nl = fl[0], nr = f.c[0];
    if (std::abs(nl - nr) < 1e-3) continue;
    const Vector fs = (1.0 / (nl - nr)) * (nl * f.c - nr * fl);
    CHECK(fs.norm() <= 1e-9);
    // Label from the sign of f^L_1 f^R_1 at x^S.
    CHECK((r.solutions[1].admissibility == Admissibility::Admissible) == (nl * nr < 0.0));
    ++checked;
  }
}

// --- hybrid ---------------------------------------------------------------

TEST_CASE("hybrid reference instance") {
  const SquareMatrix a{{0.0, 1.0}, {1.0, 0.0}};
  const HybridForm h{a, Vector{0.0, 1.0}, Vector{0.0, -1.5}, -1.0};
  CHECK(h.reset_gain() == -1.5);
  const EquilibriumReport r = hybrid_report(h);
  CHECK(r.s == 1.0);
  CHECK(r.solutions[0].location[0] == doctest::Approx(1.0));
  CHECK(r.solutions[0].admissibility == Admissibility::Virtual);
  CHECK(r.solutions[1].deciding_value == doctest::Approx(-1.0));
  CHECK(r.solutions[1].admissibility == Admissibility::Virtual);
  CHECK(r.beb_class == BebClass::NonsmoothFold);
  const Vector xst = r.solutions[1].location;
  CHECK(xst[0] == 0.0);
  CHECK(h.sticking_field(xst).norm() <= 1e-12);
  CHECK(h.velocity(xst) == doctest::Approx(0.0));

  const Certificate c = hybrid_certificate(h);
  CHECK(c.direction == Vector{0.0, -1.0});
  CHECK(c.rate == 1.0);
  std::mt19937_64 rng(51);
  for (int k = 0; k < 1000; ++k) {
    Vector x = random_in_ball(rng, 2, 1e3);
    x[0] = -std::abs(x[0]);
    CHECK(dot(c.direction, h.field(x)) >= c.rate - 1e-9);
    // Impacts from Sigma with v > 0.
    const Vector on{0.0, std::abs(x[1]) + 1e-3};
    CHECK(dot(c.direction, h.reset(on)) > dot(c.direction, on));
  }

  const HybridForm hp{a, Vector{0.0, 1.0}, Vector{0.0, -1.5}, 1.0};
  CHECK(hybrid_report(hp).both_admissible());
  CHECK(th::code_of([&] { hybrid_certificate(hp); }) == ErrorCode::NotAFold);

  const HybridForm weak{a, Vector{0.0, 1.0}, Vector{0.0, -0.5}, -1.0};
  CHECK(th::code_of([&] { hybrid_report(weak); }) == ErrorCode::InvalidResetLaw);
  CHECK(th::code_of([&] { hybrid_certificate(weak); }) == ErrorCode::InvalidResetLaw);

  CHECK(th::code_of([&] { HybridForm{a, Vector{0.0, 1.0}, Vector{0.1, -1.5}, -1.0}.validate(); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("hybrid sticking pseudo-equilibria against the closed form") {
  std::mt19937_64 rng(52);
  int checked = 0;
  while (checked < 40) {
    const std::size_t n = 2 + checked % 3;
    const auto a = oracle::random_matrix(rng, n);
    const auto b = oracle::random_vector(rng, n);
    auto c = oracle::random_vector(rng, n);
    c[0] = 0.0;
    double kraw = 0.0;
    for (std::size_t j = 0; j < n; ++j) kraw += a[0][j] * c[j];
    if (std::abs(kraw) < 0.1 || std::abs(oracle::det(a)) < 1e-2) continue;
    for (auto& v : c) v *= -2.0 / kraw;
    const HybridForm h{M(a), V(b), V(c), 0.6};
    const EquilibriumReport r = hybrid_report(h);
    if (r.beb_class == BebClass::Degenerate || std::abs(r.det_right_or_qc) < 1e-2) continue;
    const Vector xst = r.solutions[1].location;
    CHECK(xst[0] == 0.0);
    CHECK(th::max_diff(xst, pseudo_oracle(a, b, c, 0.6)) <= 1e-9);
    CHECK(h.sticking_field(xst).norm() <= 1e-9);
    CHECK(r.solutions[1].deciding_value == doctest::Approx(h.reset_gain() * r.s / r.det_right_or_qc));
    ++checked;
  }
}

// --- shared properties ----------------------------------------------------

TEST_CASE("scaling b by lambda and mu by 1/lambda leaves solutions unchanged") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 2 + k % 3;
    const FilippovCase fc = random_filippov_fold(rng, n);
    const double lambda = 0.25 + 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const FilippovForm f{M(fc.a), V(fc.b), V(fc.c), fc.mu};
    const FilippovForm g{M(fc.a), lambda * V(fc.b), V(fc.c), fc.mu / lambda};
    const auto r1 = filippov_report(f), r2 = filippov_report(g);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(th::max_diff(r1.solutions[i].location, r2.solutions[i].location) <= 1e-9);
      CHECK(r1.solutions[i].admissibility == r2.solutions[i].admissibility);
    }
    const auto al = oracle::random_matrix(rng, n, -1.5, 1.5);
    const auto ar = with_first_column(al, oracle::random_vector(rng, n, -1.5, 1.5));
    const auto b = oracle::random_vector(rng, n);
    const auto m1 = map_fixed_points(PwlMap{M(al), M(ar), V(b), 0.4});
    const auto m2 = map_fixed_points(PwlMap{M(al), M(ar), lambda * V(b), 0.4 / lambda});
    if (m1.beb_class == BebClass::Degenerate) continue;
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(th::max_diff(m1.solutions[i].location, m2.solutions[i].location) <= 1e-8 * (1 + m1.solutions[i].location.norm()));
      CHECK(m1.solutions[i].admissibility == m2.solutions[i].admissibility);
    }
  }
}

TEST_CASE("mu -> -mu swaps labels of fold instances") {
  std::mt19937_64 rng(62);
  for (int k = 0; k < 30; ++k) {
    const FilippovCase fc = random_filippov_fold(rng, 2 + k % 3);
    const auto r1 = filippov_report(FilippovForm{M(fc.a), V(fc.b), V(fc.c), fc.mu});
    const auto r2 = filippov_report(FilippovForm{M(fc.a), V(fc.b), V(fc.c), -fc.mu});
    CHECK(r1.both_virtual());
    CHECK(r2.both_admissible());
  }
  const auto e1 = map_fixed_points(bcnf3d({0.0, 0.0, 0.5, 1.0, 1.0, 1.5}, 1.0));
  const auto e2 = map_fixed_points(bcnf3d({0.0, 0.0, 0.5, 1.0, 1.0, 1.5}, -1.0));
  CHECK(e1.both_virtual());
  CHECK(e2.both_admissible());
}

TEST_CASE("boundary tolerance") {
  CHECK(label_by_sign(-1.0, true, 1.0) == Admissibility::Admissible);
  CHECK(label_by_sign(1.0, true, 1.0) == Admissibility::Virtual);
  CHECK(label_by_sign(1.0, false, 1.0) == Admissibility::Admissible);
  CHECK(label_by_sign(1e-10, true, 1.0) == Admissibility::Boundary);
  CHECK(label_by_sign(3e-9, true, 1.0) == Admissibility::Virtual);
  CHECK(boundary_tolerance(0.0) == 1e-9);
}
