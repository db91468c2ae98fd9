// SPDX-License-Identifier: Apache-2.0
//
// Iteration of two-piece maps: orbits, escape from balls, attractor
// classification by least period, and the quadratic-residual escape check
// built on Phi(x) = x_1 + x_2 - 2 x_2^2.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "nsfold/certificates.hpp"

namespace nsfold {

using Residual = std::function<Vector(const Vector& x, double mu)>;

/// PwlMap plus higher-order terms E^L, E^R. The residuals must vanish at
/// (0; 0) and agree on x_1 = 0.
struct TwoPieceSmoothMap {
  PwlMap base;
  Residual residual_left;
  Residual residual_right;

  std::size_t dim() const { return base.dim(); }
  Vector apply(const Vector& x) const { return apply(x, base.mu); }
  Vector apply(const Vector& x, double mu) const;
  Vector apply_left(const Vector& x, double mu) const;
  Vector apply_right(const Vector& x, double mu) const;
};

/// Any one-step map x -> f(x). Both map types convert to this.
using MapStep = std::function<Vector(const Vector&)>;
MapStep as_step(const PwlMap& m);
MapStep as_step(const TwoPieceSmoothMap& m);

enum class OrbitOutcome { Escaped, Periodic, Aperiodic, BudgetExhausted };
const char* to_string(OrbitOutcome o) noexcept;

struct OrbitResult {
  std::vector<Vector> iterates;  // x_0 .. x_last
  OrbitOutcome outcome = OrbitOutcome::BudgetExhausted;
  // Escape step for Escaped, period for Periodic, else 0.
  std::size_t value = 0;
};

struct OrbitOptions {
  double escape_radius = 1e6;
  std::size_t max_period = 50;
  double period_tolerance = 1e-8;
};

/// Applies the map `steps` times (left branch on x_1 <= 0). Stops early when
/// the state leaves the escape radius or becomes non-finite (Escaped). A
/// completed run whose tail repeats with least period T <= max_period is
/// Periodic(T), otherwise BudgetExhausted.
OrbitResult iterate(const MapStep& step, const Vector& x0, std::size_t steps,
                    const OrbitOptions& opts = {});
OrbitResult iterate(const PwlMap& m, const Vector& x0, std::size_t steps, const OrbitOptions& opts = {});
OrbitResult iterate(const TwoPieceSmoothMap& m, const Vector& x0, std::size_t steps,
                    const OrbitOptions& opts = {});

/// Smallest m in [1, budget] with ||f^m(x0)|| > radius.
std::optional<std::size_t> escape_time(const MapStep& step, const Vector& x0, double radius,
                                       std::size_t budget);

/// Upper bound on the escape time implied by a certificate: w^T x grows by
/// at least rate per step, and |w^T x| <= radius ||w|| inside the ball.
std::size_t certified_escape_bound(const Certificate& cert, const Vector& x0, double radius);

struct PhiMonitor {
  std::function<double(const Vector&)> phi;
  double eta = 0.0;
};

/// Phi(x) = x_1 + x_2 - 2 x_2^2.
double quadratic_phi(const Vector& x);
/// eta = min(alpha / (2 delta_L^2), alpha / (2 delta_R^2), 1 / sqrt 2).
double quadratic_map_eta(double delta_L, double delta_R, double alpha);
PhiMonitor quadratic_map_monitor(double delta_L, double delta_R, double alpha);

/// Phi(f(x; mu)) - Phi(x).
double phi_increment(const TwoPieceSmoothMap& m, const std::function<double(const Vector&)>& phi,
                     const Vector& x, double mu);

struct PhiCheckReport {
  double min_increment = 0.0;
  Vector argmin;
  std::size_t samples = 0;
  double mu = 0.0;
  bool passed = false;  // min_increment >= mu - 1e-12
};

/// Deterministic disk lattice of `samples` points covering the closed disk
/// of radius r (centre and rim included).
std::vector<Vector> disk_lattice(double radius, std::size_t samples);

/// Minimum of Phi(f(x; mu)) - Phi(x) over disk_lattice(eta, samples).
PhiCheckReport phi_increment_check(const TwoPieceSmoothMap& m, const PhiMonitor& monitor, double mu,
                                   std::size_t samples);

enum class AttractorKind { Periodic, Aperiodic, Diverged };
const char* to_string(AttractorKind k) noexcept;

struct AttractorClass {
  AttractorKind kind = AttractorKind::Aperiodic;
  std::size_t period = 0;
  friend bool operator==(const AttractorClass&, const AttractorClass&) = default;
};

struct ClassifyOptions {
  double divergence_radius = 1e6;
  double period_tolerance = 1e-8;
};

/// Iterates `budget` steps from x0, discarding the first `transient`, and
/// reports the least period T <= max_period whose recurrence holds over the
/// final 2T + 1 iterates. Diverged once the orbit leaves the divergence
/// radius. Deterministic.
AttractorClass classify_attractor(const MapStep& step, const Vector& x0, std::size_t transient,
                                  std::size_t max_period, std::size_t budget,
                                  const ClassifyOptions& opts = {});
AttractorClass classify_attractor(const PwlMap& m, const Vector& x0, std::size_t transient,
                                  std::size_t max_period, std::size_t budget,
                                  const ClassifyOptions& opts = {});

}  // namespace nsfold
