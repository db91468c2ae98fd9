// SPDX-License-Identifier: Apache-2.0
#include "nsfold/map_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsfold/errors.hpp"

namespace nsfold {

namespace {

double distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Least T <= max_period such that the last 2T + 1 entries of `tail` (oldest
// first) repeat with period T.
std::size_t least_period(const std::vector<Vector>& tail, std::size_t max_period, double tol) {
  const std::size_t len = tail.size();
  for (std::size_t T = 1; T <= max_period && 2 * T + 1 <= len; ++T) {
    bool ok = true;
    for (std::size_t j = 0; j <= T && ok; ++j) {
      ok = distance(tail[len - 1 - j], tail[len - 1 - j - T]) <= tol;
    }
    if (ok) return T;
  }
  return 0;
}

bool escaped(const Vector& x, double radius) { return !x.all_finite() || x.norm() > radius; }

}  // namespace

const char* to_string(OrbitOutcome o) noexcept {
  switch (o) {
    case OrbitOutcome::Escaped: return "Escaped";
    case OrbitOutcome::Periodic: return "Periodic";
    case OrbitOutcome::Aperiodic: return "Aperiodic";
    case OrbitOutcome::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

const char* to_string(AttractorKind k) noexcept {
  switch (k) {
    case AttractorKind::Periodic: return "Periodic";
    case AttractorKind::Aperiodic: return "Aperiodic";
    case AttractorKind::Diverged: return "Diverged";
  }
  return "?";
}

Vector TwoPieceSmoothMap::apply_left(const Vector& x, double mu) const {
  PwlMap m = base;
  m.mu = mu;
  Vector y = m.apply_left(x);
  if (residual_left) y += residual_left(x, mu);
  return y;
}

Vector TwoPieceSmoothMap::apply_right(const Vector& x, double mu) const {
  PwlMap m = base;
  m.mu = mu;
  Vector y = m.apply_right(x);
  if (residual_right) y += residual_right(x, mu);
  return y;
}

Vector TwoPieceSmoothMap::apply(const Vector& x, double mu) const {
  return x[0] <= 0.0 ? apply_left(x, mu) : apply_right(x, mu);
}

MapStep as_step(const PwlMap& m) {
  return [m](const Vector& x) { return m.apply(x); };
}

MapStep as_step(const TwoPieceSmoothMap& m) {
  return [m](const Vector& x) { return m.apply(x); };
}

OrbitResult iterate(const MapStep& step, const Vector& x0, std::size_t steps, const OrbitOptions& opts) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "iterate needs at least one step");
  OrbitResult r;
  r.iterates.reserve(steps + 1);
  r.iterates.push_back(x0);
  for (std::size_t k = 1; k <= steps; ++k) {
    Vector next = step(r.iterates.back());
    const bool out = escaped(next, opts.escape_radius);
    r.iterates.push_back(std::move(next));
    if (out) {
      r.outcome = OrbitOutcome::Escaped;
      r.value = k;
      return r;
    }
  }
  const std::size_t T = least_period(r.iterates, opts.max_period, opts.period_tolerance);
  if (T > 0) {
    r.outcome = OrbitOutcome::Periodic;
    r.value = T;
  }
  return r;
}

OrbitResult iterate(const PwlMap& m, const Vector& x0, std::size_t steps, const OrbitOptions& opts) {
  m.validate();
  return iterate(as_step(m), x0, steps, opts);
}

OrbitResult iterate(const TwoPieceSmoothMap& m, const Vector& x0, std::size_t steps,
                    const OrbitOptions& opts) {
  m.base.validate();
  return iterate(as_step(m), x0, steps, opts);
}

std::optional<std::size_t> escape_time(const MapStep& step, const Vector& x0, double radius,
                                       std::size_t budget) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "escape radius must be positive");
  Vector x = x0;
  for (std::size_t m = 1; m <= budget; ++m) {
    x = step(x);
    if (escaped(x, radius)) return m;
  }
  return std::nullopt;
}

std::size_t certified_escape_bound(const Certificate& cert, const Vector& x0, double radius) {
  const double wn = cert.direction.norm();
  const double gap = radius * wn - dot(cert.direction, x0) + radius * wn;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::max(gap, 0.0) / cert.rate)));
}

// ---------------------------------------------------------------------------
// Phi monitor

double quadratic_phi(const Vector& x) { return x[0] + x[1] - 2.0 * x[1] * x[1]; }

double quadratic_map_eta(double delta_L, double delta_R, double alpha) {
  return std::min({alpha / (2.0 * delta_L * delta_L), alpha / (2.0 * delta_R * delta_R),
                   1.0 / std::numbers::sqrt2});
}

PhiMonitor quadratic_map_monitor(double delta_L, double delta_R, double alpha) {
  return PhiMonitor{quadratic_phi, quadratic_map_eta(delta_L, delta_R, alpha)};
}

double phi_increment(const TwoPieceSmoothMap& m, const std::function<double(const Vector&)>& phi,
                     const Vector& x, double mu) {
  return phi(m.apply(x, mu)) - phi(x);
}

std::vector<Vector> disk_lattice(double radius, std::size_t samples) {
  std::vector<Vector> pts;
  pts.reserve(samples);
  if (samples == 0) return pts;
  if (samples == 1) {
    pts.push_back(Vector{0.0, 0.0});
    return pts;
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = radius * std::sqrt(static_cast<double>(i) / static_cast<double>(samples - 1));
    const double theta = golden_angle * static_cast<double>(i);
    pts.push_back(Vector{r * std::cos(theta), r * std::sin(theta)});
  }
  return pts;
}

PhiCheckReport phi_increment_check(const TwoPieceSmoothMap& m, const PhiMonitor& monitor, double mu,
                                   std::size_t samples) {
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "phi_increment_check needs mu > 0");
  if (!(monitor.eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "monitor eta must be positive");
  if (m.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "phi_increment_check works on planar maps");
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "phi_increment_check needs samples");

  PhiCheckReport rep;
  rep.mu = mu;
  rep.samples = samples;
  rep.min_increment = INFINITY;
  for (const Vector& x : disk_lattice(monitor.eta, samples)) {
    const double inc = phi_increment(m, monitor.phi, x, mu);
    if (inc < rep.min_increment) {
      rep.min_increment = inc;
      rep.argmin = x;
    }
  }
  rep.passed = rep.min_increment >= mu - 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Attractor classification

AttractorClass classify_attractor(const MapStep& step, const Vector& x0, std::size_t transient,
                                  std::size_t max_period, std::size_t budget,
                                  const ClassifyOptions& opts) {
  if (max_period < 1) throw Error(ErrorCode::InvalidArgument, "max_period must be at least 1");
  if (budget < transient) throw Error(ErrorCode::InvalidArgument, "budget must cover the transient");
  const std::size_t window = std::min(budget - transient + 1, 2 * max_period + 1);

  std::vector<Vector> tail;
  tail.reserve(window);
  Vector x = x0;
  for (std::size_t k = 0; k <= budget; ++k) {
    if (k > 0) x = step(x);
    if (escaped(x, opts.divergence_radius)) return {AttractorKind::Diverged, 0};
    if (k + window > budget) tail.push_back(x);
  }
  const std::size_t T = least_period(tail, max_period, opts.period_tolerance);
  if (T > 0) return {AttractorKind::Periodic, T};
  return {AttractorKind::Aperiodic, 0};
}

AttractorClass classify_attractor(const PwlMap& m, const Vector& x0, std::size_t transient,
                                  std::size_t max_period, std::size_t budget,
                                  const ClassifyOptions& opts) {
  m.validate();
  if (max_period < 1) throw Error(ErrorCode::InvalidArgument, "max_period must be at least 1");
  if (budget < transient) throw Error(ErrorCode::InvalidArgument, "budget must cover the transient");
  if (x0.size() != m.dim()) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");

  // Allocation-free kernel; same arithmetic order as PwlMap::apply.
  const std::size_t n = m.dim();
  const std::size_t window = std::min(budget - transient + 1, 2 * max_period + 1);
  std::vector<double> ring(window * n);
  std::vector<double> cur(x0.begin(), x0.end());
  std::vector<double> next(n);
  const double r2 = opts.divergence_radius * opts.divergence_radius;
  const auto row_major_l = m.A_L.row_major();
  const auto row_major_r = m.A_R.row_major();

  auto out_of_range = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return !(s <= r2);  // also catches NaN
  };

  if (out_of_range(cur)) return {AttractorKind::Diverged, 0};
  std::size_t stored = 0;
  auto store = [&](std::size_t k) {
    if (k + window > budget) {
      std::copy(cur.begin(), cur.end(), ring.begin() + static_cast<std::ptrdiff_t>(stored * n));
      ++stored;
    }
  };
  store(0);
  for (std::size_t k = 1; k <= budget; ++k) {
    const auto& a = cur[0] <= 0.0 ? row_major_l : row_major_r;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * cur[j];
      next[i] = s + m.mu * m.b[i];
    }
    cur.swap(next);
    if (out_of_range(cur)) return {AttractorKind::Diverged, 0};
    store(k);
  }

  std::vector<Vector> tail;
  tail.reserve(window);
  for (std::size_t k = 0; k < stored; ++k)
    tail.emplace_back(std::vector<double>(ring.begin() + static_cast<std::ptrdiff_t>(k * n),
                                          ring.begin() + static_cast<std::ptrdiff_t>((k + 1) * n)));
  const std::size_t T = least_period(tail, max_period, opts.period_tolerance);
  if (T > 0) return {AttractorKind::Periodic, T};
  return {AttractorKind::Aperiodic, 0};
}

}  // namespace nsfold
