// SPDX-License-Identifier: Apache-2.0
#include "nsfold/ode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nsfold/errors.hpp"

namespace nsfold::ode {

namespace {

// Dormand-Prince 5(4) tableau; the fields are autonomous so the nodes c_i
// are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Vector combo(const Vector& x, double h, std::initializer_list<std::pair<double, const Vector*>> terms) {
  Vector y = x;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h * coef * (*k)[i];
  }
  return y;
}

}  // namespace

StepResult dopri5_step(const Field& f, const Vector& x, double h, const StepControl& ctl) {
  const Vector k1 = f(x);
  const Vector k2 = f(combo(x, h, {{a21, &k1}}));
  const Vector k3 = f(combo(x, h, {{a31, &k1}, {a32, &k2}}));
  const Vector k4 = f(combo(x, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vector k5 = f(combo(x, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vector k6 = f(combo(x, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  StepResult r;
  r.x = combo(x, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const Vector k7 = f(r.x);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = ctl.atol + ctl.rtol * std::max(std::abs(x[i]), std::abs(r.x[i]));
    err = std::max(err, std::abs(e) / scale);
  }
  r.error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  return r;
}

namespace {

struct EventHit {
  double tau = 0.0;
  bool immediate = false;
};

// Locates the first root of phi on (0, h] given phi(h) > 0.
EventHit locate(const std::function<double(double)>& phi, double phi0, double h, double phi_h,
                double t0, const StepControl& ctl) {
  double lo = 0.0, plo = phi0, hi = h, phi_hi = phi_h;
  if (phi0 > ctl.event_tol) return {0.0, true};
  if (phi0 >= 0.0) {
    // Starting on the event surface: find a point where the mode is valid.
    bool found = false;
    double tau = h;
    for (int i = 0; i < 64; ++i) {
      tau *= 0.5;
      const double v = phi(tau);
      if (v < 0.0) {
        lo = tau;
        plo = v;
        found = true;
        break;
      }
      hi = tau;
      phi_hi = v;
    }
    if (!found) return {0.0, true};
  }
  // Illinois-modified regula falsi.
  int side = 0;
  double best = hi;
  for (int it = 0; it < 200; ++it) {
    double tau = (lo * phi_hi - hi * plo) / (phi_hi - plo);
    if (!(tau > lo && tau < hi)) tau = 0.5 * (lo + hi);
    const double v = phi(tau);
    best = tau;
    if (std::abs(v) <= ctl.event_tol) break;
    if (v > 0.0) {
      hi = tau;
      phi_hi = v;
      if (side == 1) plo *= 0.5;
      side = 1;
    } else {
      lo = tau;
      plo = v;
      if (side == -1) phi_hi *= 0.5;
      side = -1;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t0) + hi)) {
      best = hi;
      break;
    }
  }
  return {best, false};
}

}  // namespace

SegmentEnd integrate_segment(const Field& f, std::span<const EventFn> events, const Projector& project,
                             double t0, const Vector& x0, double t_end, double& h,
                             const StepControl& ctl, const SampleSink& sink) {
  SegmentEnd end;
  double t = t0;
  Vector x = project ? project(x0) : x0;

  std::vector<double> g_start(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    g_start[k] = events[k](x);
    if (g_start[k] > ctl.event_tol) {
      end.t = t;
      end.x = x;
      end.event = k;
      end.immediate = true;
      return end;
    }
  }

  if (!(h > 0.0)) h = std::min(1e-3, ctl.max_step);
  std::size_t steps = 0;
  while (t < t_end) {
    if (++steps > ctl.max_steps) {
      throw Error(ErrorCode::StepFailure, "step budget exhausted at t = " + std::to_string(t));
    }
    const double remaining = t_end - t;
    double step = std::min({h, ctl.max_step, remaining});
    const bool last = step >= remaining;
    StepResult trial = dopri5_step(f, x, step, ctl);
    if (!(trial.error <= 1.0)) {
      const double fac = std::isfinite(trial.error) ? std::max(0.1, 0.9 * std::pow(trial.error, -0.2)) : 0.1;
      h = step * fac;
      if (h < ctl.min_step * std::max(1.0, std::abs(t))) {
        throw Error(ErrorCode::StepFailure, "step size underflow at t = " + std::to_string(t));
      }
      continue;
    }
    Vector x1 = project ? project(trial.x) : trial.x;

    // Earliest event inside this step.
    std::optional<std::size_t> hit;
    EventHit best{};
    for (std::size_t k = 0; k < events.size(); ++k) {
      const double gk = events[k](x1);
      if (!(gk > 0.0)) continue;
      auto phi = [&](double tau) {
        Vector y = dopri5_step(f, x, tau, ctl).x;
        if (project) y = project(y);
        return events[k](y);
      };
      const EventHit e = locate(phi, g_start[k], step, gk, t, ctl);
      if (!hit || e.tau < best.tau) {
        hit = k;
        best = e;
      }
    }
    if (hit) {
      Vector xe = x;
      if (best.tau > 0.0) {
        xe = dopri5_step(f, x, best.tau, ctl).x;
        if (project) xe = project(xe);
      }
      end.t = t + best.tau;
      end.x = xe;
      end.event = hit;
      end.immediate = best.immediate;
      if (best.tau > 0.0 && sink) sink(end.t, end.x);
      return end;
    }

    t = last ? t_end : t + step;
    x = std::move(x1);
    for (std::size_t k = 0; k < events.size(); ++k) g_start[k] = events[k](x);
    if (sink) sink(t, x);
    if (!x.all_finite() || x.norm() > ctl.divergence_radius) {
      end.t = t;
      end.x = x;
      end.diverged = true;
      return end;
    }
    h = step * std::min(5.0, trial.error > 0.0 ? 0.9 * std::pow(trial.error, -0.2) : 5.0);
  }
  end.t = t;
  end.x = x;
  return end;
}

}  // namespace nsfold::ode
