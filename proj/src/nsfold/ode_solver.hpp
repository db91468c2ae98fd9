// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Dormand-Prince 5(4) stepping with directional event location.
// Events are functions g(x) that are <= 0 while the current mode is valid;
// a segment stops at the earliest point where some g becomes positive.
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nsfold/linalg.hpp"

namespace nsfold::ode {

using Field = std::function<Vector(const Vector&)>;
using EventFn = std::function<double(const Vector&)>;
using Projector = std::function<Vector(const Vector&)>;

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 0.05;
  double min_step = 1e-14;
  double event_tol = 1e-11;
  std::size_t max_steps = 20'000'000;
  double divergence_radius = 1e10;
};

struct StepResult {
  Vector x;
  double error = 0.0;  // scaled error norm, accept when <= 1
};

/// One Dormand-Prince step of size h (no error control).
StepResult dopri5_step(const Field& f, const Vector& x, double h, const StepControl& ctl);

struct SegmentEnd {
  double t = 0.0;
  Vector x;
  std::optional<std::size_t> event;  // index into the event list
  bool immediate = false;            // event was active at the segment start
  bool diverged = false;             // left the divergence radius
};

/// Called after every accepted step with (t, x).
using SampleSink = std::function<void(double, const Vector&)>;

/// Integrates x' = f(x) from (t0, x0) toward t_end, projecting every
/// accepted state when `project` is set. Stops at t_end, at the first event,
/// or when the state leaves the divergence radius. `h` carries the step size
/// between calls. Throws StepFailure when the step size underflows.
SegmentEnd integrate_segment(const Field& f, std::span<const EventFn> events, const Projector& project,
                             double t0, const Vector& x0, double t_end, double& h,
                             const StepControl& ctl, const SampleSink& sink);

}  // namespace nsfold::ode
