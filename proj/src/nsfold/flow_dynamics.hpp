// SPDX-License-Identifier: Apache-2.0
//
// Event-driven simulation of continuous piecewise-smooth ODEs, Filippov
// systems with attracting sliding, and impacting hybrid systems with reset
// and sticking motion.
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsfold/certificates.hpp"
#include "nsfold/ode_solver.hpp"

namespace nsfold {

enum class FlowMode { FlowLeft, FlowRight, Sliding, Sticking };
enum class EventKind { Crossing, SlidingEntry, SlidingExit, Impact, StickingEntry, StickingExit, Graze };

const char* to_string(FlowMode m) noexcept;
const char* to_string(EventKind k) noexcept;

struct TrajectorySample {
  double t = 0.0;
  Vector x;
  FlowMode mode = FlowMode::FlowLeft;
};

struct TrajectoryEvent {
  double t = 0.0;
  EventKind kind = EventKind::Crossing;
  Vector before;
  Vector after;
};

/// Samples at every accepted step (strictly increasing times) plus the
/// event log. At an impact the sample holds the pre-reset state; the
/// post-reset state is in the event record.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryEvent> events;
  bool diverged = false;  // stopped on leaving the divergence radius
  std::vector<std::string> state_names;  // optional column names

  void add_sample(double t, const Vector& x, FlowMode mode);
};

/// CSV: provenance lines, then one "# event,t,kind" comment per event, then
/// the header t,x_1..x_n,mode and one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Two-piece system split by sigma(x) = 0 (sigma < 0 uses field_left).
struct GeneralFilippovSystem {
  std::function<Vector(const Vector&, double)> field_left;
  std::function<Vector(const Vector&, double)> field_right;
  std::function<double(const Vector&)> switching_fn;
  std::function<Vector(const Vector&)> switching_gradient;
  std::size_t dim = 0;
};

GeneralFilippovSystem to_general(const FilippovForm& f);
GeneralFilippovSystem to_general(const PwlOde& o);

/// Largest finite-difference mismatch between switching_gradient and the
/// central difference of switching_fn over `points`.
double gradient_check(const GeneralFilippovSystem& sys, const std::vector<Vector>& points);

struct FlowOptions {
  ode::StepControl step;
  double tangency_tol = 1e-10;
  double manifold_tol = 1e-12;
  // Chatter guard: more than this many events inside one unit of time.
  std::size_t chatter_events_per_unit_time = 10'000;
  double min_inter_impact_time = 1e-12;
  bool record_samples = true;
};

/// f^S = (n_L f^R - n_R f^L) / (n_L - n_R), n = grad(sigma)^T f.
/// Throws DegenerateDenominator when n_L - n_R is within tolerance of 0.
Vector sliding_field(const GeneralFilippovSystem& sys, const Vector& x, double mu);
Vector sliding_field(const FilippovForm& f, const Vector& x);

enum class ManifoldPoint { Crossing, SlidingAttracting, SlidingRepelling, Tangency };
const char* to_string(ManifoldPoint p) noexcept;

ManifoldPoint classify_manifold_point(const GeneralFilippovSystem& sys, const Vector& x, double mu,
                                      double tol = 1e-10);

/// Continuous piecewise-linear ODE; branch chosen by sign(x_1).
Trajectory integrate_pws_ode(const PwlOde& o, const Vector& x0, double t_end, const FlowOptions& opts = {});

/// Continuous two-piece system (fields agree on sigma = 0): only crossings.
Trajectory integrate_continuous(const GeneralFilippovSystem& sys, const Vector& x0, double mu, double t_end,
                                const FlowOptions& opts = {});

/// Filippov solution with attracting sliding. Refuses to start on a
/// repelling sliding region (RepellingSliding).
Trajectory integrate_filippov(const GeneralFilippovSystem& sys, const Vector& x0, double mu, double t_end,
                              const FlowOptions& opts = {});
Trajectory integrate_filippov(const FilippovForm& f, const Vector& x0, double t_end, const FlowOptions& opts = {});

/// Impacting hybrid truncated form with reset and sticking. Needs x0_1 <= 0
/// and e_1^T A c < -1.
Trajectory integrate_hybrid(const HybridForm& h, const Vector& x0, double t_end, const FlowOptions& opts = {});

enum class CycleStatus { Cycle, NoReturn, Diverged, NotConverged };
const char* to_string(CycleStatus s) noexcept;

struct LimitCycleResult {
  CycleStatus status = CycleStatus::NoReturn;
  double period = 0.0;
  std::vector<Vector> returns;      // successive section points
  std::vector<double> return_times;
  std::vector<double> gaps;         // |returns[k+1] - returns[k]|
};

struct LimitCycleOptions {
  double convergence_tol = 1e-7;
  double max_return_time = 1e3;
  double divergence_radius = 1e6;
  FlowOptions flow;
};

/// Poincare return map on the switching manifold, section = transitions
/// into the right region (crossing or sliding exit). Starting from
/// section_point, iterates returns until successive points agree to
/// convergence_tol.
LimitCycleResult limit_cycle(const GeneralFilippovSystem& sys, const Vector& section_point, double mu,
                             std::size_t max_returns, const LimitCycleOptions& opts = {});

}  // namespace nsfold
