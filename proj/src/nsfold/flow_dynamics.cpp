// SPDX-License-Identifier: Apache-2.0
#include "nsfold/flow_dynamics.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nsfold/errors.hpp"

namespace nsfold {

const char* to_string(FlowMode m) noexcept {
  switch (m) {
    case FlowMode::FlowLeft: return "FlowLeft";
    case FlowMode::FlowRight: return "FlowRight";
    case FlowMode::Sliding: return "Sliding";
    case FlowMode::Sticking: return "Sticking";
  }
  return "?";
}

const char* to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Crossing: return "Crossing";
    case EventKind::SlidingEntry: return "SlidingEntry";
    case EventKind::SlidingExit: return "SlidingExit";
    case EventKind::Impact: return "Impact";
    case EventKind::StickingEntry: return "StickingEntry";
    case EventKind::StickingExit: return "StickingExit";
    case EventKind::Graze: return "Graze";
  }
  return "?";
}

const char* to_string(ManifoldPoint p) noexcept {
  switch (p) {
    case ManifoldPoint::Crossing: return "Crossing";
    case ManifoldPoint::SlidingAttracting: return "SlidingAttracting";
    case ManifoldPoint::SlidingRepelling: return "SlidingRepelling";
    case ManifoldPoint::Tangency: return "Tangency";
  }
  return "?";
}

const char* to_string(CycleStatus s) noexcept {
  switch (s) {
    case CycleStatus::Cycle: return "Cycle";
    case CycleStatus::NoReturn: return "NoReturn";
    case CycleStatus::Diverged: return "Diverged";
    case CycleStatus::NotConverged: return "NotConverged";
  }
  return "?";
}

void Trajectory::add_sample(double t, const Vector& x, FlowMode mode) {
  if (!samples.empty() && !(t > samples.back().t)) return;
  samples.push_back({t, x, mode});
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().x.size();
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "# event,t,kind\n";
  for (const auto& e : traj.events) buf << "# event," << e.t << ',' << to_string(e.kind) << '\n';
  buf << 't';
  for (std::size_t i = 0; i < n; ++i) {
    if (i < traj.state_names.size()) buf << ',' << traj.state_names[i];
    else buf << ",x_" << (i + 1);
  }
  buf << ",mode\n";
  for (const auto& s : traj.samples) {
    buf << s.t;
    for (std::size_t i = 0; i < n; ++i) buf << ',' << s.x[i];
    buf << ',' << to_string(s.mode) << '\n';
  }
  os << buf.str();
}

GeneralFilippovSystem to_general(const FilippovForm& f) {
  f.validate();
  GeneralFilippovSystem sys;
  sys.dim = f.dim();
  sys.field_left = [A = f.A, b = f.b](const Vector& x, double mu) { return A * x + mu * b; };
  sys.field_right = [c = f.c](const Vector&, double) { return c; };
  sys.switching_fn = [](const Vector& x) { return x[0]; };
  sys.switching_gradient = [n = f.dim()](const Vector&) { return Vector::unit(n, 0); };
  return sys;
}

GeneralFilippovSystem to_general(const PwlOde& o) {
  o.validate();
  GeneralFilippovSystem sys;
  sys.dim = o.dim();
  sys.field_left = [A = o.A_L, b = o.b](const Vector& x, double mu) { return A * x + mu * b; };
  sys.field_right = [A = o.A_R, b = o.b](const Vector& x, double mu) { return A * x + mu * b; };
  sys.switching_fn = [](const Vector& x) { return x[0]; };
  sys.switching_gradient = [n = o.dim()](const Vector&) { return Vector::unit(n, 0); };
  return sys;
}

double gradient_check(const GeneralFilippovSystem& sys, const std::vector<Vector>& points) {
  double worst = 0.0;
  for (const Vector& x : points) {
    const Vector g = sys.switching_gradient(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (sys.switching_fn(xp) - sys.switching_fn(xm)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[i]));
    }
  }
  return worst;
}

namespace {

struct Normals {
  double left = 0.0;
  double right = 0.0;
};

Normals normals(const GeneralFilippovSystem& sys, const Vector& x, double mu) {
  const Vector g = sys.switching_gradient(x);
  return {dot(g, sys.field_left(x, mu)), dot(g, sys.field_right(x, mu))};
}

Vector sliding_combination(const GeneralFilippovSystem& sys, const Vector& x, double mu) {
  const Vector g = sys.switching_gradient(x);
  const Vector fl = sys.field_left(x, mu);
  const Vector fr = sys.field_right(x, mu);
  const double nl = dot(g, fl), nr = dot(g, fr);
  return (1.0 / (nl - nr)) * (nl * fr - nr * fl);
}

Vector project_to_manifold(const GeneralFilippovSystem& sys, const Vector& x) {
  Vector y = x;
  for (int it = 0; it < 3; ++it) {
    const double s = sys.switching_fn(y);
    if (s == 0.0) break;
    const Vector g = sys.switching_gradient(y);
    const double gg = dot(g, g);
    if (!(gg > 0.0)) break;
    y -= (s / gg) * g;
  }
  return y;
}

void check_inputs(const Vector& x0, std::size_t dim, double t_end) {
  if (x0.size() != dim) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
  if (!x0.all_finite()) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
}

// Sliding window of event times backing the chatter guard.
class ChatterGuard {
 public:
  explicit ChatterGuard(std::size_t budget) : budget_(budget) {}
  // True when more than `budget` events fall inside one unit of time.
  bool record(double t) {
    times_.push_back(t);
    while (!times_.empty() && times_.front() < t - 1.0) times_.pop_front();
    return times_.size() > budget_;
  }

 private:
  std::size_t budget_;
  std::deque<double> times_;
};

using Observer = std::function<bool(const TrajectoryEvent&, FlowMode)>;

struct Engine {
  const GeneralFilippovSystem& sys;
  double mu;
  const FlowOptions& opts;
  bool allow_sliding;
  Observer observer;
  Trajectory traj;

  FlowMode entry_from_left(const Normals& n) const {
    if (allow_sliding && n.right < 0.0) return FlowMode::Sliding;
    return FlowMode::FlowRight;
  }
  FlowMode entry_from_right(const Normals& n) const {
    if (allow_sliding && n.left > 0.0) return FlowMode::Sliding;
    return FlowMode::FlowLeft;
  }

  FlowMode initial_mode(const Vector& x) const {
    const double s = sys.switching_fn(x);
    if (s < -opts.manifold_tol) return FlowMode::FlowLeft;
    if (s > opts.manifold_tol) return FlowMode::FlowRight;
    const Normals n = normals(sys, x, mu);
    const double tol = opts.tangency_tol;
    if (!allow_sliding) return n.left > 0.0 ? FlowMode::FlowRight : FlowMode::FlowLeft;
    if (n.left < -tol && n.right > tol)
      throw Error(ErrorCode::RepellingSliding, "initial state lies on a repelling sliding region");
    if (n.left >= -tol && n.right <= tol && (n.left > tol || n.right < -tol)) return FlowMode::Sliding;
    if (n.right > tol) return FlowMode::FlowRight;
    return FlowMode::FlowLeft;
  }

  // Returns true when the observer asks to stop.
  bool emit(double t, EventKind kind, const Vector& before, const Vector& after, FlowMode next) {
    TrajectoryEvent e{t, kind, before, after};
    traj.events.push_back(e);
    return observer && observer(traj.events.back(), next);
  }

  void run(const Vector& x0, double t_end) {
    ode::StepControl ctl = opts.step;
    double t = 0.0;
    Vector x = x0;
    FlowMode mode = initial_mode(x);
    if (mode == FlowMode::Sliding) x = project_to_manifold(sys, x);
    if (opts.record_samples) traj.add_sample(t, x, mode);

    ChatterGuard guard(opts.chatter_events_per_unit_time);
    double h = 0.0;
    int immediate_run = 0;

    const auto sigma = [this](const Vector& y) { return sys.switching_fn(y); };
    const auto neg_sigma = [this](const Vector& y) { return -sys.switching_fn(y); };
    const auto exit_left = [this](const Vector& y) { return -normals(sys, y, mu).left; };
    const auto exit_right = [this](const Vector& y) { return normals(sys, y, mu).right; };
    const auto left = [this](const Vector& y) { return sys.field_left(y, mu); };
    const auto right = [this](const Vector& y) { return sys.field_right(y, mu); };
    const auto slide = [this](const Vector& y) { return sliding_combination(sys, y, mu); };
    const auto proj = [this](const Vector& y) { return project_to_manifold(sys, y); };

    while (t < t_end) {
      std::vector<ode::EventFn> events;
      ode::Field f;
      ode::Projector p;
      switch (mode) {
        case FlowMode::FlowLeft: f = left; events = {sigma}; break;
        case FlowMode::FlowRight: f = right; events = {neg_sigma}; break;
        case FlowMode::Sliding: f = slide; events = {exit_left, exit_right}; p = proj; break;
        case FlowMode::Sticking: throw Error(ErrorCode::InvalidArgument, "sticking mode in a Filippov system");
      }
      const FlowMode seg_mode = mode;
      ode::SampleSink sink;
      if (opts.record_samples)
        sink = [this, seg_mode](double ts, const Vector& xs) { traj.add_sample(ts, xs, seg_mode); };

      const ode::SegmentEnd end = ode::integrate_segment(f, events, p, t, x, t_end, h, ctl, sink);
      t = end.t;
      x = end.x;
      if (end.diverged) {
        traj.diverged = true;
        return;
      }
      if (!end.event) return;

      if (end.immediate) {
        if (++immediate_run > 10)
          throw Error(ErrorCode::StepFailure, "repeated zero-length segments at t = " + std::to_string(t));
      } else {
        immediate_run = 0;
      }
      if (guard.record(t))
        throw Error(ErrorCode::ChatterBudgetExceeded, "event accumulation near t = " + std::to_string(t));

      const Vector before = x;
      if (mode == FlowMode::Sliding) {
        const FlowMode next = *end.event == 0 ? FlowMode::FlowLeft : FlowMode::FlowRight;
        mode = next;
        if (emit(t, EventKind::SlidingExit, before, x, next)) return;
        continue;
      }

      x = project_to_manifold(sys, x);
      const Normals n = normals(sys, x, mu);
      FlowMode next;
      if (mode == FlowMode::FlowLeft) {
        if (!end.immediate && n.left <= opts.tangency_tol && n.right <= opts.tangency_tol) {
          // Grazing contact: the left flow touches the manifold and turns back.
          if (emit(t, EventKind::Graze, before, x, FlowMode::FlowLeft)) return;
          continue;
        }
        next = entry_from_left(n);
      } else {
        if (!end.immediate && n.right >= -opts.tangency_tol && n.left >= -opts.tangency_tol) {
          if (emit(t, EventKind::Graze, before, x, FlowMode::FlowRight)) return;
          continue;
        }
        next = entry_from_right(n);
      }
      mode = next;
      const EventKind kind = next == FlowMode::Sliding ? EventKind::SlidingEntry : EventKind::Crossing;
      if (emit(t, kind, before, x, next)) return;
    }
  }
};

}  // namespace

Vector sliding_field(const GeneralFilippovSystem& sys, const Vector& x, double mu) {
  const Vector g = sys.switching_gradient(x);
  const Vector fl = sys.field_left(x, mu);
  const Vector fr = sys.field_right(x, mu);
  const double nl = dot(g, fl), nr = dot(g, fr);
  const double scale = std::max({1.0, std::abs(nl), std::abs(nr)});
  if (std::abs(nl - nr) <= 1e-12 * scale)
    throw Error(ErrorCode::DegenerateDenominator, "normal components of the two fields coincide");
  return (1.0 / (nl - nr)) * (nl * fr - nr * fl);
}

Vector sliding_field(const FilippovForm& f, const Vector& x) { return sliding_field(to_general(f), x, f.mu); }

ManifoldPoint classify_manifold_point(const GeneralFilippovSystem& sys, const Vector& x, double mu, double tol) {
  const Normals n = normals(sys, x, mu);
  if (std::abs(n.left) <= tol || std::abs(n.right) <= tol) return ManifoldPoint::Tangency;
  if (n.left * n.right > 0.0) return ManifoldPoint::Crossing;
  return n.left > 0.0 ? ManifoldPoint::SlidingAttracting : ManifoldPoint::SlidingRepelling;
}

Trajectory integrate_continuous(const GeneralFilippovSystem& sys, const Vector& x0, double mu, double t_end,
                                const FlowOptions& opts) {
  check_inputs(x0, sys.dim, t_end);
  Engine e{sys, mu, opts, false, {}, {}};
  e.run(x0, t_end);
  return std::move(e.traj);
}

Trajectory integrate_pws_ode(const PwlOde& o, const Vector& x0, double t_end, const FlowOptions& opts) {
  return integrate_continuous(to_general(o), x0, o.mu, t_end, opts);
}

Trajectory integrate_filippov(const GeneralFilippovSystem& sys, const Vector& x0, double mu, double t_end,
                              const FlowOptions& opts) {
  check_inputs(x0, sys.dim, t_end);
  Engine e{sys, mu, opts, true, {}, {}};
  e.run(x0, t_end);
  return std::move(e.traj);
}

Trajectory integrate_filippov(const FilippovForm& f, const Vector& x0, double t_end, const FlowOptions& opts) {
  return integrate_filippov(to_general(f), x0, f.mu, t_end, opts);
}

Trajectory integrate_hybrid(const HybridForm& hf, const Vector& x0, double t_end, const FlowOptions& opts) {
  hf.validate();
  check_inputs(x0, hf.dim(), t_end);
  const double kappa = hf.reset_gain();
  if (!(kappa < -1.0)) throw Error(ErrorCode::InvalidResetLaw, "reset law needs e_1^T A c < -1");
  if (x0[0] > opts.manifold_tol) throw Error(ErrorCode::InvalidArgument, "hybrid initial state needs x_1 <= 0");

  const ode::StepControl ctl = opts.step;
  Trajectory traj;
  double t = 0.0;
  Vector x = x0;
  if (x[0] > 0.0) x[0] = 0.0;
  FlowMode mode = FlowMode::FlowLeft;
  if (opts.record_samples) traj.add_sample(t, x, mode);

  const auto to_gamma = [&hf, kappa](const Vector& y) {
    Vector z = y;
    z[0] = 0.0;
    return z - (hf.velocity(z) / kappa) * hf.c;
  };
  const ode::Field flow = [&hf](const Vector& y) { return hf.field(y); };
  const ode::Field stick = [&hf](const Vector& y) { return hf.sticking_field(y); };
  const ode::EventFn hit = [](const Vector& y) { return y[0]; };
  const ode::EventFn detach = [&hf](const Vector& y) { return -hf.acceleration(y); };

  ChatterGuard guard(opts.chatter_events_per_unit_time);
  double h = 0.0;
  double last_impact = -INFINITY;
  int immediate_run = 0;
  const double v_tol = opts.tangency_tol;

  while (t < t_end) {
    const FlowMode seg_mode = mode;
    ode::SampleSink sink;
    if (opts.record_samples)
      sink = [&traj, seg_mode](double ts, const Vector& xs) { traj.add_sample(ts, xs, seg_mode); };
    const bool sticking = mode == FlowMode::Sticking;
    const ode::EventFn ev[1] = {sticking ? detach : hit};
    const ode::SegmentEnd end =
        ode::integrate_segment(sticking ? stick : flow, ev, sticking ? ode::Projector(to_gamma) : ode::Projector(),
                               t, x, t_end, h, ctl, sink);
    t = end.t;
    x = end.x;
    if (end.diverged) {
      traj.diverged = true;
      break;
    }
    if (!end.event) break;
    if (end.immediate) {
      if (++immediate_run > 10)
        throw Error(ErrorCode::StepFailure, "repeated zero-length segments at t = " + std::to_string(t));
    } else {
      immediate_run = 0;
    }

    const Vector before = x;
    if (sticking) {
      mode = FlowMode::FlowLeft;
      traj.events.push_back({t, EventKind::StickingExit, before, x});
      continue;
    }

    x[0] = 0.0;
    const double v = hf.velocity(x);
    const double a = hf.acceleration(x);
    const bool zeno = guard.record(t) || (t - last_impact < opts.min_inter_impact_time);
    if (v > v_tol && !zeno) {
      const Vector after = hf.reset(x);
      traj.events.push_back({t, EventKind::Impact, x, after});
      x = after;
      last_impact = t;
      continue;
    }
    if (a > 0.0 && (v <= v_tol || zeno)) {
      const Vector after = to_gamma(x);
      traj.events.push_back({t, EventKind::StickingEntry, before, after});
      x = after;
      mode = FlowMode::Sticking;
      continue;
    }
    if (zeno) throw Error(ErrorCode::ChatterBudgetExceeded, "impact accumulation near t = " + std::to_string(t));
    traj.events.push_back({t, EventKind::Graze, before, x});
  }
  return traj;
}

LimitCycleResult limit_cycle(const GeneralFilippovSystem& sys, const Vector& section_point, double mu,
                             std::size_t max_returns, const LimitCycleOptions& opts) {
  if (max_returns < 2) throw Error(ErrorCode::InvalidArgument, "limit_cycle needs at least two returns");
  check_inputs(section_point, sys.dim, 1.0);
  LimitCycleResult res;

  FlowOptions fo = opts.flow;
  fo.record_samples = false;
  fo.step.divergence_radius = opts.divergence_radius;

  Vector x = section_point;
  double t0 = 0.0;
  while (res.returns.size() < max_returns) {
    Engine e{sys, mu, fo, true, {}, {}};
    bool got = false;
    Vector point;
    double when = 0.0;
    e.observer = [&](const TrajectoryEvent& ev, FlowMode next) {
      if (next != FlowMode::FlowRight) return false;
      if (ev.t <= 0.0) return false;
      got = true;
      point = ev.after;
      when = ev.t;
      return true;
    };
    e.run(x, opts.max_return_time);
    if (e.traj.diverged) {
      res.status = CycleStatus::Diverged;
      return res;
    }
    if (!got) {
      res.status = CycleStatus::NoReturn;
      return res;
    }
    t0 += when;
    res.returns.push_back(point);
    res.return_times.push_back(t0);
    x = point;
    const std::size_t k = res.returns.size();
    if (k >= 2) {
      Vector d = res.returns[k - 1] - res.returns[k - 2];
      res.gaps.push_back(d.norm());
      if (res.gaps.back() <= opts.convergence_tol) {
        res.status = CycleStatus::Cycle;
        res.period = res.return_times[k - 1] - res.return_times[k - 2];
        return res;
      }
    }
  }
  res.status = CycleStatus::NotConverged;
  return res;
}

}  // namespace nsfold
