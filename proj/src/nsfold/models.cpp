// SPDX-License-Identifier: Apache-2.0
#include "nsfold/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsfold/errors.hpp"

namespace nsfold {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite");
}

}  // namespace

const char* to_string(Stability s) noexcept { return s == Stability::Stable ? "Stable" : "Unstable"; }

std::vector<double> real_cubic_roots(double a2, double a1, double a0) {
  // Depressed cubic t^3 + p t + q with x = t - a2 / 3.
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double shift = -a2 / 3.0;
  std::vector<double> roots;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    roots.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) + shift);
  } else if (p == 0.0) {
    roots.push_back(shift);
  } else {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int j = 0; j < 3; ++j) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * j / 3.0) + shift);
  }
  for (double& x : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = ((x + a2) * x + a1) * x + a0;
      const double df = (3.0 * x + 2.0 * a2) * x + a1;
      if (df == 0.0) break;
      const double nx = x - f / df;
      if (!std::isfinite(nx)) break;
      x = nx;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---------------------------------------------------------------------------
// Stommel

void StommelModel::validate() const {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_finite(mu, "mu");
}

Vector stommel_field(const StommelModel& m, const Vector& x) {
  const double k = m.alpha * m.beta * std::abs(x[0] - x[1]);
  return Vector{1.0 - x[0] - k * x[0], m.beta * (m.mu - x[1]) - k * x[1]};
}

SquareMatrix stommel_jacobian(const StommelModel& m, const Vector& x) {
  const double ab = m.alpha * m.beta;
  const double T = x[0], S = x[1];
  // Sign of T - S picks the branch of |T - S|.
  const double sg = T - S >= 0.0 ? 1.0 : -1.0;
  const double k = ab * sg * (T - S);
  return SquareMatrix{{-1.0 - k - sg * ab * T, sg * ab * T}, {-sg * ab * S, -m.beta - k + sg * ab * S}};
}

GeneralFilippovSystem stommel_system(const StommelModel& m) {
  m.validate();
  GeneralFilippovSystem sys;
  sys.dim = 2;
  const double a = m.alpha, b = m.beta;
  sys.field_left = [a, b](const Vector& x, double mu) {
    const double k = a * b * (x[1] - x[0]);
    return Vector{1.0 - x[0] - k * x[0], b * (mu - x[1]) - k * x[1]};
  };
  sys.field_right = [a, b](const Vector& x, double mu) {
    const double k = a * b * (x[0] - x[1]);
    return Vector{1.0 - x[0] - k * x[0], b * (mu - x[1]) - k * x[1]};
  };
  sys.switching_fn = [](const Vector& x) { return x[0] - x[1]; };
  sys.switching_gradient = [](const Vector&) { return Vector{1.0, -1.0}; };
  return sys;
}

std::vector<StommelEquilibrium> stommel_equilibria(const StommelModel& m) {
  m.validate();
  const double a = m.alpha, b = m.beta, mu = m.mu, ab = a * b;
  std::vector<StommelEquilibrium> out;
  // Equilibria satisfy T = 1/(1+k), S = beta mu/(beta+k), and on each side
  // k (1+k)(beta+k) = +-alpha beta [(beta+k) - beta mu (1+k)].
  for (int side = 0; side < 2; ++side) {
    const double sg = side == 0 ? -1.0 : 1.0;  // -1: T < S
    const double a1 = b - sg * ab * (1.0 - b * mu);
    const double a0 = -sg * ab * b * (1.0 - mu);
    for (double k : real_cubic_roots(1.0 + b, a1, a0)) {
      if (!(k > 0.0)) continue;
      StommelEquilibrium e;
      e.k = k;
      e.state = Vector{1.0 / (1.0 + k), b * mu / (b + k)};
      const double d = e.state[0] - e.state[1];
      if (d * sg <= 0.0) continue;
      e.side = sg < 0 ? FlowMode::FlowLeft : FlowMode::FlowRight;
      const SquareMatrix J = stommel_jacobian(m, e.state);
      const double tr = J(0, 0) + J(1, 1);
      const double det = determinant(J);
      e.stability = (tr < 0.0 && det > 0.0) ? Stability::Stable : Stability::Unstable;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.state[0] - l.state[1] < r.state[0] - r.state[1];
  });
  return out;
}

double stommel_fold_mu(const StommelModel&) { return 1.0; }

std::optional<StommelEquilibrium> stommel_lower_branch(const StommelModel& m) {
  for (const auto& e : stommel_equilibria(m))
    if (e.side == FlowMode::FlowLeft && e.stability == Stability::Stable) return e;
  return std::nullopt;
}

std::optional<StommelEquilibrium> stommel_upper_branch(const StommelModel& m) {
  std::optional<StommelEquilibrium> best;
  for (const auto& e : stommel_equilibria(m))
    if (e.side == FlowMode::FlowRight && (!best || e.k > best->k)) best = e;
  return best;
}

void TippingRun::validate() const {
  require_finite(mu_start, "mu_start");
  require_finite(mu_rate, "mu_rate");
  if (mu_rate == 0.0) throw Error(ErrorCode::InvalidArgument, "mu_rate must be nonzero");
  require_positive(t_end, "t_end");
  if (x0 && (x0->size() != 2 || !x0->all_finite()))
    throw Error(ErrorCode::InvalidArgument, "tipping x0 must be a finite (T, S) pair");
  if (mu_hold) {
    require_finite(*mu_hold, "mu_hold");
    if ((*mu_hold - mu_start) * mu_rate < 0.0)
      throw Error(ErrorCode::InvalidArgument, "mu_hold lies behind mu_start for this drift direction");
  }
}

Trajectory run_tipping(const StommelModel& m, const TippingRun& run, const FlowOptions& opts) {
  m.validate();
  run.validate();
  Vector start;
  if (run.x0) {
    start = *run.x0;
  } else {
    StommelModel frozen = m;
    frozen.mu = run.mu_start;
    auto eq = stommel_lower_branch(frozen);
    if (!eq) eq = stommel_upper_branch(frozen);
    if (!eq) throw Error(ErrorCode::InvalidArgument, "no equilibrium to start the tipping run from");
    start = eq->state;
  }
  const double a = m.alpha, b = m.beta;
  const auto system = [a, b](double rate) {
    GeneralFilippovSystem sys;
    sys.dim = 3;
    const auto field = [a, b, rate](const Vector& x, double sg) {
      const double k = a * b * sg * (x[0] - x[1]);
      return Vector{1.0 - x[0] - k * x[0], b * (x[2] - x[1]) - k * x[1], rate};
    };
    sys.field_left = [field](const Vector& x, double) { return field(x, -1.0); };
    sys.field_right = [field](const Vector& x, double) { return field(x, 1.0); };
    sys.switching_fn = [](const Vector& x) { return x[0] - x[1]; };
    sys.switching_gradient = [](const Vector&) { return Vector{1.0, -1.0, 0.0}; };
    return sys;
  };
  const Vector x0{start[0], start[1], run.mu_start};
  const double t_hold = run.mu_hold ? (*run.mu_hold - run.mu_start) / run.mu_rate : run.t_end;
  Trajectory traj;
  if (t_hold >= run.t_end) {
    traj = integrate_continuous(system(run.mu_rate), x0, run.mu_start, run.t_end, opts);
  } else {
    if (t_hold > 0.0) traj = integrate_continuous(system(run.mu_rate), x0, run.mu_start, t_hold, opts);
    Vector held = traj.samples.empty() ? x0 : traj.samples.back().x;
    held[2] = *run.mu_hold;
    if (traj.samples.empty()) traj.add_sample(0.0, held, held[0] < held[1] ? FlowMode::FlowLeft : FlowMode::FlowRight);
    const Trajectory rest = integrate_continuous(system(0.0), held, *run.mu_hold, run.t_end - t_hold, opts);
    for (const auto& s : rest.samples) traj.add_sample(s.t + t_hold, s.x, s.mode);
    for (auto e : rest.events) {
      e.t += t_hold;
      traj.events.push_back(std::move(e));
    }
    traj.diverged = rest.diverged;
  }
  traj.state_names = {"T", "S", "mu"};
  return traj;
}

// ---------------------------------------------------------------------------
// Welander

void WelanderModel::validate() const {
  require_finite(alpha, "alpha");
  require_finite(beta, "beta");
  require_finite(epsilon, "epsilon");
  require_finite(mu, "mu");
}

GeneralFilippovSystem welander_system(const WelanderModel& m) {
  m.validate();
  GeneralFilippovSystem sys;
  sys.dim = 2;
  const double a = m.alpha, b = m.beta, eps = m.epsilon;
  sys.field_left = [b](const Vector& x, double mu) { return Vector{1.0 - x[0], b * (mu - x[1])}; };
  sys.field_right = [b](const Vector& x, double mu) {
    return Vector{1.0 - x[0] - x[0], b * (mu - x[1]) - x[1]};
  };
  sys.switching_fn = [a, eps](const Vector& x) { return -a * x[0] + x[1] - eps; };
  sys.switching_gradient = [a](const Vector&) { return Vector{-a, 1.0}; };
  return sys;
}

std::vector<Solution> welander_equilibria(const WelanderModel& m) {
  m.validate();
  const auto sigma = [&m](const Vector& x) { return -m.alpha * x[0] + x[1] - m.epsilon; };
  Solution left;
  left.location = Vector{1.0, m.mu};
  left.kind = SolutionKind::RegularLeft;
  left.deciding_value = sigma(left.location);
  left.admissibility = label_by_sign(left.deciding_value, true, m.mu);
  Solution right;
  right.location = Vector{0.5, m.beta * m.mu / (m.beta + 1.0)};
  right.kind = SolutionKind::RegularRight;
  right.deciding_value = sigma(right.location);
  right.admissibility = label_by_sign(right.deciding_value, false, m.mu);
  return {left, right};
}

// ---------------------------------------------------------------------------
// Maps

void ExampleMapParams::validate() const {
  require_finite(delta_L, "delta_L");
  require_finite(delta_R, "delta_R");
  require_positive(alpha, "alpha");
}

PwlMap example_map(const ExampleMapParams& p, double mu) {
  p.validate();
  PwlMap m;
  m.A_L = SquareMatrix{{p.delta_L + 1.0 - p.alpha, 1.0}, {-p.delta_L, 0.0}};
  m.A_R = SquareMatrix{{p.delta_R + 1.0 + p.alpha, 1.0}, {-p.delta_R, 0.0}};
  m.b = Vector{1.0, 0.0};
  m.mu = mu;
  return m;
}

TwoPieceSmoothMap example_map_quadratic(const ExampleMapParams& p, double mu) {
  TwoPieceSmoothMap m;
  m.base = example_map(p, mu);
  const Residual quad = [](const Vector& x, double) { return Vector{0.0, -x[1] * x[1]}; };
  m.residual_left = quad;
  m.residual_right = quad;
  return m;
}

PwlMap bcnf3d(const Bcnf3dParams& p, double mu) {
  PwlMap m;
  m.A_L = SquareMatrix{{p.tau_L, 1.0, 0.0}, {-p.sigma_L, 0.0, 1.0}, {p.delta_L, 0.0, 0.0}};
  m.A_R = SquareMatrix{{p.tau_R, 1.0, 0.0}, {-p.sigma_R, 0.0, 1.0}, {p.delta_R, 0.0, 0.0}};
  m.b = Vector{1.0, 0.0, 0.0};
  m.mu = mu;
  return m;
}

}  // namespace nsfold
