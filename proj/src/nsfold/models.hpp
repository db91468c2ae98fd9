// SPDX-License-Identifier: Apache-2.0
//
// Ready-made systems: Stommel's two-box ocean model with k = alpha beta |T - S|,
// Welander's model in the discontinuous limit, the planar example map and its
// quadratic extension, and the 3D border-collision normal form.
#pragma once

#include <optional>
#include <vector>

#include "nsfold/flow_dynamics.hpp"
#include "nsfold/map_dynamics.hpp"

namespace nsfold {

struct StommelModel {
  double alpha = 5.0;
  double beta = 0.2;
  double mu = 1.0;
  void validate() const;
};

enum class Stability { Stable, Unstable };
const char* to_string(Stability s) noexcept;

struct StommelEquilibrium {
  Vector state;  // (T, S)
  Stability stability = Stability::Stable;
  // Side of T = S the equilibrium lies on (FlowLeft: T < S).
  FlowMode side = FlowMode::FlowRight;
  double k = 0.0;
};

/// Switching function T - S; left is T < S.
GeneralFilippovSystem stommel_system(const StommelModel& m);
Vector stommel_field(const StommelModel& m, const Vector& x);
SquareMatrix stommel_jacobian(const StommelModel& m, const Vector& x);

/// All equilibria at frozen mu, sorted by T - S.
std::vector<StommelEquilibrium> stommel_equilibria(const StommelModel& m);
/// The fold sits where the boundary cubic has k = 0 as a root: mu = 1.
double stommel_fold_mu(const StommelModel& m);

/// Equilibrium on the side T < S (the lower branch), or on the large-k
/// right branch (the upper branch).
std::optional<StommelEquilibrium> stommel_lower_branch(const StommelModel& m);
std::optional<StommelEquilibrium> stommel_upper_branch(const StommelModel& m);

struct TippingRun {
  double mu_start = 1.3;
  double mu_rate = -0.01;
  double t_end = 50.0;
  std::optional<Vector> x0;  // defaults to the stable lower-branch equilibrium at mu_start
  std::optional<double> mu_hold;  // drift stops once mu reaches this value
  void validate() const;
};

/// Integrates (T, S, mu) with mu' = mu_rate (0 after mu_hold is reached). Samples carry the augmented
/// state; state_names are T, S, mu.
Trajectory run_tipping(const StommelModel& m, const TippingRun& run, const FlowOptions& opts = {});

struct WelanderModel {
  double alpha = 1.3;
  double beta = 0.2;
  double epsilon = -0.4;
  double mu = 1.0;
  void validate() const;
};

/// sigma(T, S) = -alpha T + S - epsilon; k = 0 on the left, k = 1 on the right.
GeneralFilippovSystem welander_system(const WelanderModel& m);
/// Regular equilibria (k = 0 then k = 1) labelled by their side of the manifold.
std::vector<Solution> welander_equilibria(const WelanderModel& m);

struct ExampleMapParams {
  double delta_L = 1.2;
  double delta_R = -2.4;
  double alpha = 0.1;
  void validate() const;
};

PwlMap example_map(const ExampleMapParams& p, double mu);
/// Adds E^L = E^R = (0, -x_2^2).
TwoPieceSmoothMap example_map_quadratic(const ExampleMapParams& p, double mu);

struct Bcnf3dParams {
  double tau_L = 0.0, sigma_L = 0.0, delta_L = 0.5;
  double tau_R = 0.0, sigma_R = 1.0, delta_R = 1.5;
};

PwlMap bcnf3d(const Bcnf3dParams& p, double mu);

/// Real roots of x^3 + a2 x^2 + a1 x + a0, ascending, polished by Newton.
std::vector<double> real_cubic_roots(double a2, double a1, double a0);

}  // namespace nsfold
