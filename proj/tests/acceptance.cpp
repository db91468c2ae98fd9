// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "nsfold/certificates.hpp"
#include "nsfold/errors.hpp"
#include "nsfold/flow_dynamics.hpp"
#include "nsfold/linalg.hpp"
#include "nsfold/map_dynamics.hpp"
#include "nsfold/models.hpp"
#include "nsfold/scan.hpp"
#include "oracles.hpp"

using namespace nsfold;

namespace {

// Tolerances and limits.
constexpr double kAdjTol = 1e-9;
constexpr double kFirstRowTol = 1e-12;
constexpr double kMapIncrementSlack = 1e-9;
constexpr double kOrbitSlack = 1e-12;
constexpr double kPhiSlack = 1e-12;
constexpr double kRateFactor = 1.0 - 1e-6;
constexpr double kTipFinalTol = 1e-2;
constexpr double kTipTrackTol = 5e-2;
constexpr double kCycleReturnTol = 1e-5;
constexpr double kTangencyTol = 1e-8;
constexpr double kStickVelocityTol = 1e-8;
constexpr double kManifoldTol = 1e-9;
constexpr double kStateRadius = 1e6;

struct Outcome {
  bool pass = true;
  std::string detail;
};

SquareMatrix to_matrix(const oracle::Mat& a) { return SquareMatrix::from_rows(a); }
Vector to_vector(const std::vector<double>& v) { return Vector(v); }

// Sliding/sticking samples gathered by suites 5 and 8 for criterion 9.
struct ManifoldStats {
  std::size_t sliding = 0, sticking = 0;
  double worst_tangency = 0.0, worst_sigma = 0.0, worst_velocity = 0.0, worst_stick_x1 = 0.0;
};
ManifoldStats g_manifold;

void record_sliding(const GeneralFilippovSystem& sys, double mu, const Trajectory& tr) {
  for (const auto& s : tr.samples) {
    if (s.mode != FlowMode::Sliding) continue;
    ++g_manifold.sliding;
    const Vector fs = sliding_field(sys, s.x, mu);
    g_manifold.worst_tangency = std::max(g_manifold.worst_tangency, std::abs(dot(sys.switching_gradient(s.x), fs)));
    g_manifold.worst_sigma = std::max(g_manifold.worst_sigma, std::abs(sys.switching_fn(s.x)));
  }
}

void record_sticking(const HybridForm& h, const Trajectory& tr) {
  for (const auto& s : tr.samples) {
    if (s.mode != FlowMode::Sticking) continue;
    ++g_manifold.sticking;
    g_manifold.worst_velocity = std::max(g_manifold.worst_velocity, std::abs(h.velocity(s.x)));
    g_manifold.worst_stick_x1 = std::max(g_manifold.worst_stick_x1, std::abs(s.x[0]));
  }
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> expo(-1.0, 1.0);
  double worst = 0.0, worst_row = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const double scale = std::pow(10.0, expo(rng));
    oracle::Mat a = oracle::random_matrix(rng, n, -scale, scale);
    const SquareMatrix A = to_matrix(a);
    const SquareMatrix adj = adjugate(A);
    const double d = determinant(A);
    const SquareMatrix prod = A * adj;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(prod(i, j) - (i == j ? d : 0.0)));
    const double bound = kAdjTol * std::max(1.0, std::pow(A.norm_max(), static_cast<double>(n)));
    worst = std::max(worst, err / bound);

    const Vector row = first_row_of_adjugate(A);
    oracle::Mat edited = a;
    for (std::size_t i = 0; i < n; ++i) edited[i][0] = 5.0 * scale * expo(rng);
    const Vector row2 = first_row_of_adjugate(to_matrix(edited));
    for (std::size_t i = 0; i < n; ++i) worst_row = std::max(worst_row, std::abs(row[i] - row2[i]));
  }
  Outcome o;
  o.pass = worst <= 1.0 && worst_row <= kFirstRowTol;
  std::ostringstream os;
  os << "200 matrices, max residual/bound " << worst << ", first-row drift " << worst_row;
  o.detail = os.str();
  return o;
}

// Random continuous PWL map with a certified fold, rate 1.
PwlMap random_fold_map(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    oracle::Mat al = oracle::random_matrix(rng, n, -1.5, 1.5);
    oracle::Mat ar = al;
    const auto col = oracle::random_vector(rng, n, -1.5, 1.5);
    for (std::size_t i = 0; i < n; ++i) ar[i][0] = col[i];
    oracle::Mat il = al, ir = ar;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        il[i][j] = (i == j) - al[i][j];
        ir[i][j] = (i == j) - ar[i][j];
      }
    const double dl = oracle::det(il), dr = oracle::det(ir);
    if (!(dl * dr < 0.0) || std::abs(dl) < 1e-2 || std::abs(dr) < 1e-2) continue;
    const auto b = oracle::random_vector(rng, n);
    const auto p = oracle::adjugate(il)[0];
    double pb = 0.0;
    for (std::size_t i = 0; i < n; ++i) pb += p[i] * b[i];
    if (std::abs(pb) < 0.1) continue;
    PwlMap m{to_matrix(al), to_matrix(ar), to_vector(b), (dl > 0 ? 1.0 : -1.0) / pb};
    return m;
  }
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  double worst_margin = INFINITY;
  int not_diverged = 0, rejected = 0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + k % 3;
    const PwlMap m = random_fold_map(rng, n);
    Certificate c;
    try {
      c = map_certificate(m);
    } catch (const Error&) {
      ++rejected;
      continue;
    }
    for (int j = 0; j < 1000; ++j) {
      Vector x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = u(rng);
      const double inc = dot(c.direction, m.apply(x)) - dot(c.direction, x);
      worst_margin = std::min(worst_margin, inc - c.rate);
    }
    const Vector x0(n);
    const ClassifyOptions opts;
    const std::size_t budget = certified_escape_bound(c, x0, opts.divergence_radius);
    const AttractorClass cls = classify_attractor(m, x0, 0, 50, budget, opts);
    if (cls.kind != AttractorKind::Diverged) ++not_diverged;
  }
  Outcome o;
  o.pass = rejected == 0 && not_diverged == 0 && worst_margin >= -kMapIncrementSlack;
  std::ostringstream os;
  os << "500 maps, min (increment - rate) " << worst_margin << ", not diverged " << not_diverged
     << ", certificate refused " << rejected;
  o.detail = os.str();
  return o;
}

Outcome criterion3() {
  const PwlMap m = example_map({1.2, -2.4, 0.1}, 1.0);
  const Certificate c = map_certificate(m);
  Outcome o;
  o.pass = c.direction == Vector{1.0, 1.0} && c.rate == 1.0;
  const OrbitResult orb = iterate(m, Vector{0.0, 0.0}, 50, OrbitOptions{1e300, 50, 1e-8});
  double worst = INFINITY;
  for (std::size_t k = 0; k + 1 < orb.iterates.size(); ++k)
    worst = std::min(worst, dot(c.direction, orb.iterates[k + 1]) - dot(c.direction, orb.iterates[k]));
  o.pass = o.pass && orb.iterates.size() == 51 && worst >= 1.0 - kOrbitSlack;
  std::ostringstream os;
  os << "w=(" << c.direction[0] << "," << c.direction[1] << "), rate=" << c.rate << ", min increment over 50 steps "
     << worst;
  o.detail = os.str();
  return o;
}

Outcome criterion4() {
  const double dl = 1.2, dr = -2.4, alpha = 0.1;
  const double eta = std::min({alpha / (2 * dl * dl), alpha / (2 * dr * dr), 1.0 / std::sqrt(2.0)});
  const PhiMonitor mon = quadratic_map_monitor(dl, dr, alpha);
  Outcome o;
  o.pass = std::abs(mon.eta - eta) <= 1e-15;
  std::ostringstream os;
  os << "eta " << eta;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double mu : {1e-3, 1e-2, 1e-1}) {
    const TwoPieceSmoothMap f = example_map_quadratic({dl, dr, alpha}, mu);
    const PhiCheckReport rep = phi_increment_check(f, mon, mu, 10'000);
    const bool phi_ok = rep.min_increment >= mu - kPhiSlack;
    const std::size_t bound = static_cast<std::size_t>(std::ceil(6.0 * eta / mu));
    std::size_t worst = 0;
    bool escape_ok = true;
    for (int j = 0; j < 100; ++j) {
      Vector x0(2);
      do {
        x0 = Vector{eta * u(rng), eta * u(rng)};
      } while (x0.norm() > eta);
      const auto t = escape_time(as_step(f), x0, eta, bound);
      if (!t) {
        escape_ok = false;
      } else {
        worst = std::max(worst, *t);
      }
    }
    o.pass = o.pass && phi_ok && escape_ok;
    os << "; mu " << mu << ": min dPhi-mu " << rep.min_increment - mu << ", worst escape " << worst << "/" << bound
       << (escape_ok ? "" : " (some orbit did not escape)");
  }
  o.detail = os.str();
  return o;
}

// Per-interval monotonicity of w^T x along samples.
struct MonotoneCheck {
  double worst_ratio = INFINITY;  // min over intervals of (delta / (rate dt))
  bool ok(double) const { return worst_ratio >= kRateFactor; }
  void add(const Trajectory& tr, const Vector& w, double rate) {
    for (std::size_t k = 0; k + 1 < tr.samples.size(); ++k) {
      const double dt = tr.samples[k + 1].t - tr.samples[k].t;
      const double dw = dot(w, tr.samples[k + 1].x) - dot(w, tr.samples[k].x);
      worst_ratio = std::min(worst_ratio, dw / (rate * dt));
    }
  }
};

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

Outcome criterion5() {
  std::mt19937_64 rng(505);
  const double t_end = 20.0;
  FlowOptions fo;
  // Absolute manifold tolerances need states well inside double range.
  fo.step.divergence_radius = kStateRadius;
  MonotoneCheck ode_chk, fil_chk, hyb_chk;
  int failures = 0;
  std::size_t impacts = 0, bad_impacts = 0;
  std::string first_error;

  // Continuous PWL ODEs.
  for (int k = 0; k < 50;) {
    const std::size_t n = 2 + k % 2;
    oracle::Mat al = oracle::random_matrix(rng, n), ar = al;
    const auto col = oracle::random_vector(rng, n);
    for (std::size_t i = 0; i < n; ++i) ar[i][0] = col[i];
    const double dl = oracle::det(al), dr = oracle::det(ar);
    if (!(dl * dr < 0.0) || std::abs(dl) < 1e-2 || std::abs(dr) < 1e-2) continue;
    const auto b = oracle::random_vector(rng, n);
    const auto q = oracle::adjugate(al)[0];
    double qb = 0.0;
    for (std::size_t i = 0; i < n; ++i) qb += q[i] * b[i];
    if (std::abs(qb) < 0.1) continue;
    const PwlOde o{to_matrix(al), to_matrix(ar), to_vector(b), -sign_of(dl) / qb};
    ++k;
    try {
      const Certificate c = ode_certificate(o);
      const Trajectory tr = integrate_pws_ode(o, to_vector(oracle::random_vector(rng, n)), t_end, fo);
      ode_chk.add(tr, c.direction, c.rate);
    } catch (const std::exception& e) {
      ++failures;
      if (first_error.empty()) first_error = e.what();
    }
  }

  // Filippov forms.
  for (int k = 0; k < 50;) {
    const std::size_t n = 2 + k % 2;
    const oracle::Mat a = oracle::random_matrix(rng, n);
    const double d = oracle::det(a);
    if (std::abs(d) < 1e-2) continue;
    const auto b = oracle::random_vector(rng, n);
    const auto c = oracle::random_vector(rng, n);
    if (std::abs(c[0]) < 0.1) continue;
    const auto q = oracle::adjugate(a)[0];
    double qb = 0.0, qc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      qb += q[i] * b[i];
      qc += q[i] * c[i];
    }
    if (!(d * qc < 0.0) || std::abs(qc) < 0.1 || std::abs(qb) < 0.1) continue;
    const FilippovForm f{to_matrix(a), to_vector(b), to_vector(c), -sign_of(d) / qb};
    ++k;
    try {
      const Certificate cert = filippov_certificate(f);
      const Trajectory tr = integrate_filippov(f, to_vector(oracle::random_vector(rng, n)), t_end, fo);
      fil_chk.add(tr, cert.direction, cert.rate);
      record_sliding(to_general(f), f.mu, tr);
    } catch (const std::exception& e) {
      ++failures;
      if (first_error.empty()) first_error = e.what();
    }
  }

  // Impacting hybrid forms.
  std::uniform_real_distribution<double> kap(-2.5, -1.2);
  for (int k = 0; k < 50;) {
    const std::size_t n = 2 + k % 2;
    const oracle::Mat a = oracle::random_matrix(rng, n);
    const double d = oracle::det(a);
    if (std::abs(d) < 1e-2) continue;
    const auto b = oracle::random_vector(rng, n);
    auto c = oracle::random_vector(rng, n);
    c[0] = 0.0;
    double kraw = 0.0;
    for (std::size_t j = 0; j < n; ++j) kraw += a[0][j] * c[j];
    if (std::abs(kraw) < 0.1) continue;
    const double target = kap(rng);
    for (auto& v : c) v *= target / kraw;
    const auto q = oracle::adjugate(a)[0];
    double qb = 0.0, qc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      qb += q[i] * b[i];
      qc += q[i] * c[i];
    }
    if (!(d * qc < 0.0) || std::abs(qc) < 0.1 || std::abs(qb) < 0.1) continue;
    const HybridForm h{to_matrix(a), to_vector(b), to_vector(c), -sign_of(d) / qb};
    ++k;
    try {
      const Certificate cert = hybrid_certificate(h);
      auto x0 = oracle::random_vector(rng, n);
      x0[0] = -std::abs(x0[0]);
      const Trajectory tr = integrate_hybrid(h, to_vector(x0), t_end, fo);
      hyb_chk.add(tr, cert.direction, cert.rate);
      record_sticking(h, tr);
      for (const auto& e : tr.events) {
        if (e.kind != EventKind::Impact) continue;
        ++impacts;
        if (!(dot(cert.direction, e.after) > dot(cert.direction, e.before))) ++bad_impacts;
      }
    } catch (const std::exception& e) {
      ++failures;
      if (first_error.empty()) first_error = e.what();
    }
  }

  Outcome o;
  o.pass = failures == 0 && ode_chk.ok(0) && fil_chk.ok(0) && hyb_chk.ok(0) && bad_impacts == 0;
  std::ostringstream os;
  os << "min interval rate ratio: ode " << ode_chk.worst_ratio << ", filippov " << fil_chk.worst_ratio << ", hybrid "
     << hyb_chk.worst_ratio << "; impacts " << impacts << " (non-increasing " << bad_impacts << ")";
  if (failures) os << "; " << failures << " runs threw: " << first_error;
  o.detail = os.str();
  return o;
}

ScanResult bcnf_scan(unsigned threads) {
  GridSpec spec;
  spec.x = {"tau_L", -2.0, 2.0, 100};
  spec.y = {"tau_R", -2.0, 2.0, 100};
  spec.budget = 10'000;
  spec.transient = 9'000;
  spec.max_period = 50;
  const Bcnf3dParams base{0.0, 0.0, 0.5, 0.0, 1.0, 1.5};
  return scan2d(bcnf3d_family(base, 1.0, "tau_L", "tau_R"), spec, threads);
}

ScanResult g_scan;

Outcome criterion6() {
  g_scan = bcnf_scan(1);
  const ScanResult& r = g_scan;
  const double h = r.spec.x.width();
  std::size_t inside = 0, inside_bad = 0;
  for (const auto& c : r.cells) {
    if (c.px < 0.5 - h && c.py > 0.5 + h) {
      ++inside;
      if (c.outcome.kind != AttractorKind::Diverged) ++inside_bad;
    }
  }
  // Corner cell index: (0.5 + 2) / h - 0.5.
  const long corner = std::lround((0.5 - r.spec.x.min) / h - 0.5);
  int quadrants_ok = 0;
  const int signs[3][2] = {{1, 1}, {-1, -1}, {1, -1}};
  std::ostringstream os;
  for (const auto& s : signs) {
    bool found = false;
    for (long dx = 1; dx <= 3 && !found; ++dx)
      for (long dy = 1; dy <= 3 && !found; ++dy) {
        const auto& c = r.at(static_cast<std::size_t>(corner + s[0] * dx), static_cast<std::size_t>(corner + s[1] * dy));
        if (c.outcome.kind != AttractorKind::Diverged) found = true;
      }
    if (found) ++quadrants_ok;
  }
  Outcome o;
  o.pass = inside > 0 && inside_bad == 0 && quadrants_ok == 3;
  os << inside << " fold-quadrant cells, " << inside_bad << " not diverged; quadrants with an attractor near corner "
     << quadrants_ok << "/3; scan " << r.seconds << " s";
  o.detail = os.str();
  return o;
}

std::pair<double, double> stommel_upper(double alpha, double beta, double mu) {
  double T = NAN, S = NAN, best_k = -1.0;
  for (const auto& r : oracle::stommel_roots(alpha, beta, mu)) {
    if (r.left) continue;
    const double k = alpha * beta * (r.T - r.S);
    if (k > best_k) {
      best_k = k;
      T = r.T;
      S = r.S;
    }
  }
  return {T, S};
}

Outcome criterion7() {
  const double alpha = 5.0, beta = 0.2;
  StommelModel m{alpha, beta, 1.3};
  TippingRun run;
  run.mu_start = 1.3;
  run.mu_rate = -0.01;
  run.t_end = 50.0;
  const Trajectory ramp = run_tipping(m, run);
  // Drift stops at 0.8 and the state is read 10 time units later.
  run.mu_hold = 0.8;
  run.t_end = 60.0;
  const Trajectory held = run_tipping(m, run);

  const auto [uT, uS] = stommel_upper(alpha, beta, 0.8);
  const auto& at_08 = ramp.samples.back();
  const double lag = std::hypot(at_08.x[0] - uT, at_08.x[1] - uS);
  const auto& last = held.samples.back();
  const double final_err = std::hypot(last.x[0] - uT, last.x[1] - uS);

  double track_err = 0.0;
  for (const auto& s : ramp.samples) {
    const double mu = s.x[2];
    if (mu < 1.05) continue;
    double best = INFINITY;
    for (const auto& r : oracle::stommel_roots(alpha, beta, mu))
      if (r.left) best = std::min(best, std::hypot(s.x[0] - r.T, s.x[1] - r.S));
    track_err = std::max(track_err, best);
  }
  Outcome o;
  o.pass = std::abs(at_08.x[2] - 0.8) <= 1e-9 && std::abs(last.x[2] - 0.8) <= 1e-12 && final_err <= kTipFinalTol &&
           track_err <= kTipTrackTol;
  std::ostringstream os;
  os << "distance to upper branch: " << lag << " as mu passes 0.8 (drift lag), " << final_err
     << " with mu held at 0.8 for 10 time units; max lower-branch deviation for mu>=1.05 " << track_err;
  o.detail = os.str();
  return o;
}

Outcome criterion8() {
  const WelanderModel w{1.3, 0.2, -0.4, 1.0};
  const auto eqs = welander_equilibria(w);
  bool both_virtual = eqs.size() == 2;
  for (const auto& e : eqs) both_virtual = both_virtual && e.admissibility == Admissibility::Virtual;

  const GeneralFilippovSystem sys = welander_system(w);
  const Vector start{0.5, 0.5};
  const LimitCycleResult lc = limit_cycle(sys, start, w.mu, 500);

  bool contracting = lc.gaps.size() >= 2;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k + 1 < lc.gaps.size(); ++k) {
    if (lc.gaps[k] < 1e-9) break;
    const double ratio = lc.gaps[k + 1] / lc.gaps[k];
    worst_ratio = std::max(worst_ratio, ratio);
  }
  contracting = contracting && worst_ratio < 1.0;

  double back = INFINITY;
  if (lc.status == CycleStatus::Cycle) {
    const Vector p = lc.returns.back() + Vector{1e-3, 0.0};
    const LimitCycleResult lc2 = limit_cycle(sys, p, w.mu, 500);
    if (lc2.status == CycleStatus::Cycle) back = (lc2.returns.back() - lc.returns.back()).norm();
    // One period of samples for the manifold statistics.
    FlowOptions fo;
    const Trajectory tr = integrate_filippov(sys, lc.returns.back(), w.mu, lc.period, fo);
    record_sliding(sys, w.mu, tr);
  }
  Outcome o;
  o.pass = both_virtual && lc.status == CycleStatus::Cycle && lc.period > 0.0 && contracting &&
           back <= kCycleReturnTol;
  std::ostringstream os;
  os << "equilibria " << to_string(eqs[0].admissibility) << "/" << to_string(eqs[1].admissibility) << ", "
     << to_string(lc.status) << " period " << lc.period << " after " << lc.returns.size()
     << " returns, max gap ratio " << worst_ratio << ", perturbed return distance " << back;
  o.detail = os.str();
  return o;
}

Outcome criterion9() {
  const ManifoldStats& s = g_manifold;
  Outcome o;
  o.pass = s.sliding > 0 && s.sticking > 0 && s.worst_tangency <= kTangencyTol && s.worst_sigma <= kManifoldTol &&
           s.worst_velocity <= kStickVelocityTol && s.worst_stick_x1 <= kManifoldTol;
  std::ostringstream os;
  os << s.sliding << " sliding samples (max |grad^T f^S| " << s.worst_tangency << ", max |sigma| " << s.worst_sigma
     << "), " << s.sticking << " sticking samples (max |v| " << s.worst_velocity << ", max |x_1| " << s.worst_stick_x1
     << ")";
  o.detail = os.str();
  return o;
}

Outcome criterion10() {
  std::ostringstream ref;
  write_scan_csv(ref, g_scan);
  Outcome o;
  std::ostringstream os;
  os << "threads 1";
  for (unsigned threads : {2u, 4u, 7u}) {
    std::ostringstream other;
    write_scan_csv(other, bcnf_scan(threads));
    const bool same = other.str() == ref.str();
    o.pass = o.pass && same;
    os << (same ? " = " : " != ") << "threads " << threads;
  }
  os << " (" << ref.str().size() << " bytes)";
  o.detail = os.str();
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "adjugate identities", 1.0, criterion1},
      {2, "map certificate suite", 30.0, criterion2},
      {3, "example map orbit", 1.0, criterion3},
      {4, "quadratic map escape", 10.0, criterion4},
      {5, "flow certificate suites", 120.0, criterion5},
      {6, "3D normal form scan", 120.0, criterion6},
      {7, "Stommel tipping", 10.0, criterion7},
      {8, "Welander limit cycle", 10.0, criterion8},
      {9, "sliding and sticking invariants", INFINITY, criterion9},
      {10, "scan determinism", INFINITY, criterion10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.2f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
