// SPDX-License-Identifier: Apache-2.0
#include "nsfold/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "nsfold/errors.hpp"
#include "nsfold/map_dynamics.hpp"

namespace nsfold {

namespace {

std::string fmt(double v, int precision = 12) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt(const Vector& v, int precision = 12) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i], precision);
  }
  return s + ")";
}

std::string solution_label(SolutionKind k, bool is_map) {
  switch (k) {
    case SolutionKind::RegularLeft: return is_map ? "fixed point (left)" : "equilibrium (left)";
    case SolutionKind::RegularRight: return is_map ? "fixed point (right)" : "equilibrium (right)";
    case SolutionKind::Pseudo: return "pseudo-equilibrium";
  }
  return "?";
}

nlohmann::json vec_json(const Vector& v) { return nlohmann::json(v.std_vector()); }

Vector initial_state(const ExperimentConfig& cfg) {
  if (!cfg.run.x0.empty()) return Vector(cfg.run.x0);
  return Vector(cfg.system.dim());
}

// Writes `body` behind the provenance header to the output path, or appends
// it to stdout text when no path was given.
void deliver(const ExperimentConfig& cfg, const std::string& path, const std::string& body, CommandResult& res) {
  const std::string content = provenance_header(cfg) + body;
  if (path.empty()) {
    res.output += content;
  } else {
    write_file_atomic(path, content);
    res.output += "wrote " + path + "\n";
  }
}

// Minimum of the certified increment over random states.
double sampled_increment(const SystemConfig& sys, const Certificate& cert, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const std::size_t n = sys.dim();
  double worst = INFINITY;
  for (int k = 0; k < 1000; ++k) {
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = u(rng);
    double inc = INFINITY;
    if (sys.is_map()) {
      const PwlMap m = sys.as_pwl_map();
      inc = dot(cert.direction, m.apply(x)) - dot(cert.direction, x);
    } else if (const auto* o = std::get_if<PwlOde>(&sys.payload)) {
      inc = dot(cert.direction, o->field(x));
    } else if (const auto* f = std::get_if<FilippovForm>(&sys.payload)) {
      if (x[0] > 0.0) x[0] = -x[0];
      inc = std::min(dot(cert.direction, f->field_left(x)), dot(cert.direction, f->c));
    } else if (const auto* h = std::get_if<HybridForm>(&sys.payload)) {
      if (x[0] > 0.0) x[0] = -x[0];
      inc = dot(cert.direction, h->field(x));
    }
    worst = std::min(worst, inc);
  }
  return worst;
}

CommandResult cmd_certify(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  CommandResult res;
  const SystemConfig& sys = cfg.system;
  const bool is_map = sys.is_map();
  std::ostringstream os;
  os << "system " << sys.kind << " (n = " << sys.dim() << "), mu = " << fmt(sys.mu()) << '\n';

  EquilibriumReport rep;
  std::function<Certificate()> certify;
  const char* det_l = "det(I - A_L)";
  const char* det_r = "det(I - A_R)";
  try {
    if (is_map) {
      const PwlMap m = sys.as_pwl_map();
      rep = map_fixed_points(m);
      certify = [m] { return map_certificate(m); };
    } else if (const auto* o = std::get_if<PwlOde>(&sys.payload)) {
      rep = ode_equilibria(*o);
      certify = [o] { return ode_certificate(*o); };
      det_l = "det(A_L)";
      det_r = "det(A_R)";
    } else if (const auto* f = std::get_if<FilippovForm>(&sys.payload)) {
      rep = filippov_report(*f);
      certify = [f] { return filippov_certificate(*f); };
      det_l = "det(A)";
      det_r = "q^T c";
    } else if (const auto* h = std::get_if<HybridForm>(&sys.payload)) {
      rep = hybrid_report(*h);
      certify = [h] { return hybrid_certificate(*h); };
      det_l = "det(A)";
      det_r = "q^T c";
    } else {
      throw Error(ErrorCode::ConfigError, "system.kind: '" + sys.kind + "' is not a truncated form");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidResetLaw) throw;
    os << "DEGENERATE; invalid reset law: " << e.what() << '\n';
    res.output = os.str();
    res.exit_code = exit_code::kDegenerate;
    return res;
  }

  nlohmann::json j;
  j["kind"] = sys.kind;
  j["mu"] = sys.mu();
  j["class"] = to_string(rep.beb_class);
  j["s"] = rep.s;
  j["det_left"] = rep.det_left;
  j["det_right_or_qc"] = rep.det_right_or_qc;
  j["adjugate_row"] = vec_json(rep.adjugate_row);
  j["solutions"] = nlohmann::json::array();

  if (rep.beb_class == BebClass::Degenerate) {
    os << "DEGENERATE; " << rep.degenerate_reason << '\n';
    res.exit_code = exit_code::kDegenerate;
  } else {
    os << "s = " << fmt(rep.s) << ", " << det_l << " = " << fmt(rep.det_left) << ", " << det_r << " = "
       << fmt(rep.det_right_or_qc) << '\n';
    os << "adjugate row = " << fmt(rep.adjugate_row) << '\n';
    for (const Solution& s : rep.solutions) {
      os << solution_label(s.kind, is_map) << ": " << fmt(s.location) << ' ' << to_string(s.admissibility)
         << " (witness " << fmt(s.deciding_value) << ")\n";
      j["solutions"].push_back({{"kind", to_string(s.kind)},
                                {"location", vec_json(s.location)},
                                {"admissibility", to_string(s.admissibility)},
                                {"witness", s.deciding_value}});
    }
    if (rep.beb_class == BebClass::NonsmoothFold && rep.both_virtual()) {
      const Certificate c = certify();
      os << "NONSMOOTH FOLD; certificate w=" << fmt(c.direction) << ", rate=" << fmt(c.rate) << '\n';
      const std::uint64_t seed = ov.seed.value_or(cfg.run.seed);
      const double worst = sampled_increment(sys, c, seed);
      os << "sampled check (seed " << seed << ", 1000 states): min increment " << fmt(worst) << '\n';
      j["certificate"] = {{"w", vec_json(c.direction)}, {"rate", c.rate}, {"sampled_min_increment", worst}};
      res.exit_code = exit_code::kCertified;
    } else if (rep.beb_class == BebClass::NonsmoothFold) {
      os << "NONSMOOTH FOLD; solutions not both virtual at this mu, no certificate\n";
      res.exit_code = exit_code::kNoCertificate;
    } else {
      os << "PERSISTENCE; no certificate\n";
      res.exit_code = exit_code::kNoCertificate;
    }
  }
  if (rep.beb_class == BebClass::Degenerate) j["reason"] = rep.degenerate_reason;
  res.output = os.str();
  const std::string path = ov.out.value_or(cfg.run.out);
  if (!path.empty()) {
    nlohmann::json doc{{"report", j}, {"version", kVersion}, {"config", nlohmann::json::parse(to_json(cfg))}};
    write_file_atomic(path, doc.dump(2) + "\n");
    res.output += "wrote " + path + "\n";
  }
  return res;
}

CommandResult cmd_orbit(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  const SystemConfig& sys = cfg.system;
  if (!sys.is_map())
    throw Error(ErrorCode::ConfigError, "system.kind: orbit needs a map kind");
  const std::size_t steps = ov.budget.value_or(cfg.run.steps);
  if (steps < 1) throw Error(ErrorCode::ConfigError, "run.steps: must be at least 1");
  MapStep step;
  if (const auto* e = std::get_if<ExampleMapSystem>(&sys.payload); e && e->quadratic)
    step = as_step(example_map_quadratic(e->params, e->mu));
  else
    step = as_step(sys.as_pwl_map());

  std::optional<Certificate> cert;
  try {
    cert = map_certificate(sys.as_pwl_map());
  } catch (const Error&) {
  }
  OrbitOptions oo;
  oo.escape_radius = cfg.run.divergence_radius;
  oo.max_period = cfg.run.max_period;
  oo.period_tolerance = cfg.run.period_tolerance;
  const OrbitResult orb = iterate(step, initial_state(cfg), steps, oo);

  const std::size_t n = sys.dim();
  std::ostringstream body;
  body << std::setprecision(17) << 'k';
  for (std::size_t i = 0; i < n; ++i) body << ",x_" << (i + 1);
  body << ",branch";
  if (cert) body << ",wTx";
  body << '\n';
  for (std::size_t k = 0; k < orb.iterates.size(); ++k) {
    const Vector& x = orb.iterates[k];
    body << k;
    for (std::size_t i = 0; i < n; ++i) body << ',' << x[i];
    body << ',' << (x[0] <= 0.0 ? 'L' : 'R');
    if (cert) body << ',' << dot(cert->direction, x);
    body << '\n';
  }
  CommandResult res;
  res.output = "orbit: " + std::to_string(orb.iterates.size() - 1) + " steps, outcome " + to_string(orb.outcome);
  if (orb.value) res.output += " (" + std::to_string(orb.value) + ")";
  res.output += "\n";
  if (cert) res.output += "certificate w=" + fmt(cert->direction) + ", rate=" + fmt(cert->rate) + "\n";
  deliver(cfg, ov.out.value_or(cfg.run.out), body.str(), res);
  return res;
}

CommandResult cmd_flow(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  const SystemConfig& sys = cfg.system;
  const FlowOptions fo = cfg.run.flow_options();
  const Vector x0 = initial_state(cfg);
  const double t_end = cfg.run.t_end;
  Trajectory traj;
  if (const auto* o = std::get_if<PwlOde>(&sys.payload)) {
    traj = integrate_pws_ode(*o, x0, t_end, fo);
  } else if (const auto* f = std::get_if<FilippovForm>(&sys.payload)) {
    traj = integrate_filippov(*f, x0, t_end, fo);
  } else if (const auto* h = std::get_if<HybridForm>(&sys.payload)) {
    traj = integrate_hybrid(*h, x0, t_end, fo);
  } else if (const auto* s = std::get_if<StommelModel>(&sys.payload)) {
    traj = integrate_continuous(stommel_system(*s), x0, s->mu, t_end, fo);
    traj.state_names = {"T", "S"};
  } else if (const auto* w = std::get_if<WelanderModel>(&sys.payload)) {
    traj = integrate_filippov(welander_system(*w), x0, w->mu, t_end, fo);
    traj.state_names = {"T", "S"};
  } else {
    throw Error(ErrorCode::ConfigError, "system.kind: flow needs an ODE kind");
  }
  std::ostringstream body;
  write_trajectory_csv(body, traj);
  CommandResult res;
  const auto& last = traj.samples.back();
  res.output = "flow: " + std::to_string(traj.samples.size()) + " samples, " + std::to_string(traj.events.size()) +
               " events, final t = " + fmt(last.t) + ", x = " + fmt(last.x) + " (" + to_string(last.mode) + ")" +
               (traj.diverged ? ", diverged" : "") + "\n";
  deliver(cfg, ov.out.value_or(cfg.run.out), body.str(), res);
  return res;
}

CommandResult cmd_scan1d(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  const SystemConfig& sys = cfg.system;
  const RunConfig& r = cfg.run;
  std::vector<Scan1dRow> rows;
  if (const auto* s = std::get_if<StommelModel>(&sys.payload)) {
    if (r.param != "mu") throw Error(ErrorCode::ConfigError, "run.param: stommel scans support only mu");
    rows = scan1d_stommel(*s, r.param_min, r.param_max, r.samples);
  } else if (sys.is_map()) {
    MapFamily1d family;
    if (const auto* e = std::get_if<ExampleMapSystem>(&sys.payload)) {
      const MapFamily2d f2 = example_map_family(e->params, e->mu, r.param, r.param);
      family = [f2](double v) { return f2(v, v); };
    } else if (const auto* b = std::get_if<Bcnf3dSystem>(&sys.payload)) {
      const MapFamily2d f2 = bcnf3d_family(b->params, b->mu, r.param, r.param);
      family = [f2](double v) { return f2(v, v); };
    } else {
      if (r.param != "mu") throw Error(ErrorCode::ConfigError, "run.param: pwl-map scans support only mu");
      const PwlMap base = sys.as_pwl_map();
      family = [base](double v) {
        PwlMap m = base;
        m.mu = v;
        return m;
      };
    }
    const Vector x0 = r.x0.empty() ? Vector() : Vector(r.x0);
    const std::size_t budget = ov.budget.value_or(r.budget);
    rows = scan1d(family, r.param_min, r.param_max, r.samples, x0, budget, std::min(r.transient, budget),
                  r.max_period);
  } else {
    throw Error(ErrorCode::ConfigError, "system.kind: scan1d needs a map kind or stommel");
  }
  std::ostringstream body;
  write_scan1d_csv(body, rows, r.param);
  CommandResult res;
  res.output = "scan1d: " + std::to_string(r.samples) + " samples over " + r.param + " in [" + fmt(r.param_min) +
               ", " + fmt(r.param_max) + "], " + std::to_string(rows.size()) + " rows\n";
  deliver(cfg, ov.out.value_or(r.out), body.str(), res);
  return res;
}

CommandResult cmd_scan2d(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  const SystemConfig& sys = cfg.system;
  const RunConfig& r = cfg.run;
  if (!r.param_x || !r.param_y) throw Error(ErrorCode::ConfigError, "run.param_x: scan2d needs param_x and param_y");
  MapFamily2d family;
  if (const auto* e = std::get_if<ExampleMapSystem>(&sys.payload)) {
    family = example_map_family(e->params, e->mu, r.param_x->name, r.param_y->name);
  } else if (const auto* b = std::get_if<Bcnf3dSystem>(&sys.payload)) {
    family = bcnf3d_family(b->params, b->mu, r.param_x->name, r.param_y->name);
  } else {
    throw Error(ErrorCode::ConfigError, "system.kind: scan2d needs example-map or bcnf3d");
  }
  const std::string path = ov.out.value_or(r.out);
  if (path.empty()) throw Error(ErrorCode::ConfigError, "run.out: scan2d needs an output path (--out)");

  GridSpec spec;
  spec.x = {r.param_x->name, r.param_x->min, r.param_x->max, r.param_x->cells};
  spec.y = {r.param_y->name, r.param_y->min, r.param_y->max, r.param_y->cells};
  spec.budget = ov.budget.value_or(r.budget);
  spec.transient = std::min(r.transient, spec.budget);
  spec.max_period = r.max_period;
  spec.divergence_radius = r.divergence_radius;
  spec.period_tolerance = r.period_tolerance;
  if (!r.x0.empty()) spec.x0 = Vector(r.x0);

  const std::size_t threads = resolve_threads(ov.threads.value_or(r.threads));
  const ScanResult result = scan2d(family, spec, static_cast<unsigned>(threads));

  std::ostringstream csv;
  write_scan_csv(csv, result);
  std::ostringstream ppm;
  write_scan_ppm(ppm, result);
  std::ostringstream svg;
  write_scan_svg(svg, result);
  std::filesystem::path base(path);
  const std::string ppm_path = std::filesystem::path(base).replace_extension(".ppm").string();
  const std::string svg_path = std::filesystem::path(base).replace_extension(".svg").string();

  CommandResult res;
  deliver(cfg, path, csv.str(), res);
  write_file_atomic(ppm_path, ppm.str());
  std::string svg_text = svg.str();
  const std::string comment = "<!--\n" + provenance_header(cfg) + "-->\n";
  svg_text.insert(svg_text.find('\n') + 1, comment);
  write_file_atomic(svg_path, svg_text);
  res.output += "wrote " + ppm_path + "\nwrote " + svg_path + "\n";

  std::map<std::string, std::size_t> counts;
  for (const auto& c : result.cells) {
    const std::string key = c.outcome.kind == AttractorKind::Periodic ? "Periodic" : to_string(c.outcome.kind);
    ++counts[key];
  }
  std::string summary = "scan2d: " + std::to_string(result.cells.size()) + " cells on " +
                        std::to_string(threads) + " thread(s) in " + fmt(result.seconds, 4) + " s;";
  for (const auto& [k, v] : counts) summary += " " + k + "=" + std::to_string(v);
  res.output = summary + "\n" + res.output;
  return res;
}

CommandResult cmd_limit_cycle(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  const SystemConfig& sys = cfg.system;
  const RunConfig& r = cfg.run;
  GeneralFilippovSystem g;
  if (const auto* w = std::get_if<WelanderModel>(&sys.payload)) {
    g = welander_system(*w);
  } else if (const auto* f = std::get_if<FilippovForm>(&sys.payload)) {
    g = to_general(*f);
  } else if (const auto* o = std::get_if<PwlOde>(&sys.payload)) {
    g = to_general(*o);
  } else if (const auto* s = std::get_if<StommelModel>(&sys.payload)) {
    g = stommel_system(*s);
  } else {
    throw Error(ErrorCode::ConfigError, "system.kind: limit-cycle needs welander, filippov, pws-ode or stommel");
  }
  if (r.section_point.empty()) throw Error(ErrorCode::ConfigError, "run.section_point: missing");
  LimitCycleOptions lo;
  lo.convergence_tol = r.convergence_tol;
  lo.max_return_time = r.max_return_time;
  lo.divergence_radius = r.divergence_radius;
  lo.flow = r.flow_options();
  const LimitCycleResult lc = limit_cycle(g, Vector(r.section_point), sys.mu(), r.max_returns, lo);

  std::ostringstream body;
  body << std::setprecision(17) << "return,t";
  for (std::size_t i = 0; i < sys.dim(); ++i) body << ",x_" << (i + 1);
  body << ",gap\n";
  for (std::size_t k = 0; k < lc.returns.size(); ++k) {
    body << k << ',' << lc.return_times[k];
    for (std::size_t i = 0; i < sys.dim(); ++i) body << ',' << lc.returns[k][i];
    body << ',';
    if (k > 0) body << lc.gaps[k - 1];
    body << '\n';
  }
  CommandResult res;
  res.output = std::string("limit-cycle: ") + to_string(lc.status) + " after " + std::to_string(lc.returns.size()) +
               " returns";
  if (lc.status == CycleStatus::Cycle)
    res.output += ", period " + fmt(lc.period) + ", section point " + fmt(lc.returns.back());
  res.output += "\n";
  deliver(cfg, ov.out.value_or(r.out), body.str(), res);
  return res;
}

CommandResult cmd_tip(const ExperimentConfig& cfg, const CommandOverrides& ov) {
  const auto* s = std::get_if<StommelModel>(&cfg.system.payload);
  if (!s) throw Error(ErrorCode::ConfigError, "system.kind: tip needs stommel");
  const RunConfig& r = cfg.run;
  TippingRun run;
  run.mu_start = r.mu_start;
  run.mu_rate = r.mu_rate;
  run.mu_hold = r.mu_hold;
  run.t_end = r.t_end;
  if (!r.x0.empty()) run.x0 = Vector(r.x0);
  const Trajectory traj = run_tipping(*s, run, r.flow_options());

  std::ostringstream body;
  body << std::setprecision(17) << "# event,t,kind\n";
  for (const auto& e : traj.events) body << "# event," << e.t << ',' << to_string(e.kind) << '\n';
  body << "t,mu,T,S,mode\n";
  for (const auto& smp : traj.samples)
    body << smp.t << ',' << smp.x[2] << ',' << smp.x[0] << ',' << smp.x[1] << ',' << to_string(smp.mode) << '\n';
  CommandResult res;
  const auto& last = traj.samples.back();
  res.output = "tip: mu " + fmt(r.mu_start) + " -> " + fmt(last.x[2]) + ", final (T, S) = (" + fmt(last.x[0]) +
               ", " + fmt(last.x[1]) + "), " + std::to_string(traj.events.size()) + " switching events\n";
  deliver(cfg, ov.out.value_or(r.out), body.str(), res);
  return res;
}

}  // namespace

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NSFOLD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

CommandResult run_command(const std::string& name, ExperimentConfig cfg, const CommandOverrides& ov) {
  try {
    if (ov.threads) cfg.run.threads = *ov.threads;
    if (ov.seed) cfg.run.seed = *ov.seed;
    if (ov.out) cfg.run.out = *ov.out;
    if (ov.budget) {
      if (name == "orbit") cfg.run.steps = *ov.budget;
      else cfg.run.budget = *ov.budget;
      cfg.run.transient = std::min(cfg.run.transient, cfg.run.budget);
    }
    if (name == "certify") return cmd_certify(cfg, ov);
    if (name == "orbit") return cmd_orbit(cfg, ov);
    if (name == "flow") return cmd_flow(cfg, ov);
    if (name == "scan1d") return cmd_scan1d(cfg, ov);
    if (name == "scan2d") return cmd_scan2d(cfg, ov);
    if (name == "limit-cycle") return cmd_limit_cycle(cfg, ov);
    if (name == "tip") return cmd_tip(cfg, ov);
    return {exit_code::kConfigError, "", "unknown command '" + name + "'\n"};
  } catch (const Error& e) {
    CommandResult res;
    switch (e.code()) {
      case ErrorCode::ConfigError: res.exit_code = exit_code::kConfigError; break;
      case ErrorCode::IoError: res.exit_code = exit_code::kIoError; break;
      case ErrorCode::InvalidArgument:
      case ErrorCode::DimensionMismatch: res.exit_code = exit_code::kConfigError; break;
      default: res.exit_code = exit_code::kNumericalFailure; break;
    }
    res.diagnostics = std::string("error [") + to_string(e.code()) + "] " + e.what() + "\n";
    return res;
  }
}

}  // namespace nsfold
