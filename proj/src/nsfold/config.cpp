// SPDX-License-Identifier: Apache-2.0
#include "nsfold/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "nsfold/errors.hpp"

namespace nsfold {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, field + ": " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) fail(where + "." + k, "unknown key");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + "." + key, "missing");
  return obj.at(key);
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

std::size_t get_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(field, "expected a non-negative integer");
  const auto i = v.get<long long>();
  if (i < 0) fail(field, "expected a non-negative integer");
  return static_cast<std::size_t>(i);
}

std::vector<double> get_list(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Vector get_vector(const json& obj, const std::string& where, const char* key) {
  const std::string field = where + "." + key;
  std::vector<double> vals = get_list(require(obj, where, key), field);
  if (vals.empty()) fail(field, "must not be empty");
  return Vector(std::move(vals));
}

SquareMatrix get_matrix(const json& obj, const std::string& where, const char* key, std::size_t n) {
  const std::string field = where + "." + key;
  const json& v = require(obj, where, key);
  if (!v.is_array() || v.size() != n) fail(field, "expected " + std::to_string(n) + " rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    rows.push_back(get_list(v[i], rf));
    if (rows.back().size() != n) fail(rf, "expected " + std::to_string(n) + " entries");
  }
  return SquareMatrix::from_rows(rows);
}

double get_or(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj.at(key), where + "." + key);
}

json matrix_json(const SquareMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json vector_json(const Vector& v) { return json(v.std_vector()); }

// Runs a kind-specific validator and rewrites its error as a config error.
template <class F>
void validated(const std::string& where, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(where, e.what());
  }
}

SystemConfig parse_system(const json& s) {
  const std::string where = "system";
  if (!s.is_object()) fail(where, "expected an object");
  const json& kind_v = require(s, where, "kind");
  if (!kind_v.is_string()) fail("system.kind", "expected a string");
  SystemConfig cfg;
  cfg.kind = kind_v.get<std::string>();
  const double mu = get_number(require(s, where, "mu"), "system.mu");
  const std::string& k = cfg.kind;

  if (k == "pwl-map" || k == "pws-ode") {
    check_keys(s, where, {"kind", "mu", "A_L", "A_R", "b"});
    const Vector b = get_vector(s, where, "b");
    const SquareMatrix AL = get_matrix(s, where, "A_L", b.size());
    const SquareMatrix AR = get_matrix(s, where, "A_R", b.size());
    if (k == "pwl-map") {
      PwlMap m{AL, AR, b, mu};
      validated(where, [&] { m.validate(); });
      cfg.payload = m;
    } else {
      PwlOde o{AL, AR, b, mu};
      validated(where, [&] { o.validate(); });
      cfg.payload = o;
    }
  } else if (k == "filippov" || k == "hybrid") {
    check_keys(s, where, {"kind", "mu", "A", "b", "c"});
    const Vector b = get_vector(s, where, "b");
    const Vector c = get_vector(s, where, "c");
    if (c.size() != b.size()) fail("system.c", "length must match b");
    const SquareMatrix A = get_matrix(s, where, "A", b.size());
    if (k == "filippov") {
      FilippovForm f{A, b, c, mu};
      validated(where, [&] { f.validate(); });
      cfg.payload = f;
    } else {
      HybridForm h{A, b, c, mu};
      validated(where, [&] { h.validate(); });
      cfg.payload = h;
    }
  } else if (k == "stommel") {
    check_keys(s, where, {"kind", "mu", "alpha", "beta"});
    StommelModel m{get_or(s, where, "alpha", 5.0), get_or(s, where, "beta", 0.2), mu};
    validated(where, [&] { m.validate(); });
    cfg.payload = m;
  } else if (k == "welander") {
    check_keys(s, where, {"kind", "mu", "alpha", "beta", "epsilon"});
    WelanderModel m{get_or(s, where, "alpha", 1.3), get_or(s, where, "beta", 0.2),
                    get_or(s, where, "epsilon", -0.4), mu};
    validated(where, [&] { m.validate(); });
    cfg.payload = m;
  } else if (k == "example-map" || k == "example-map-quadratic") {
    check_keys(s, where, {"kind", "mu", "delta_L", "delta_R", "alpha"});
    ExampleMapSystem e;
    e.params = {get_or(s, where, "delta_L", 1.2), get_or(s, where, "delta_R", -2.4), get_or(s, where, "alpha", 0.1)};
    e.mu = mu;
    e.quadratic = k == "example-map-quadratic";
    validated(where, [&] { e.params.validate(); });
    cfg.payload = e;
  } else if (k == "bcnf3d") {
    check_keys(s, where, {"kind", "mu", "tau_L", "sigma_L", "delta_L", "tau_R", "sigma_R", "delta_R"});
    Bcnf3dSystem b;
    b.params = {get_or(s, where, "tau_L", 0.0), get_or(s, where, "sigma_L", 0.0), get_or(s, where, "delta_L", 0.5),
                get_or(s, where, "tau_R", 0.0), get_or(s, where, "sigma_R", 1.0), get_or(s, where, "delta_R", 1.5)};
    b.mu = mu;
    cfg.payload = b;
  } else {
    fail("system.kind", "unknown kind '" + k + "'");
  }
  return cfg;
}

AxisConfig parse_axis(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
  check_keys(v, where, {"name", "min", "max", "cells"});
  AxisConfig a;
  const json& name = require(v, where, "name");
  if (!name.is_string()) fail(where + ".name", "expected a string");
  a.name = name.get<std::string>();
  a.min = get_number(require(v, where, "min"), where + ".min");
  a.max = get_number(require(v, where, "max"), where + ".max");
  a.cells = get_count(require(v, where, "cells"), where + ".cells");
  return a;
}

RunConfig parse_run(const json& r) {
  const std::string where = "run";
  RunConfig c;
  if (r.is_null()) return c;
  if (!r.is_object()) fail(where, "expected an object");
  check_keys(r, where,
             {"x0", "steps", "t_end", "budget", "transient", "max_period", "divergence_radius", "period_tolerance",
              "rtol", "atol", "max_step", "event_tol", "param_x", "param_y", "param", "param_min", "param_max",
              "samples", "mu_start", "mu_rate", "mu_hold", "section_point", "max_returns", "convergence_tol",
              "max_return_time", "threads", "seed", "out"});
  auto num = [&](const char* key, double& dst) {
    if (r.contains(key)) dst = get_number(r.at(key), where + "." + key);
  };
  auto cnt = [&](const char* key, std::size_t& dst) {
    if (r.contains(key)) dst = get_count(r.at(key), where + "." + key);
  };
  if (r.contains("x0")) c.x0 = get_list(r.at("x0"), "run.x0");
  if (r.contains("section_point")) c.section_point = get_list(r.at("section_point"), "run.section_point");
  cnt("steps", c.steps);
  num("t_end", c.t_end);
  cnt("budget", c.budget);
  cnt("transient", c.transient);
  cnt("max_period", c.max_period);
  num("divergence_radius", c.divergence_radius);
  num("period_tolerance", c.period_tolerance);
  num("rtol", c.rtol);
  num("atol", c.atol);
  num("max_step", c.max_step);
  num("event_tol", c.event_tol);
  if (r.contains("param_x")) c.param_x = parse_axis(r.at("param_x"), "run.param_x");
  if (r.contains("param_y")) c.param_y = parse_axis(r.at("param_y"), "run.param_y");
  if (r.contains("param")) {
    if (!r.at("param").is_string()) fail("run.param", "expected a string");
    c.param = r.at("param").get<std::string>();
  }
  num("param_min", c.param_min);
  num("param_max", c.param_max);
  cnt("samples", c.samples);
  num("mu_start", c.mu_start);
  num("mu_rate", c.mu_rate);
  if (r.contains("mu_hold")) c.mu_hold = get_number(r.at("mu_hold"), "run.mu_hold");
  cnt("max_returns", c.max_returns);
  num("convergence_tol", c.convergence_tol);
  num("max_return_time", c.max_return_time);
  cnt("threads", c.threads);
  if (r.contains("seed")) c.seed = get_count(r.at("seed"), "run.seed");
  if (r.contains("out")) {
    if (!r.at("out").is_string()) fail("run.out", "expected a string");
    c.out = r.at("out").get<std::string>();
  }
  return c;
}

json system_json(const SystemConfig& s) {
  json j;
  j["kind"] = s.kind;
  j["mu"] = s.mu();
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PwlMap> || std::is_same_v<T, PwlOde>) {
          j["A_L"] = matrix_json(p.A_L);
          j["A_R"] = matrix_json(p.A_R);
          j["b"] = vector_json(p.b);
        } else if constexpr (std::is_same_v<T, FilippovForm> || std::is_same_v<T, HybridForm>) {
          j["A"] = matrix_json(p.A);
          j["b"] = vector_json(p.b);
          j["c"] = vector_json(p.c);
        } else if constexpr (std::is_same_v<T, StommelModel>) {
          j["alpha"] = p.alpha;
          j["beta"] = p.beta;
        } else if constexpr (std::is_same_v<T, WelanderModel>) {
          j["alpha"] = p.alpha;
          j["beta"] = p.beta;
          j["epsilon"] = p.epsilon;
        } else if constexpr (std::is_same_v<T, ExampleMapSystem>) {
          j["delta_L"] = p.params.delta_L;
          j["delta_R"] = p.params.delta_R;
          j["alpha"] = p.params.alpha;
        } else {
          j["tau_L"] = p.params.tau_L;
          j["sigma_L"] = p.params.sigma_L;
          j["delta_L"] = p.params.delta_L;
          j["tau_R"] = p.params.tau_R;
          j["sigma_R"] = p.params.sigma_R;
          j["delta_R"] = p.params.delta_R;
        }
      },
      s.payload);
  return j;
}

json axis_json(const AxisConfig& a) { return {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"cells", a.cells}}; }

json run_json(const RunConfig& c) {
  json j;
  j["x0"] = c.x0;
  j["steps"] = c.steps;
  j["t_end"] = c.t_end;
  j["budget"] = c.budget;
  j["transient"] = c.transient;
  j["max_period"] = c.max_period;
  j["divergence_radius"] = c.divergence_radius;
  j["period_tolerance"] = c.period_tolerance;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["max_step"] = c.max_step;
  j["event_tol"] = c.event_tol;
  if (c.param_x) j["param_x"] = axis_json(*c.param_x);
  if (c.param_y) j["param_y"] = axis_json(*c.param_y);
  j["param"] = c.param;
  j["param_min"] = c.param_min;
  j["param_max"] = c.param_max;
  j["samples"] = c.samples;
  j["mu_start"] = c.mu_start;
  j["mu_rate"] = c.mu_rate;
  if (c.mu_hold) j["mu_hold"] = *c.mu_hold;
  j["section_point"] = c.section_point;
  j["max_returns"] = c.max_returns;
  j["convergence_tol"] = c.convergence_tol;
  j["max_return_time"] = c.max_return_time;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["out"] = c.out;
  return j;
}

}  // namespace

double SystemConfig::mu() const {
  return std::visit([](const auto& p) { return p.mu; }, payload);
}

bool SystemConfig::is_map() const {
  return std::holds_alternative<PwlMap>(payload) || std::holds_alternative<ExampleMapSystem>(payload) ||
         std::holds_alternative<Bcnf3dSystem>(payload);
}

PwlMap SystemConfig::as_pwl_map() const {
  if (const auto* m = std::get_if<PwlMap>(&payload)) return *m;
  if (const auto* e = std::get_if<ExampleMapSystem>(&payload)) return example_map(e->params, e->mu);
  if (const auto* b = std::get_if<Bcnf3dSystem>(&payload)) return bcnf3d(b->params, b->mu);
  throw Error(ErrorCode::ConfigError, "system.kind: '" + kind + "' is not a map");
}

std::size_t SystemConfig::dim() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StommelModel> || std::is_same_v<T, WelanderModel> ||
                      std::is_same_v<T, ExampleMapSystem>)
          return 2;
        else if constexpr (std::is_same_v<T, Bcnf3dSystem>) return 3;
        else return p.dim();
      },
      payload);
}

FlowOptions RunConfig::flow_options() const {
  FlowOptions o;
  o.step.rtol = rtol;
  o.step.atol = atol;
  o.step.max_step = max_step;
  o.step.event_tol = event_tol;
  return o;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0)) fail(std::string("run.") + field, "must be positive");
  };
  positive(t_end, "t_end");
  positive(divergence_radius, "divergence_radius");
  positive(period_tolerance, "period_tolerance");
  positive(rtol, "rtol");
  positive(atol, "atol");
  positive(max_step, "max_step");
  positive(event_tol, "event_tol");
  positive(convergence_tol, "convergence_tol");
  positive(max_return_time, "max_return_time");
  if (budget < transient) fail("run.transient", "must not exceed run.budget");
  if (max_period < 1) fail("run.max_period", "must be at least 1");
  if (samples < 1) fail("run.samples", "must be at least 1");
  if (param_max < param_min) fail("run.param_max", "must not be below run.param_min");
  if (mu_rate == 0.0) fail("run.mu_rate", "must be nonzero");
  for (const auto* a : {&param_x, &param_y}) {
    if (*a && ((*a)->cells < 1 || !((*a)->max > (*a)->min)))
      fail("run.param_" + std::string(a == &param_x ? "x" : "y"), "needs cells >= 1 and max > min");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ConfigError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
  if (!doc.is_object()) fail("<root>", "expected an object");
  check_keys(doc, "<root>", {"system", "run"});
  ExperimentConfig cfg;
  cfg.system = parse_system(require(doc, "<root>", "system"));
  cfg.run = parse_run(doc.contains("run") ? doc.at("run") : json());
  cfg.run.validate();
  if (!cfg.run.x0.empty() && cfg.run.x0.size() != cfg.system.dim())
    fail("run.x0", "length must equal the state dimension " + std::to_string(cfg.system.dim()));
  if (!cfg.run.section_point.empty() && cfg.run.section_point.size() != cfg.system.dim())
    fail("run.section_point", "length must equal the state dimension " + std::to_string(cfg.system.dim()));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string system_to_json(const SystemConfig& s) { return system_json(s).dump(); }

std::string to_json(const ExperimentConfig& cfg, int indent) {
  json j;
  j["system"] = system_json(cfg.system);
  j["run"] = run_json(cfg.run);
  return j.dump(indent);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string provenance_header(const ExperimentConfig& cfg) {
  const std::string normalized = to_json(cfg);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(normalized)));
  const RunConfig& r = cfg.run;
  std::ostringstream os;
  os.precision(17);
  os << "# nsfold " << kVersion << '\n';
  os << "# config_hash fnv1a64:" << hash << '\n';
  os << "# defaults rtol=" << r.rtol << " atol=" << r.atol << " max_step=" << r.max_step
     << " event_tol=" << r.event_tol << " budget=" << r.budget << " transient=" << r.transient
     << " max_period=" << r.max_period << " divergence_radius=" << r.divergence_radius
     << " period_tolerance=" << r.period_tolerance << '\n';
  os << "# config " << normalized << '\n';
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (".tmp." + target.filename().string() + "." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into '" + path + "'");
  }
}

}  // namespace nsfold
