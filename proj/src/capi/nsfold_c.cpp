// SPDX-License-Identifier: Apache-2.0
#include "nsfold/nsfold.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <fstream>
#include <optional>
#include <string>
#include <variant>

#include "nsfold/certificates.hpp"
#include "nsfold/commands.hpp"
#include "nsfold/config.hpp"
#include "nsfold/errors.hpp"
#include "nsfold/map_dynamics.hpp"
#include "nsfold/models.hpp"
#include "nsfold/scan.hpp"

struct nsf_system {
  std::variant<nsfold::PwlMap, nsfold::PwlOde, nsfold::FilippovForm, nsfold::HybridForm> form;
};

struct nsf_report {
  nsfold::EquilibriumReport report;
  std::optional<nsfold::Certificate> certificate;
};

struct nsf_scan {
  nsfold::ScanResult result;
};

struct nsf_config {
  nsfold::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

nsf_status map_code(nsfold::ErrorCode c) {
  using nsfold::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return NSF_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return NSF_ERR_DIMENSION_MISMATCH;
    case ErrorCode::SingularMatrix: return NSF_ERR_SINGULAR_MATRIX;
    case ErrorCode::DegenerateForm: return NSF_ERR_DEGENERATE_FORM;
    case ErrorCode::NotAFold: return NSF_ERR_NOT_A_FOLD;
    case ErrorCode::InvalidResetLaw: return NSF_ERR_INVALID_RESET_LAW;
    case ErrorCode::NonFiniteState: return NSF_ERR_NON_FINITE_STATE;
    case ErrorCode::DegenerateDenominator: return NSF_ERR_DEGENERATE_DENOMINATOR;
    case ErrorCode::StepFailure: return NSF_ERR_STEP_FAILURE;
    case ErrorCode::ChatterBudgetExceeded: return NSF_ERR_CHATTER_BUDGET_EXCEEDED;
    case ErrorCode::RepellingSliding: return NSF_ERR_REPELLING_SLIDING;
    case ErrorCode::ConfigError: return NSF_ERR_CONFIG;
    case ErrorCode::IoError: return NSF_ERR_IO;
  }
  return NSF_ERR_INTERNAL;
}

template <class F>
nsf_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return NSF_OK;
  } catch (const nsfold::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NSF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NSF_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw nsfold::Error(nsfold::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

nsfold::SquareMatrix matrix(std::size_t n, const double* a, const char* what) {
  need(a, what);
  if (n == 0) throw nsfold::Error(nsfold::ErrorCode::InvalidArgument, "dimension must be positive");
  nsfold::SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
  return m;
}

nsfold::Vector vec(std::size_t n, const double* v, const char* what) {
  need(v, what);
  return nsfold::Vector(std::vector<double>(v, v + n));
}

void copy_out(const nsfold::Vector& v, double* dst) { std::copy(v.begin(), v.end(), dst); }

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

const nsfold::PwlMap& as_map(const nsf_system* sys) {
  need(sys, "system");
  const auto* m = std::get_if<nsfold::PwlMap>(&sys->form);
  if (!m) throw nsfold::Error(nsfold::ErrorCode::InvalidArgument, "system is not a map");
  return *m;
}

template <class T>
nsf_status make_system(T form, nsf_system** out) {
  return guarded([&] {
    need(out, "out");
    form.validate();
    *out = new nsf_system{std::move(form)};
  });
}

nsf_attractor_kind attractor(nsfold::AttractorKind k) {
  switch (k) {
    case nsfold::AttractorKind::Periodic: return NSF_PERIODIC;
    case nsfold::AttractorKind::Aperiodic: return NSF_APERIODIC;
    case nsfold::AttractorKind::Diverged: return NSF_DIVERGED;
  }
  return NSF_DIVERGED;
}

nsfold::Bcnf3dParams bcnf_params(const double p[6]) {
  need(p, "params");
  return {p[0], p[1], p[2], p[3], p[4], p[5]};
}

}  // namespace

extern "C" {

const char* nsf_version(void) { return nsfold::kVersion; }

const char* nsf_status_string(nsf_status status) {
  switch (status) {
    case NSF_OK: return "ok";
    case NSF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NSF_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case NSF_ERR_SINGULAR_MATRIX: return "singular matrix";
    case NSF_ERR_DEGENERATE_FORM: return "degenerate form";
    case NSF_ERR_NOT_A_FOLD: return "not a fold";
    case NSF_ERR_INVALID_RESET_LAW: return "invalid reset law";
    case NSF_ERR_NON_FINITE_STATE: return "non-finite state";
    case NSF_ERR_DEGENERATE_DENOMINATOR: return "degenerate denominator";
    case NSF_ERR_STEP_FAILURE: return "step failure";
    case NSF_ERR_CHATTER_BUDGET_EXCEEDED: return "chatter budget exceeded";
    case NSF_ERR_REPELLING_SLIDING: return "repelling sliding";
    case NSF_ERR_CONFIG: return "config error";
    case NSF_ERR_IO: return "i/o error";
    case NSF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nsf_last_error(void) { return g_last_error.c_str(); }

nsf_status nsf_determinant(size_t n, const double* a, double* det) {
  return guarded([&] {
    need(det, "det");
    *det = nsfold::determinant(matrix(n, a, "a"));
  });
}

nsf_status nsf_adjugate(size_t n, const double* a, double* adj) {
  return guarded([&] {
    need(adj, "adj");
    const nsfold::SquareMatrix r = nsfold::adjugate(matrix(n, a, "a"));
    const auto flat = r.row_major();
    std::copy(flat.begin(), flat.end(), adj);
  });
}

nsf_status nsf_first_row_of_adjugate(size_t n, const double* a, double* row) {
  return guarded([&] {
    need(row, "row");
    copy_out(nsfold::first_row_of_adjugate(matrix(n, a, "a")), row);
  });
}

nsf_status nsf_pwl_map_create(size_t n, const double* a_left, const double* a_right, const double* b, double mu,
                              nsf_system** out) {
  nsf_status s = NSF_OK;
  const nsf_status g = guarded([&] {
    nsfold::PwlMap m{matrix(n, a_left, "a_left"), matrix(n, a_right, "a_right"), vec(n, b, "b"), mu};
    s = make_system(std::move(m), out);
  });
  return g != NSF_OK ? g : s;
}

nsf_status nsf_pwl_ode_create(size_t n, const double* a_left, const double* a_right, const double* b, double mu,
                              nsf_system** out) {
  nsf_status s = NSF_OK;
  const nsf_status g = guarded([&] {
    nsfold::PwlOde o{matrix(n, a_left, "a_left"), matrix(n, a_right, "a_right"), vec(n, b, "b"), mu};
    s = make_system(std::move(o), out);
  });
  return g != NSF_OK ? g : s;
}

nsf_status nsf_filippov_create(size_t n, const double* a, const double* b, const double* c, double mu,
                               nsf_system** out) {
  nsf_status s = NSF_OK;
  const nsf_status g = guarded([&] {
    nsfold::FilippovForm f{matrix(n, a, "a"), vec(n, b, "b"), vec(n, c, "c"), mu};
    s = make_system(std::move(f), out);
  });
  return g != NSF_OK ? g : s;
}

nsf_status nsf_hybrid_create(size_t n, const double* a, const double* b, const double* c, double mu,
                             nsf_system** out) {
  nsf_status s = NSF_OK;
  const nsf_status g = guarded([&] {
    nsfold::HybridForm h{matrix(n, a, "a"), vec(n, b, "b"), vec(n, c, "c"), mu};
    s = make_system(std::move(h), out);
  });
  return g != NSF_OK ? g : s;
}

nsf_status nsf_example_map_create(double delta_left, double delta_right, double alpha, double mu,
                                  nsf_system** out) {
  nsf_status s = NSF_OK;
  const nsf_status g = guarded([&] {
    s = make_system(nsfold::example_map({delta_left, delta_right, alpha}, mu), out);
  });
  return g != NSF_OK ? g : s;
}

nsf_status nsf_bcnf3d_create(const double params[6], double mu, nsf_system** out) {
  nsf_status s = NSF_OK;
  const nsf_status g = guarded([&] { s = make_system(nsfold::bcnf3d(bcnf_params(params), mu), out); });
  return g != NSF_OK ? g : s;
}

void nsf_system_free(nsf_system* sys) { delete sys; }

size_t nsf_system_dim(const nsf_system* sys) {
  if (!sys) return 0;
  return std::visit([](const auto& f) { return f.dim(); }, sys->form);
}

nsf_status nsf_certify(const nsf_system* sys, nsf_report** out) {
  return guarded([&] {
    need(sys, "system");
    need(out, "out");
    auto rep = std::make_unique<nsf_report>();
    std::visit(
        [&rep](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, nsfold::PwlMap>) {
            rep->report = nsfold::map_fixed_points(f);
            if (rep->report.beb_class == nsfold::BebClass::NonsmoothFold && rep->report.both_virtual())
              rep->certificate = nsfold::map_certificate(f);
          } else if constexpr (std::is_same_v<T, nsfold::PwlOde>) {
            rep->report = nsfold::ode_equilibria(f);
            if (rep->report.beb_class == nsfold::BebClass::NonsmoothFold && rep->report.both_virtual())
              rep->certificate = nsfold::ode_certificate(f);
          } else if constexpr (std::is_same_v<T, nsfold::FilippovForm>) {
            rep->report = nsfold::filippov_report(f);
            if (rep->report.beb_class == nsfold::BebClass::NonsmoothFold && rep->report.both_virtual())
              rep->certificate = nsfold::filippov_certificate(f);
          } else {
            rep->report = nsfold::hybrid_report(f);
            if (rep->report.beb_class == nsfold::BebClass::NonsmoothFold && rep->report.both_virtual())
              rep->certificate = nsfold::hybrid_certificate(f);
          }
        },
        sys->form);
    *out = rep.release();
  });
}

void nsf_report_free(nsf_report* rep) { delete rep; }

nsf_beb_class nsf_report_class(const nsf_report* rep) {
  if (!rep) return NSF_DEGENERATE;
  switch (rep->report.beb_class) {
    case nsfold::BebClass::Persistence: return NSF_PERSISTENCE;
    case nsfold::BebClass::NonsmoothFold: return NSF_NONSMOOTH_FOLD;
    case nsfold::BebClass::Degenerate: return NSF_DEGENERATE;
  }
  return NSF_DEGENERATE;
}

double nsf_report_s(const nsf_report* rep) { return rep ? rep->report.s : 0.0; }

size_t nsf_report_solution_count(const nsf_report* rep) { return rep ? rep->report.solutions.size() : 0; }

nsf_status nsf_report_solution(const nsf_report* rep, size_t index, double* location, nsf_solution_kind* kind,
                               nsf_admissibility* admissibility) {
  return guarded([&] {
    need(rep, "report");
    if (index >= rep->report.solutions.size())
      throw nsfold::Error(nsfold::ErrorCode::InvalidArgument, "solution index out of range");
    const nsfold::Solution& s = rep->report.solutions[index];
    if (location) copy_out(s.location, location);
    if (kind) *kind = static_cast<nsf_solution_kind>(static_cast<int>(s.kind));
    if (admissibility) *admissibility = static_cast<nsf_admissibility>(static_cast<int>(s.admissibility));
  });
}

int nsf_report_has_certificate(const nsf_report* rep) { return rep && rep->certificate ? 1 : 0; }

nsf_status nsf_report_certificate(const nsf_report* rep, double* direction, double* rate) {
  return guarded([&] {
    need(rep, "report");
    if (!rep->certificate) throw nsfold::Error(nsfold::ErrorCode::NotAFold, "report carries no certificate");
    if (direction) copy_out(rep->certificate->direction, direction);
    if (rate) *rate = rep->certificate->rate;
  });
}

nsf_status nsf_map_iterate(const nsf_system* sys, const double* x0, size_t steps, double escape_radius,
                           double* out, size_t* produced) {
  return guarded([&] {
    const nsfold::PwlMap& m = as_map(sys);
    need(out, "out");
    nsfold::OrbitOptions oo;
    oo.escape_radius = escape_radius;
    const nsfold::OrbitResult r = nsfold::iterate(m, vec(m.dim(), x0, "x0"), steps, oo);
    for (std::size_t k = 0; k < r.iterates.size(); ++k) copy_out(r.iterates[k], out + k * m.dim());
    if (produced) *produced = r.iterates.size();
  });
}

nsf_status nsf_classify_attractor(const nsf_system* sys, const double* x0, size_t transient, size_t max_period,
                                  size_t budget, nsf_attractor_kind* kind, size_t* period) {
  return guarded([&] {
    const nsfold::PwlMap& m = as_map(sys);
    const nsfold::AttractorClass c =
        nsfold::classify_attractor(m, vec(m.dim(), x0, "x0"), transient, max_period, budget);
    if (kind) *kind = attractor(c.kind);
    if (period) *period = c.period;
  });
}

nsf_status nsf_scan2d_bcnf3d(const double base[6], double mu, nsf_axis x, nsf_axis y, size_t budget,
                             size_t transient, size_t max_period, unsigned threads, nsf_scan** out) {
  return guarded([&] {
    need(out, "out");
    need(x.name, "x.name");
    need(y.name, "y.name");
    nsfold::GridSpec spec;
    spec.x = {x.name, x.min, x.max, x.cells};
    spec.y = {y.name, y.min, y.max, y.cells};
    spec.budget = budget;
    spec.transient = transient;
    spec.max_period = max_period;
    const auto family = nsfold::bcnf3d_family(bcnf_params(base), mu, x.name, y.name);
    *out = new nsf_scan{nsfold::scan2d(family, spec, threads)};
  });
}

void nsf_scan_free(nsf_scan* scan) { delete scan; }

size_t nsf_scan_cell_count(const nsf_scan* scan) { return scan ? scan->result.cells.size() : 0; }

nsf_status nsf_scan_cell(const nsf_scan* scan, size_t index, double* px, double* py, nsf_attractor_kind* kind,
                         size_t* period) {
  return guarded([&] {
    need(scan, "scan");
    if (index >= scan->result.cells.size())
      throw nsfold::Error(nsfold::ErrorCode::InvalidArgument, "cell index out of range");
    const nsfold::ScanCell& c = scan->result.cells[index];
    if (px) *px = c.px;
    if (py) *py = c.py;
    if (kind) *kind = attractor(c.outcome.kind);
    if (period) *period = c.outcome.period;
  });
}

nsf_status nsf_scan_write_csv(const nsf_scan* scan, const char* path) {
  return guarded([&] {
    need(scan, "scan");
    need(path, "path");
    std::ostringstream os;
    nsfold::write_scan_csv(os, scan->result);
    nsfold::write_file_atomic(path, os.str());
  });
}

nsf_status nsf_config_load(const char* path, nsf_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nsf_config{nsfold::load_config(path)};
  });
}

nsf_status nsf_config_parse(const char* text, nsf_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new nsf_config{nsfold::parse_config(text)};
  });
}

void nsf_config_free(nsf_config* cfg) { delete cfg; }

nsf_status nsf_config_to_json(const nsf_config* cfg, char** json) {
  return guarded([&] {
    need(cfg, "config");
    need(json, "json");
    *json = dup_string(nsfold::to_json(cfg->cfg, 2));
  });
}

void nsf_string_free(char* s) { std::free(s); }

nsf_status nsf_run_command(const nsf_config* cfg, const char* command, const nsf_run_options* options,
                           int* exit_code, char** output, char** diagnostics) {
  return guarded([&] {
    need(cfg, "config");
    need(command, "command");
    need(exit_code, "exit_code");
    nsfold::CommandOverrides ov;
    if (options) {
      if (options->out) ov.out = options->out;
      if (options->threads) ov.threads = options->threads;
      if (options->has_budget) ov.budget = options->budget;
      if (options->has_seed) ov.seed = options->seed;
    }
    const nsfold::CommandResult r = nsfold::run_command(command, cfg->cfg, ov);
    *exit_code = r.exit_code;
    if (output) *output = dup_string(r.output);
    if (diagnostics) *diagnostics = dup_string(r.diagnostics);
  });
}

}  // extern "C"
