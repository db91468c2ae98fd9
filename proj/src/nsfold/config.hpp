// SPDX-License-Identifier: Apache-2.0
//
// Experiment files: one JSON document with a "system" section and a "run"
// section. Loading validates every kind-specific invariant; saving produces
// the normalized form that is hashed into provenance headers.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nsfold/certificates.hpp"
#include "nsfold/flow_dynamics.hpp"
#include "nsfold/models.hpp"
#include "nsfold/scan.hpp"

namespace nsfold {

inline constexpr const char* kVersion = "0.1.0";

struct ExampleMapSystem {
  ExampleMapParams params;
  double mu = 0.0;
  bool quadratic = false;
};

struct Bcnf3dSystem {
  Bcnf3dParams params;
  double mu = 0.0;
};

using SystemPayload = std::variant<PwlMap, PwlOde, FilippovForm, HybridForm, StommelModel, WelanderModel,
                                   ExampleMapSystem, Bcnf3dSystem>;

struct SystemConfig {
  std::string kind;  // pwl-map, pws-ode, filippov, hybrid, stommel, welander, example-map, ...
  SystemPayload payload;

  double mu() const;
  bool is_map() const;
  /// Linear part for map kinds (example-map-quadratic drops the residual).
  PwlMap as_pwl_map() const;
  std::size_t dim() const;
};

struct AxisConfig {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::size_t cells = 1;
};

struct RunConfig {
  std::vector<double> x0;
  std::size_t steps = 50;
  double t_end = 20.0;
  std::size_t budget = 10'000;
  std::size_t transient = 9'000;
  std::size_t max_period = 50;
  double divergence_radius = 1e6;
  double period_tolerance = 1e-8;
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 0.05;
  double event_tol = 1e-11;
  std::optional<AxisConfig> param_x;
  std::optional<AxisConfig> param_y;
  std::string param = "mu";
  double param_min = -1.0;
  double param_max = 1.0;
  std::size_t samples = 101;
  double mu_start = 1.3;
  double mu_rate = -0.01;
  std::optional<double> mu_hold;
  std::vector<double> section_point;
  std::size_t max_returns = 200;
  double convergence_tol = 1e-7;
  double max_return_time = 1e3;
  std::size_t threads = 0;  // 0: NSFOLD_THREADS or 1
  std::uint64_t seed = 12345;
  std::string out;

  FlowOptions flow_options() const;
  void validate() const;
};

struct ExperimentConfig {
  SystemConfig system;
  RunConfig run;
};

/// Parses and validates. Throws ConfigError naming the line or field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Normalized JSON (sorted keys, every run default made explicit).
std::string to_json(const ExperimentConfig& cfg, int indent = -1);
std::string system_to_json(const SystemConfig& s);

std::uint64_t fnv1a64(const std::string& text);

/// Comment lines (each starting with "# ") naming the version, the config
/// hash, the numerical defaults in force and the normalized config.
std::string provenance_header(const ExperimentConfig& cfg);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws IoError naming the path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace nsfold
