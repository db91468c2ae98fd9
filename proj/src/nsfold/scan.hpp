// SPDX-License-Identifier: Apache-2.0
//
// Parameter sweeps: 2D attractor-classification grids and 1D branch data.
// Cells are evaluated in parallel by rows and stored by position, so the
// output does not depend on the thread count.
#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsfold/map_dynamics.hpp"
#include "nsfold/models.hpp"

namespace nsfold {

struct ParamAxis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::size_t cells = 1;

  double width() const { return (max - min) / static_cast<double>(cells); }
  double centre(std::size_t i) const { return min + (static_cast<double>(i) + 0.5) * width(); }
};

struct GridSpec {
  ParamAxis x;
  ParamAxis y;
  std::size_t budget = 10'000;
  std::size_t transient = 9'000;
  std::size_t max_period = 50;
  double divergence_radius = 1e6;
  double period_tolerance = 1e-8;
  Vector x0;  // empty means the origin

  void validate() const;
};

using MapFamily2d = std::function<PwlMap(double px, double py)>;

/// Named parameters: tau_L, sigma_L, delta_L, tau_R, sigma_R, delta_R, mu.
MapFamily2d bcnf3d_family(const Bcnf3dParams& base, double mu, const std::string& name_x,
                          const std::string& name_y);
/// Named parameters: delta_L, delta_R, alpha, mu.
MapFamily2d example_map_family(const ExampleMapParams& base, double mu, const std::string& name_x,
                               const std::string& name_y);

struct ScanCell {
  double px = 0.0;
  double py = 0.0;
  AttractorClass outcome;
  bool failed = false;  // family or iteration threw; reported as Diverged
};

struct ScanResult {
  GridSpec spec;
  std::vector<ScanCell> cells;  // row-major, row index = y cell
  double seconds = 0.0;
  unsigned threads = 1;

  const ScanCell& at(std::size_t ix, std::size_t iy) const { return cells[iy * spec.x.cells + ix]; }
};

ScanResult scan2d(const MapFamily2d& family, const GridSpec& spec, unsigned threads = 1);

/// CSV rows param_x,param_y,outcome,T in storage order, 17 significant digits.
void write_scan_csv(std::ostream& os, const ScanResult& r);

/// Palette: period T in 1..50 gets hue 360 (T - 1) / 50 at saturation 0.85,
/// value 0.9; Aperiodic is black; Diverged is white.
std::array<unsigned char, 3> outcome_color(const AttractorClass& c);

/// Binary PPM (P6), one pixel per cell, top row = largest param_y.
void write_scan_ppm(std::ostream& os, const ScanResult& r);
/// SVG heatmap with the same layout and palette.
void write_scan_svg(std::ostream& os, const ScanResult& r);

struct Scan1dRow {
  double param = 0.0;
  std::string series;  // fixed_left, fixed_right, equilibrium, attractor
  std::string label;   // admissibility, stability or attractor kind
  std::size_t period = 0;
  Vector state;
};

using MapFamily1d = std::function<PwlMap(double mu)>;

/// Per sample: both fixed points with admissibility and the attractor
/// reached from x0 (final iterate).
std::vector<Scan1dRow> scan1d(const MapFamily1d& family, double min, double max, std::size_t samples,
                              const Vector& x0, std::size_t budget = 10'000, std::size_t transient = 9'000,
                              std::size_t max_period = 50);

/// Per sample: every Stommel equilibrium at frozen mu, labelled by stability
/// and side.
std::vector<Scan1dRow> scan1d_stommel(const StommelModel& m, double min, double max, std::size_t samples);

/// CSV: param,series,label,period,x_1..x_n
void write_scan1d_csv(std::ostream& os, const std::vector<Scan1dRow>& rows, const std::string& param_name);

}  // namespace nsfold
