// SPDX-License-Identifier: Apache-2.0
#include "nsfold/scan.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "nsfold/errors.hpp"

namespace nsfold {

void GridSpec::validate() const {
  for (const ParamAxis* a : {&x, &y}) {
    if (a->cells < 1) throw Error(ErrorCode::InvalidArgument, "axis " + a->name + " needs at least one cell");
    if (!std::isfinite(a->min) || !std::isfinite(a->max) || !(a->max > a->min))
      throw Error(ErrorCode::InvalidArgument, "axis " + a->name + " needs a finite range with max > min");
  }
  if (budget < transient) throw Error(ErrorCode::InvalidArgument, "budget must cover the transient");
  if (max_period < 1) throw Error(ErrorCode::InvalidArgument, "max_period must be at least 1");
  if (!(divergence_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "divergence radius must be positive");
  if (!(period_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "period tolerance must be positive");
}

namespace {

double& bcnf_slot(Bcnf3dParams& p, double& mu, const std::string& name) {
  if (name == "tau_L") return p.tau_L;
  if (name == "sigma_L") return p.sigma_L;
  if (name == "delta_L") return p.delta_L;
  if (name == "tau_R") return p.tau_R;
  if (name == "sigma_R") return p.sigma_R;
  if (name == "delta_R") return p.delta_R;
  if (name == "mu") return mu;
  throw Error(ErrorCode::ConfigError, "unknown bcnf3d parameter '" + name + "'");
}

double& example_slot(ExampleMapParams& p, double& mu, const std::string& name) {
  if (name == "delta_L") return p.delta_L;
  if (name == "delta_R") return p.delta_R;
  if (name == "alpha") return p.alpha;
  if (name == "mu") return mu;
  throw Error(ErrorCode::ConfigError, "unknown example-map parameter '" + name + "'");
}

}  // namespace

MapFamily2d bcnf3d_family(const Bcnf3dParams& base, double mu, const std::string& name_x,
                          const std::string& name_y) {
  {
    Bcnf3dParams probe = base;
    double m = mu;
    bcnf_slot(probe, m, name_x);
    bcnf_slot(probe, m, name_y);
  }
  return [base, mu, name_x, name_y](double px, double py) {
    Bcnf3dParams p = base;
    double m = mu;
    bcnf_slot(p, m, name_x) = px;
    bcnf_slot(p, m, name_y) = py;
    return bcnf3d(p, m);
  };
}

MapFamily2d example_map_family(const ExampleMapParams& base, double mu, const std::string& name_x,
                               const std::string& name_y) {
  {
    ExampleMapParams probe = base;
    double m = mu;
    example_slot(probe, m, name_x);
    example_slot(probe, m, name_y);
  }
  return [base, mu, name_x, name_y](double px, double py) {
    ExampleMapParams p = base;
    double m = mu;
    example_slot(p, m, name_x) = px;
    example_slot(p, m, name_y) = py;
    return example_map(p, m);
  };
}

ScanResult scan2d(const MapFamily2d& family, const GridSpec& spec, unsigned threads) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ScanResult r;
  r.spec = spec;
  r.threads = std::max(1u, threads);
  const std::size_t nx = spec.x.cells, ny = spec.y.cells;
  r.cells.resize(nx * ny);

  const ClassifyOptions copts{spec.divergence_radius, spec.period_tolerance};
  auto do_row = [&](std::size_t iy) {
    const double py = spec.y.centre(iy);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      ScanCell& cell = r.cells[iy * nx + ix];
      cell.px = spec.x.centre(ix);
      cell.py = py;
      try {
        const PwlMap m = family(cell.px, py);
        const Vector x0 = spec.x0.size() == 0 ? Vector(m.dim()) : spec.x0;
        cell.outcome = classify_attractor(m, x0, spec.transient, spec.max_period, spec.budget, copts);
      } catch (const std::exception&) {
        cell.outcome = {AttractorKind::Diverged, 0};
        cell.failed = true;
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(r.threads, ny));
  if (workers <= 1) {
    for (std::size_t iy = 0; iy < ny; ++iy) do_row(iy);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t iy = next++; iy < ny; iy = next++) do_row(iy);
      });
    }
    for (auto& th : pool) th.join();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void write_scan_csv(std::ostream& os, const ScanResult& r) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "param_x,param_y,outcome,T\n";
  for (const ScanCell& c : r.cells) {
    buf << c.px << ',' << c.py << ',' << to_string(c.outcome.kind) << ',' << c.outcome.period << '\n';
  }
  os << buf.str();
}

std::array<unsigned char, 3> outcome_color(const AttractorClass& c) {
  if (c.kind == AttractorKind::Diverged) return {255, 255, 255};
  if (c.kind == AttractorKind::Aperiodic) return {0, 0, 0};
  const double hue = 360.0 * static_cast<double>((c.period - 1) % 50) / 50.0;
  const double s = 0.85, v = 0.9;
  const double ch = v * s;
  const double hp = hue / 60.0;
  const double xx = ch * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = ch; g = xx; break;
    case 1: r = xx; g = ch; break;
    case 2: g = ch; b = xx; break;
    case 3: g = xx; b = ch; break;
    case 4: r = xx; b = ch; break;
    default: r = ch; b = xx; break;
  }
  const double m = v - ch;
  auto to_byte = [m](double u) { return static_cast<unsigned char>(std::lround(255.0 * (u + m))); };
  return {to_byte(r), to_byte(g), to_byte(b)};
}

void write_scan_ppm(std::ostream& os, const ScanResult& r) {
  const std::size_t nx = r.spec.x.cells, ny = r.spec.y.cells;
  os << "P6\n" << nx << ' ' << ny << "\n255\n";
  std::string row(nx * 3, '\0');
  for (std::size_t k = 0; k < ny; ++k) {
    const std::size_t iy = ny - 1 - k;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto rgb = outcome_color(r.at(ix, iy).outcome);
      for (int c = 0; c < 3; ++c) row[ix * 3 + c] = static_cast<char>(rgb[c]);
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_scan_svg(std::ostream& os, const ScanResult& r) {
  const std::size_t nx = r.spec.x.cells, ny = r.spec.y.cells;
  std::ostringstream buf;
  buf << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << nx << ' ' << ny
      << "\" shape-rendering=\"crispEdges\">\n";
  buf << "<title>" << r.spec.x.name << " [" << r.spec.x.min << ", " << r.spec.x.max << "] x " << r.spec.y.name
      << " [" << r.spec.y.min << ", " << r.spec.y.max << "]</title>\n";
  char hex[8];
  for (std::size_t k = 0; k < ny; ++k) {
    const std::size_t iy = ny - 1 - k;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto rgb = outcome_color(r.at(ix, iy).outcome);
      std::snprintf(hex, sizeof hex, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
      buf << "<rect x=\"" << ix << "\" y=\"" << k << "\" width=\"1\" height=\"1\" fill=\"" << hex << "\"/>\n";
    }
  }
  buf << "</svg>\n";
  os << buf.str();
}

namespace {

double sample_at(double min, double max, std::size_t samples, std::size_t i) {
  if (samples == 1) return 0.5 * (min + max);
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(samples - 1);
}

void check_range(double min, double max, std::size_t samples) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "scan1d needs at least one sample");
  if (!std::isfinite(min) || !std::isfinite(max) || max < min)
    throw Error(ErrorCode::InvalidArgument, "scan1d needs a finite range with max >= min");
}

}  // namespace

std::vector<Scan1dRow> scan1d(const MapFamily1d& family, double min, double max, std::size_t samples,
                              const Vector& x0, std::size_t budget, std::size_t transient, std::size_t max_period) {
  check_range(min, max, samples);
  std::vector<Scan1dRow> rows;
  for (std::size_t i = 0; i < samples; ++i) {
    const double mu = sample_at(min, max, samples, i);
    const PwlMap m = family(mu);
    const EquilibriumReport rep = map_fixed_points(m);
    for (const Solution& s : rep.solutions) {
      rows.push_back({mu, s.kind == SolutionKind::RegularLeft ? "fixed_left" : "fixed_right",
                      to_string(s.admissibility), 0, s.location});
    }
    const Vector start = x0.size() == 0 ? Vector(m.dim()) : x0;
    const AttractorClass cls = classify_attractor(m, start, transient, max_period, budget);
    Vector last;
    if (cls.kind != AttractorKind::Diverged) {
      last = start;
      for (std::size_t k = 0; k < budget; ++k) last = m.apply(last);
    }
    rows.push_back({mu, "attractor", to_string(cls.kind), cls.period, last});
  }
  return rows;
}

std::vector<Scan1dRow> scan1d_stommel(const StommelModel& m, double min, double max, std::size_t samples) {
  check_range(min, max, samples);
  std::vector<Scan1dRow> rows;
  for (std::size_t i = 0; i < samples; ++i) {
    StommelModel frozen = m;
    frozen.mu = sample_at(min, max, samples, i);
    for (const auto& e : stommel_equilibria(frozen)) {
      rows.push_back({frozen.mu, e.side == FlowMode::FlowLeft ? "equilibrium_left" : "equilibrium_right",
                      to_string(e.stability), 0, e.state});
    }
  }
  return rows;
}

void write_scan1d_csv(std::ostream& os, const std::vector<Scan1dRow>& rows, const std::string& param_name) {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.state.size());
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << param_name << ",series,label,period";
  for (std::size_t i = 0; i < n; ++i) buf << ",x_" << (i + 1);
  buf << '\n';
  for (const auto& r : rows) {
    buf << r.param << ',' << r.series << ',' << r.label << ',' << r.period;
    for (std::size_t i = 0; i < n; ++i) {
      buf << ',';
      if (i < r.state.size()) buf << r.state[i];
    }
    buf << '\n';
  }
  os << buf.str();
}

}  // namespace nsfold
