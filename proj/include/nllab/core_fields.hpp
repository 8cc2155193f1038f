// Uniform 1D grids, cell-averaged fields and the scalar functionals
// (norms, window masses, entropy, first moment) used by every diagnostic.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nllab/error.hpp"
#include "nllab/numfmt.hpp"

namespace nllab {

class Grid1D {
 public:
  Grid1D(double x_min, double x_max, int n_cells)
      : x_min_(x_min), x_max_(x_max), n_cells_(n_cells) {
    ensure(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max,
           "grid requires x_min < x_max");
    ensure(n_cells >= 2, "grid requires n_cells >= 2");
    dx_ = (x_max - x_min) / n_cells;
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int size() const { return n_cells_; }
  double dx() const { return dx_; }
  // Convex combinations of the end points: grids symmetric about 0 get exactly
  // antisymmetric centers and edges, and interior edges at integers stay exact.
  double center(int i) const {
    return ((n_cells_ - i - 0.5) * x_min_ + (i + 0.5) * x_max_) / n_cells_;
  }
  double edge(int i) const { return ((n_cells_ - i) * x_min_ + i * x_max_) / n_cells_; }

  // Grid with uniform spacing dx (or finer) covering [x_min, x_max].
  static Grid1D with_spacing(double x_min, double x_max, double dx) {
    ensure(dx > 0, "grid spacing must be positive");
    int n = static_cast<int>(std::ceil((x_max - x_min) / dx - 1e-9));
    return Grid1D(x_min, x_max, std::max(n, 2));
  }

  bool operator==(const Grid1D& o) const {
    return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_cells_ == o.n_cells_;
  }

 private:
  double x_min_;
  double x_max_;
  int n_cells_;
  double dx_;
};

/// Cell averages on a Grid1D. Values outside [x_min, x_max] are zero.
struct Field {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;

  explicit Field(const Grid1D& g, double t = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.size()), 0.0), time(t) {}
  Field(const Grid1D& g, std::vector<double> v, double t = 0.0)
      : grid(g), values(std::move(v)), time(t) {
    ensure(values.size() == static_cast<std::size_t>(g.size()),
           "field length does not match grid");
  }

  int size() const { return grid.size(); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

// Samples a profile at cell centers (midpoint rule).
inline Field sample_field(const Grid1D& g, const std::function<double(double)>& profile,
                          double t = 0.0) {
  Field f(g, t);
  for (int i = 0; i < g.size(); ++i) f[i] = profile(g.center(i));
  return f;
}

// Exact cell averages of a piecewise-constant profile with the given breakpoints.
// Used for the discontinuous data where midpoint sampling would misplace a jump.
inline Field average_piecewise_constant(const Grid1D& g, std::span<const double> breaks,
                                        std::span<const double> levels) {
  ensure(levels.size() + 1 == breaks.size(), "piecewise profile needs n+1 breakpoints");
  Field f(g);
  for (int i = 0; i < g.size(); ++i) {
    const double lo = g.edge(i);
    const double hi = g.edge(i + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double overlap = std::min(hi, breaks[k + 1]) - std::max(lo, breaks[k]);
      if (overlap > 0) acc += levels[k] * overlap;
    }
    f[i] = acc / g.dx();
  }
  return f;
}

inline void check_finite(const Field& f) {
  for (double v : f.values) {
    if (!std::isfinite(v)) throw LabError("corrupt field");
  }
}

inline double lp_norm(const Field& f, double p) {
  check_finite(f);
  ensure(p >= 1.0, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  if (p == 1.0) {
    for (double v : f.values) acc += std::abs(v);
    return acc * f.grid.dx();
  }
  if (p == 2.0) {
    for (double v : f.values) acc += v * v;
    return std::sqrt(acc * f.grid.dx());
  }
  for (double v : f.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid.dx(), 1.0 / p);
}

/// Lp distance between two fields on the same grid.
inline double lp_distance(const Field& a, const Field& b, double p) {
  ensure(a.grid == b.grid, "lp_distance requires matching grids");
  Field d(a.grid, a.time);
  for (int i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return lp_norm(d, p);
}

struct SnappedWindow {
  int first_cell;    // inclusive
  int last_cell;     // exclusive
  double snap_lo;    // snapped edge minus requested a
  double snap_hi;    // snapped edge minus requested b
};

inline SnappedWindow snap_window(const Grid1D& g, double a, double b) {
  ensure(a < b, "window requires a < b");
  const double tol = 1e-9 * g.dx();
  if (a < g.x_min() - tol || b > g.x_max() + tol) {
    throw LabError("window outside grid");
  }
  const int lo = std::clamp(static_cast<int>(std::lround((a - g.x_min()) / g.dx())), 0, g.size());
  const int hi = std::clamp(static_cast<int>(std::lround((b - g.x_min()) / g.dx())), 0, g.size());
  return {lo, hi, g.edge(lo) - a, g.edge(hi) - b};
}

inline double window_mass(const Field& f, double a, double b) {
  const SnappedWindow w = snap_window(f.grid, a, b);
  double acc = 0.0;
  for (int i = w.first_cell; i < w.last_cell; ++i) acc += f[i];
  return acc * f.grid.dx();
}

// window_mass over [a, b] intersected with the grid; 0 for an empty intersection.
inline double clipped_window_mass(const Field& f, double a, double b) {
  const double lo = std::max(a, f.grid.x_min());
  const double hi = std::min(b, f.grid.x_max());
  return lo < hi ? window_mass(f, lo, hi) : 0.0;
}

inline double total_mass(const Field& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * f.grid.dx();
}

inline constexpr double kNegativeTolerance = 1e-10;

inline double entropy_density(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

inline double entropy_functional(const Field& f) {
  double acc = 0.0;
  for (double v : f.values) {
    if (!std::isfinite(v)) throw LabError("corrupt field");
    if (v < -kNegativeTolerance) throw LabError("negative density");
    acc += entropy_density(std::max(v, 0.0));
  }
  return acc * f.grid.dx();
}

/// First moment sum x_i v_i dx. Not normalized by mass.
inline double baricenter(const Field& f) {
  double acc = 0.0;
  for (int i = 0; i < f.size(); ++i) acc += f.grid.center(i) * f[i];
  return acc * f.grid.dx();
}

struct SupportBounds {
  double lo;
  double hi;
  bool empty;
};

// Smallest interval of cell edges outside of which |v| <= threshold.
inline SupportBounds support_bounds(const Field& f, double threshold = 0.0) {
  int first = -1;
  int last = -1;
  for (int i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > threshold) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return {0.0, 0.0, true};
  return {f.grid.edge(first), f.grid.edge(last + 1), false};
}

inline Field reflect(const Field& f) {
  Field r(f.grid, f.time);
  const int n = f.size();
  for (int i = 0; i < n; ++i) r[i] = f[n - 1 - i];
  return r;
}

// Averages pairs of cells onto a grid with half the resolution.
inline Field restrict_by_two(const Field& fine) {
  ensure(fine.size() % 2 == 0 && fine.size() >= 4, "restriction needs an even cell count");
  Grid1D coarse(fine.grid.x_min(), fine.grid.x_max(), fine.size() / 2);
  Field out(coarse, fine.time);
  for (int i = 0; i < coarse.size(); ++i) out[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
  return out;
}

inline void write_csv(std::ostream& os, const Field& f) {
  os << "x,u\n";
  for (int i = 0; i < f.size(); ++i) {
    os << format_double(f.grid.center(i)) << ',' << format_double(f[i]) << '\n';
  }
}

inline nlohmann::json to_json(const Grid1D& g) {
  return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n_cells", g.size()}};
}

inline nlohmann::json to_json(const Field& f) {
  return {{"grid", to_json(f.grid)}, {"time", f.time}, {"values", f.values}};
}

inline Field field_from_json(const nlohmann::json& j) {
  const auto& g = j.at("grid");
  Grid1D grid(g.at("x_min").get<double>(), g.at("x_max").get<double>(),
              g.at("n_cells").get<int>());
  Field f(grid, j.at("values").get<std::vector<double>>(), j.at("time").get<double>());
  check_finite(f);
  return f;
}

}  // namespace nllab
