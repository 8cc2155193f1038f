// Lagrangian representation of a density: ordered positions carrying fixed masses.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nllab/core_fields.hpp"
#include "nllab/error.hpp"

namespace nllab {

struct ParticleEnsemble {
  std::vector<double> positions;  // strictly increasing
  std::vector<double> masses;     // never modified by the solvers
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
};

inline void check_ordering(const ParticleEnsemble& e) {
  for (std::size_t j = 1; j < e.size(); ++j) {
    if (!(e.positions[j - 1] < e.positions[j])) {
      throw LabError("characteristics crossed: dt too large");
    }
  }
}

inline void validate(const ParticleEnsemble& e) {
  ensure(e.positions.size() == e.masses.size(), "ensemble positions/masses length mismatch");
  for (std::size_t j = 0; j < e.size(); ++j) {
    ensure(std::isfinite(e.positions[j]) && std::isfinite(e.masses[j]), "corrupt ensemble");
  }
  check_ordering(e);
}

// One particle per cell at the cell center with mass u_i dx; zero-mass cells dropped.
inline ParticleEnsemble particles_from_field(const Field& f) {
  ParticleEnsemble e;
  e.time = f.time;
  for (int i = 0; i < f.size(); ++i) {
    if (f[i] != 0.0) {
      e.positions.push_back(f.grid.center(i));
      e.masses.push_back(f[i] * f.grid.dx());
    }
  }
  return e;
}

// Sum of masses, accumulated in index order so it is reproducible bit for bit.
inline double total_mass(const ParticleEnsemble& e) {
  double acc = 0.0;
  for (double m : e.masses) acc += m;
  return acc;
}

// Mass of the particles lying in [a, b). Exact for the atomic measure.
inline double window_mass(const ParticleEnsemble& e, double a, double b) {
  ensure(a < b, "window requires a < b");
  double acc = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e.positions[j] >= a && e.positions[j] < b) acc += e.masses[j];
  }
  return acc;
}

inline double baricenter(const ParticleEnsemble& e) {
  double acc = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) acc += e.positions[j] * e.masses[j];
  return acc;
}

inline SupportBounds support_bounds(const ParticleEnsemble& e) {
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e.masses[j] == 0.0) continue;
    if (!found) lo = e.positions[j];
    hi = e.positions[j];
    found = true;
  }
  return {lo, hi, !found};
}

/// Area-weighted (cloud-in-cell) deposition onto a grid; mass is conserved.
inline Field deposit(const ParticleEnsemble& e, const Grid1D& g) {
  Field f(g, e.time);
  const double inv_dx = 1.0 / g.dx();
  const int n = g.size();
  for (std::size_t j = 0; j < e.size(); ++j) {
    const double x = e.positions[j];
    if (x < g.x_min() || x > g.x_max()) throw LabError("particle outside grid");
    const double xi = (x - g.x_min()) * inv_dx - 0.5;
    int i = static_cast<int>(std::floor(xi));
    double frac = xi - i;
    const double density = e.masses[j] * inv_dx;
    if (i < 0) {
      f[0] += density;
    } else if (i >= n - 1) {
      f[n - 1] += density;
    } else {
      f[i] += density * (1.0 - frac);
      f[i + 1] += density * frac;
    }
  }
  return f;
}

/// Piecewise-constant density m_j / h_j on the Voronoi cell of each particle,
/// averaged over the cells of g. The end cells extend half a gap outward.
inline Field reconstruct_density(const ParticleEnsemble& e, const Grid1D& g) {
  Field f(g, e.time);
  const std::size_t n = e.size();
  if (n == 0) return f;
  ensure(n >= 2, "density reconstruction needs at least two particles");
  const auto& x = e.positions;
  std::vector<double> b(n + 1);
  b[0] = x[0] - 0.5 * (x[1] - x[0]);
  b[n] = x[n - 1] + 0.5 * (x[n - 1] - x[n - 2]);
  for (std::size_t j = 1; j < n; ++j) b[j] = 0.5 * (x[j - 1] + x[j]);
  if (b[0] < g.x_min() || b[n] > g.x_max()) throw LabError("particle outside grid");
  const double inv_dx = 1.0 / g.dx();
  const int cells = g.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double h = b[j + 1] - b[j];
    if (e.masses[j] == 0.0 || h <= 0.0) continue;
    const double rho = e.masses[j] / h;
    int i = std::clamp(static_cast<int>(std::floor((b[j] - g.x_min()) * inv_dx)), 0, cells - 1);
    for (; i < cells && g.edge(i) < b[j + 1]; ++i) {
      const double overlap = std::min(b[j + 1], g.edge(i + 1)) - std::max(b[j], g.edge(i));
      if (overlap > 0.0) f[i] += rho * overlap * inv_dx;
    }
  }
  return f;
}

}  // namespace nllab
