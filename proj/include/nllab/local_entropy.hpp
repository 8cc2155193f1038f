// Godunov scheme for the local law u_t + (u b(u))_x = 0 and closed-form
// entropy solutions of Burgers' equation u_t + (u^2)_x = 0 for two step data.
#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nllab/core_fields.hpp"
#include "nllab/diagnostics.hpp"
#include "nllab/error.hpp"
#include "nllab/numfmt.hpp"
#include "nllab/time_stepping.hpp"
#include "nllab/velocity_laws.hpp"

namespace nllab {

/// Exact Riemann flux for f(u) = u^2.
inline double godunov_flux_burgers(double ul, double ur) {
  if (ul <= ur) {
    if (ul > 0.0) return ul * ul;
    if (ur < 0.0) return ur * ur;
    return 0.0;
  }
  return std::max(ul * ul, ur * ur);
}

// Local Lax-Friedrichs flux for a general law.
inline double rusanov_flux(const VelocityLaw& vl, double ul, double ur) {
  const double a = vl.max_flux_speed(std::max(std::abs(ul), std::abs(ur)));
  return 0.5 * (flux(vl, ul) + flux(vl, ur)) - 0.5 * a * (ur - ul);
}

inline double godunov_admissible_dt(std::span<const double> u, const VelocityLaw& vl, double dx,
                                    double cfl) {
  double amp = 0.0;
  for (double v : u) amp = std::max(amp, std::abs(v));
  return cfl * dx / (vl.max_flux_speed(amp) + 1e-12);
}

// Conservative update; ghost cells outside the grid hold zero.
inline void godunov_update(std::span<const double> u, const VelocityLaw& vl, double dt, double dx,
                           std::span<double> out) {
  const std::size_t n = u.size();
  const bool burgers = vl.variant() == VelocityVariant::Identity;
  auto face = [&](double ul, double ur) {
    return burgers ? godunov_flux_burgers(ul, ur) : rusanov_flux(vl, ul, ur);
  };
  const double lambda = dt / dx;
  double flux_left = face(0.0, n ? u[0] : 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double right_state = i + 1 < n ? u[i + 1] : 0.0;
    const double flux_right = face(u[i], right_state);
    out[i] = u[i] - lambda * (flux_right - flux_left);
    flux_left = flux_right;
  }
}

/// One Godunov step; Rusanov flux for laws other than the identity.
inline Field godunov_step(const Field& f, const VelocityLaw& vl, double dt, double cfl = 1.0) {
  check_finite(f);
  ensure(dt > 0.0, "dt must be > 0");
  const double admissible = godunov_admissible_dt(f.values, vl, f.grid.dx(), cfl);
  if (dt > admissible) {
    throw LabError("CFL violation: dt = " + format_double(dt) +
                   " exceeds admissible dt = " + format_double(admissible));
  }
  Field out(f.grid, f.time + dt);
  godunov_update(f.values, vl, dt, f.grid.dx(), out.values);
  return out;
}

struct LocalRunConfig {
  VelocityLaw law = VelocityLaw::identity();
  double cfl = 0.9;
  double t_end = 0.5;
  std::vector<double> output_times;
  // Window for the window_mass channel, clipped to the grid.
  double window_lo = -std::numeric_limits<double>::infinity();
  double window_hi = 0.0;
};

struct LocalRun {
  std::vector<Field> fields;
  DiagnosticSeries diagnostics{standard_channels()};
  long steps = 0;
};

inline LocalRun run_godunov(const LocalRunConfig& cfg, const Field& initial) {
  ensure(cfg.cfl > 0.0 && cfg.cfl <= 1.0, "cfl must be in (0, 1]");
  check_finite(initial);
  const auto outputs = normalize_output_times(cfg.output_times, cfg.t_end);
  LocalRun run;
  Field u = initial;
  u.time = 0.0;
  Field next(u.grid);
  auto record = [&](const Field& f) {
    const SupportBounds s = support_bounds(f, 1e-12);
    double entropy = std::numeric_limits<double>::quiet_NaN();
    if (std::all_of(f.values.begin(), f.values.end(),
                    [](double v) { return v >= -kNegativeTolerance; })) {
      entropy = entropy_functional(f);
    }
    run.diagnostics.record(f.time, {total_mass(f), clipped_window_mass(f, cfg.window_lo, cfg.window_hi),
                                    entropy, baricenter(f), s.lo, s.hi});
    run.fields.push_back(f);
  };
  record(u);
  for (std::size_t k = 1; k < outputs.size(); ++k) {
    while (u.time < outputs[k]) {
      double dt = godunov_admissible_dt(u.values, cfg.law, u.grid.dx(), cfg.cfl);
      dt = clip_step(u.time, dt, outputs[k]);
      godunov_update(u.values, cfg.law, dt, u.grid.dx(), next.values);
      std::swap(u.values, next.values);
      u.time = (dt == outputs[k] - u.time) ? outputs[k] : u.time + dt;
      ++run.steps;
    }
    record(u);
  }
  return run;
}

enum class ExactVariant { StepDatum, OddDatum };

inline std::string to_string(ExactVariant v) {
  return v == ExactVariant::StepDatum ? "step" : "odd";
}

inline ExactVariant exact_variant_from_string(const std::string& s) {
  if (s == "step") return ExactVariant::StepDatum;
  if (s == "odd") return ExactVariant::OddDatum;
  throw LabError("unknown exact-solution variant '" + s + "'");
}

/// Entropy solutions of u_t + (u^2)_x = 0.
///   StepDatum: u0 = 1 on (-1, 0), valid for t in [0, 1].
///   OddDatum:  u0 = 1 on (-1, 0), -1 on (0, 1), 0 elsewhere; valid for t in [0, 1/4].
struct ExactSolution {
  ExactVariant variant;

  double t_max() const { return variant == ExactVariant::StepDatum ? 1.0 : 0.25; }

  double initial(double x) const {
    if (x > -1.0 && x < 0.0) return 1.0;
    if (variant == ExactVariant::OddDatum && x > 0.0 && x < 1.0) return -1.0;
    return 0.0;
  }

  double operator()(double t, double x) const {
    if (!(t >= 0.0 && t <= t_max())) {
      throw LabError("exact solution evaluated outside its validity interval [0, " +
                     format_double(t_max()) + "]");
    }
    if (t == 0.0) return initial(x);
    if (variant == ExactVariant::StepDatum) {
      if (x <= -1.0 || x >= t) return 0.0;
      if (x <= 2.0 * t - 1.0) return (x + 1.0) / (2.0 * t);
      return 1.0;
    }
    if (x <= -1.0 || x >= 1.0) return 0.0;
    if (x < -1.0 + 2.0 * t) return (x + 1.0) / (2.0 * t);
    if (x < 0.0) return 1.0;
    if (x == 0.0) return 0.0;
    if (x <= 1.0 - 2.0 * t) return -1.0;
    return (x - 1.0) / (2.0 * t);
  }
};

inline double exact_eval(const ExactSolution& sol, double t, double x) { return sol(t, x); }

/// Cell averages of the exact solution (Gauss-Legendre within each cell).
inline Field sample_exact(const ExactSolution& sol, const Grid1D& g, double t) {
  static constexpr double kNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double kWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  Field f(g, t);
  constexpr int kSub = 8;
  const double h = g.dx() / kSub;
  for (int i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (int s = 0; s < kSub; ++s) {
      const double mid = g.edge(i) + (s + 0.5) * h;
      for (int q = 0; q < 3; ++q) acc += kWeights[q] * sol(t, mid + 0.5 * h * kNodes[q]);
    }
    f[i] = acc * 0.5 / kSub;
  }
  return f;
}

/// Lower bound on the first moment required of a nonnegative distributional
/// solution confined to (a, b):
///   plain:    (int u0)^2 t + int x u0
///   weighted: (int u0)^2 t / (b - a) + int x u0   (the form that Jensen's inequality gives)
struct BaricenterBound {
  double plain;
  double weighted;
};

inline BaricenterBound baricenter_lower_bound(double mass, double first_moment0, double t,
                                              double a, double b) {
  ensure(a < b, "baricenter bound requires a < b");
  return {mass * mass * t + first_moment0, mass * mass * t / (b - a) + first_moment0};
}

}  // namespace nllab
