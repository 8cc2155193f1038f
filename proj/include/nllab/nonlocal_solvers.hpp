// Solvers for the inviscid nonlocal problem u_t + (u b(u * eta_eps))_x = 0:
// a Lax-Friedrichs finite-volume scheme and a Lagrangian particle method that
// integrates the characteristics dX/dt = b(u * eta_eps)(t, X) exactly in space.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nllab/core_fields.hpp"
#include "nllab/diagnostics.hpp"
#include "nllab/error.hpp"
#include "nllab/kernels.hpp"
#include "nllab/numfmt.hpp"
#include "nllab/particles.hpp"
#include "nllab/time_stepping.hpp"
#include "nllab/velocity_laws.hpp"

namespace nllab {

enum class NonlocalScheme { LaxFriedrichs, Particles };

inline std::string to_string(NonlocalScheme s) {
  return s == NonlocalScheme::LaxFriedrichs ? "lax_friedrichs" : "particles";
}

inline NonlocalScheme nonlocal_scheme_from_string(const std::string& s) {
  if (s == "lax_friedrichs" || s == "lf") return NonlocalScheme::LaxFriedrichs;
  if (s == "particles") return NonlocalScheme::Particles;
  throw LabError("unknown solver '" + s + "'");
}

inline constexpr double kSpeedFloor = 1e-12;

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double lf_admissible_dt(std::span<const double> velocity, double dx, double cfl) {
  return cfl * dx / (max_abs(velocity) + kSpeedFloor);
}

/// Conservative Lax-Friedrichs update of u_t + (u V)_x = 0 with cell velocities V:
///   F_{i+1/2} = (u_i V_i + u_{i+1} V_{i+1})/2 - dx/(2 dt) (u_{i+1} - u_i).
/// The end faces carry zero flux, so sum(u) dx telescopes exactly.
inline void lax_friedrichs_update(std::span<const double> u, std::span<const double> velocity,
                                  double dt, double dx, std::span<double> out) {
  const std::size_t n = u.size();
  const double lambda = dt / dx;
  const double diffusion = 0.5 * dx / dt;
  double flux_left = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double flux_right = 0.0;
    if (i + 1 < n) {
      flux_right = 0.5 * (u[i] * velocity[i] + u[i + 1] * velocity[i + 1]) -
                   diffusion * (u[i + 1] - u[i]);
    }
    out[i] = u[i] - lambda * (flux_right - flux_left);
    flux_left = flux_right;
  }
}

// Fails when the solution has reached the ends of the truncated domain.
inline void check_interior_support(std::span<const double> u) {
  const double scale = std::max(1.0, max_abs(u));
  if (u.empty()) return;
  if (std::abs(u.front()) > 1e-9 * scale || std::abs(u.back()) > 1e-9 * scale) {
    throw LabError("domain too small");
  }
}

/// Velocity V = b(u * eta_eps) on the cells of a fixed grid.
class NonlocalVelocity {
 public:
  NonlocalVelocity(const Kernel& k, const VelocityLaw& law, double dx)
      : convolver_(k, dx), law_(law) {}

  void operator()(std::span<const double> u, std::span<double> velocity) const {
    convolver_.apply(u, velocity);
    for (double& v : velocity) v = law_(v);
  }

  const Convolver& convolver() const { return convolver_; }

 private:
  Convolver convolver_;
  VelocityLaw law_;
};

inline Field lf_step(const Field& f, const Kernel& k, const VelocityLaw& vl, double dt,
                     double cfl = 1.0) {
  check_finite(f);
  ensure(dt > 0.0, "dt must be > 0");
  NonlocalVelocity velocity(k, vl, f.grid.dx());
  std::vector<double> v(f.values.size());
  velocity(f.values, v);
  const double admissible = lf_admissible_dt(v, f.grid.dx(), cfl);
  if (dt > admissible) {
    throw LabError("CFL violation: dt = " + format_double(dt) +
                   " exceeds admissible dt = " + format_double(admissible));
  }
  Field out(f.grid, f.time + dt);
  lax_friedrichs_update(f.values, v, dt, f.grid.dx(), out.values);
  return out;
}

/// Velocities b(u * eta_eps)(X_j) of every particle.
inline void particle_velocities(const ParticleEnsemble& e, const Kernel& k,
                                const VelocityLaw& vl, std::vector<double>& out) {
  const std::size_t n = e.size();
  out.resize(n);
  const auto& pos = e.positions;
  const double reach_left = k.support_hi();   // X_j > x - reach_left contributes
  const double reach_right = -k.support_lo(); // X_j < x + reach_right contributes
  const double k0 = k(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pos[i];
    double left = 0.0;
    for (std::size_t j = i; j-- > 0;) {
      if (pos[j] <= x - reach_left) break;
      left += e.masses[j] * k(x - pos[j]);
    }
    const double self = e.masses[i] * k0;
    double right = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pos[j] >= x + reach_right) break;
      right += e.masses[j] * k(x - pos[j]);
    }
    out[i] = vl((left + right) + self);
  }
}

inline double absolute_mass(const ParticleEnsemble& e) {
  double acc = 0.0;
  for (double m : e.masses) acc += std::abs(m);
  return acc;
}

/// Largest dt accepted by the contraction safeguard dt L sum|m| max|eta_eps'| < 1/2.
inline double particle_dt_limit(const ParticleEnsemble& e, const Kernel& k,
                                const VelocityLaw& vl) {
  const double lip = vl.lipschitz() * absolute_mass(e) * k.max_derivative();
  return lip > 0.0 ? 0.5 / lip : std::numeric_limits<double>::infinity();
}

/// One classical RK4 step of dX/dt = b(u * eta_eps)(X); each stage evaluates the
/// velocity from the stage positions. Masses are copied untouched.
inline ParticleEnsemble particle_step(const ParticleEnsemble& e, const Kernel& k,
                                      const VelocityLaw& vl, double dt) {
  ensure(dt > 0.0, "dt must be > 0");
  if (!(dt < particle_dt_limit(e, k, vl))) {
    throw LabError("contraction safeguard violated: dt = " + format_double(dt) +
                   " must be below " + format_double(particle_dt_limit(e, k, vl)));
  }
  const std::size_t n = e.size();
  ParticleEnsemble stage = e;
  std::vector<double> k1, k2, k3, k4;

  particle_velocities(e, k, vl, k1);
  for (std::size_t j = 0; j < n; ++j) stage.positions[j] = e.positions[j] + 0.5 * dt * k1[j];
  check_ordering(stage);
  particle_velocities(stage, k, vl, k2);
  for (std::size_t j = 0; j < n; ++j) stage.positions[j] = e.positions[j] + 0.5 * dt * k2[j];
  check_ordering(stage);
  particle_velocities(stage, k, vl, k3);
  for (std::size_t j = 0; j < n; ++j) stage.positions[j] = e.positions[j] + dt * k3[j];
  check_ordering(stage);
  particle_velocities(stage, k, vl, k4);

  ParticleEnsemble out = e;
  out.time = e.time + dt;
  for (std::size_t j = 0; j < n; ++j) {
    out.positions[j] =
        e.positions[j] + (dt / 6.0) * ((k1[j] + k4[j]) + 2.0 * (k2[j] + k3[j]));
  }
  check_ordering(out);
  return out;
}

struct NonlocalRunConfig {
  NonlocalRunConfig(const Grid1D& g, const Kernel& k) : grid(g), kernel(k) {}

  Grid1D grid;
  Kernel kernel;
  VelocityLaw law = VelocityLaw::identity();
  NonlocalScheme scheme = NonlocalScheme::LaxFriedrichs;
  double cfl = 0.9;
  double t_end = 0.5;
  std::vector<double> output_times;
  // Window for the window_mass channel, clipped to the grid.
  double window_lo = -std::numeric_limits<double>::infinity();
  double window_hi = 0.0;
  // Odd data: masses may be negative; negative mass must stay right of 0 and
  // positive mass left of 0 instead of the nonnegativity check.
  bool signed_masses = false;
  // Deposition spacing for particle field output and the particle CFL rule; 0 selects eps/10.
  double deposit_dx = 0.0;
};

inline void validate(const NonlocalRunConfig& cfg) {
  ensure(cfg.cfl > 0.0 && cfg.cfl <= 1.0, "cfl must be in (0, 1]");
  ensure(std::isfinite(cfg.t_end) && cfg.t_end > 0.0, "t_end must be > 0");
  ensure(cfg.window_lo < cfg.window_hi, "diagnostic window requires lo < hi");
}

struct NonlocalRun {
  std::vector<Field> fields;               // at output times (deposited for particles)
  std::vector<ParticleEnsemble> ensembles; // particles only
  DiagnosticSeries diagnostics{standard_channels()};
  long steps = 0;
  double kernel_raw_mass = 1.0;            // LF: Riemann sum before renormalization
};

inline Grid1D deposit_grid(const NonlocalRunConfig& cfg) {
  const double dx = cfg.deposit_dx > 0.0 ? cfg.deposit_dx : cfg.kernel.epsilon() / 10.0;
  return Grid1D::with_spacing(cfg.grid.x_min(), cfg.grid.x_max(), dx);
}

inline double safe_entropy(const Field& f) {
  for (double v : f.values) {
    if (v < -kNegativeTolerance) return std::numeric_limits<double>::quiet_NaN();
  }
  return entropy_functional(f);
}

/// Entropy of the particle density m_j / h_j, with h_j the width of the particle's
/// Voronoi cell (one full gap at the two ends of the support). Along characteristics
/// this is the exact transport of u ln u for the particle measure.
inline double lagrangian_entropy(const ParticleEnsemble& e) {
  const std::size_t n = e.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto& x = e.positions;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double m = e.masses[j];
    if (m < 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (m == 0.0) continue;
    double h;
    if (j == 0) {
      h = x[1] - x[0];
    } else if (j + 1 == n) {
      h = x[n - 1] - x[n - 2];
    } else {
      h = 0.5 * (x[j + 1] - x[j - 1]);
    }
    acc += m * std::log(m / h);
  }
  return acc;
}

inline void check_sign_partition(const ParticleEnsemble& e) {
  for (std::size_t j = 0; j < e.size(); ++j) {
    if ((e.masses[j] < 0.0 && e.positions[j] < 0.0) ||
        (e.masses[j] > 0.0 && e.positions[j] > 0.0)) {
      throw LabError("sign partition violated at particle " + std::to_string(j));
    }
  }
}

inline NonlocalRun run_nonlocal(const NonlocalRunConfig& cfg, const Field& initial) {
  validate(cfg);
  check_finite(initial);
  ensure(initial.grid == cfg.grid, "initial field must live on the configured grid");
  const auto outputs = normalize_output_times(cfg.output_times, cfg.t_end);
  NonlocalRun run;

  if (cfg.scheme == NonlocalScheme::LaxFriedrichs) {
    NonlocalVelocity velocity(cfg.kernel, cfg.law, cfg.grid.dx());
    run.kernel_raw_mass = velocity.convolver().raw_mass();
    Field u = initial;
    u.time = 0.0;
    std::vector<double> v(u.values.size());
    Field next(cfg.grid);
    auto record = [&](const Field& f) {
      const SupportBounds s = support_bounds(f, 1e-10);
      run.diagnostics.record(f.time, {total_mass(f), clipped_window_mass(f, cfg.window_lo, cfg.window_hi),
                                      safe_entropy(f), baricenter(f), s.lo, s.hi});
      run.fields.push_back(f);
    };
    record(u);
    for (std::size_t k = 1; k < outputs.size(); ++k) {
      while (u.time < outputs[k]) {
        velocity(u.values, v);
        const double dt = clip_step(u.time, lf_admissible_dt(v, cfg.grid.dx(), cfg.cfl), outputs[k]);
        lax_friedrichs_update(u.values, v, dt, cfg.grid.dx(), next.values);
        std::swap(u.values, next.values);
        u.time = (dt == outputs[k] - u.time) ? outputs[k] : u.time + dt;
        ++run.steps;
        check_interior_support(u.values);
      }
      record(u);
    }
    return run;
  }

  ParticleEnsemble e = particles_from_field(initial);
  e.time = 0.0;
  validate(e);
  if (cfg.signed_masses) {
    check_sign_partition(e);
  } else {
    for (double m : e.masses) ensure(m >= 0.0, "negative mass in a nonnegative run");
  }
  const Grid1D dgrid = deposit_grid(cfg);
  const double guard = particle_dt_limit(e, cfg.kernel, cfg.law);
  auto record = [&](const ParticleEnsemble& ens) {
    Field f = deposit(ens, dgrid);
    const SupportBounds s = support_bounds(ens);
    const double entropy = cfg.signed_masses ? std::numeric_limits<double>::quiet_NaN()
                                             : lagrangian_entropy(ens);
    run.diagnostics.record(ens.time, {total_mass(ens), window_mass(ens, cfg.window_lo, cfg.window_hi),
                                      entropy, baricenter(ens), s.lo, s.hi});
    run.fields.push_back(std::move(f));
    run.ensembles.push_back(ens);
  };
  record(e);
  std::vector<double> v;
  for (std::size_t k = 1; k < outputs.size(); ++k) {
    while (e.time < outputs[k]) {
      particle_velocities(e, cfg.kernel, cfg.law, v);
      const double speed = max_abs(v) + kSpeedFloor;
      // CFL on the deposition grid, eps/10 resolution of the velocity scale, safeguard.
      double dt = std::min({cfg.cfl * dgrid.dx() / speed, 0.1 * cfg.kernel.epsilon() / speed,
                            0.9 * guard});
      dt = clip_step(e.time, dt, outputs[k]);
      const double target = e.time + dt;
      e = particle_step(e, cfg.kernel, cfg.law, dt);
      e.time = (target >= outputs[k]) ? outputs[k] : target;
      ++run.steps;
      if (cfg.signed_masses) check_sign_partition(e);
      if (e.size() > 0 && (e.positions.front() < cfg.grid.x_min() ||
                           e.positions.back() > cfg.grid.x_max())) {
        throw LabError("domain too small");
      }
    }
    record(e);
  }
  return run;
}

}  // namespace nllab
