// First-order IMEX splitting for u_t + (u b(u * eta_eps))_x = nu u_xx and, without a
// kernel, the local viscous law u_t + (u b(u))_x = nu u_xx.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nllab/core_fields.hpp"
#include "nllab/diagnostics.hpp"
#include "nllab/error.hpp"
#include "nllab/kernels.hpp"
#include "nllab/nonlocal_solvers.hpp"
#include "nllab/numfmt.hpp"
#include "nllab/time_stepping.hpp"
#include "nllab/velocity_laws.hpp"

namespace nllab {

/// Backward-Euler diffusion (I - r D2) out = in with the 3-point Laplacian,
/// r = nu dt / dx^2, and zero Dirichlet data outside the grid. Thomas algorithm.
inline void implicit_diffusion(std::span<const double> in, double r, std::span<double> out) {
  const std::size_t n = in.size();
  ensure(out.size() == n, "diffusion output size mismatch");
  ensure(r >= 0.0, "diffusion number must be nonnegative");
  if (n == 0) return;
  if (r == 0.0) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  const double diag = 1.0 + 2.0 * r;
  std::vector<double> c(n);
  double denom = diag;
  c[0] = -r / denom;
  out[0] = in[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag + r * c[i - 1];
    c[i] = -r / denom;
    out[i] = (in[i] + r * out[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) out[i] -= c[i] * out[i + 1];
}

struct ViscousRunConfig {
  explicit ViscousRunConfig(const Grid1D& g, std::optional<Kernel> k = std::nullopt)
      : grid(g), kernel(std::move(k)) {}

  Grid1D grid;
  std::optional<Kernel> kernel;  // empty: local problem, b evaluated at u
  VelocityLaw law = VelocityLaw::identity();
  double nu = 0.1;
  double cfl = 0.9;
  double t_end = 0.5;
  std::vector<double> output_times;
  // Fixed step shared by runs that are compared against each other; 0 = adaptive.
  double fixed_dt = 0.0;
  // Window for the window_mass channel, clipped to the grid.
  double window_lo = -std::numeric_limits<double>::infinity();
  double window_hi = 0.0;
};

inline void validate(const ViscousRunConfig& cfg) {
  ensure(std::isfinite(cfg.nu) && cfg.nu > 0.0, "nu must be > 0");
  ensure(cfg.cfl > 0.0 && cfg.cfl <= 1.0, "cfl must be in (0, 1]");
  ensure(std::isfinite(cfg.t_end) && cfg.t_end > 0.0, "t_end must be > 0");
  ensure(cfg.fixed_dt >= 0.0, "fixed_dt must be >= 0");
}

/// Advection velocities and the speed that bounds the explicit step.
class ViscousAdvection {
 public:
  explicit ViscousAdvection(const ViscousRunConfig& cfg) : law_(cfg.law) {
    if (cfg.kernel) nonlocal_.emplace(*cfg.kernel, cfg.law, cfg.grid.dx());
  }

  // Returns the characteristic speed used in the CFL rule.
  double operator()(std::span<const double> u, std::span<double> velocity) const {
    if (nonlocal_) {
      (*nonlocal_)(u, velocity);
      return max_abs(velocity);
    }
    for (std::size_t i = 0; i < u.size(); ++i) velocity[i] = law_(u[i]);
    // Local flux u b(u): the monotonicity bound uses |f'(u)|.
    return law_.max_flux_speed(max_abs(u));
  }

  bool is_nonlocal() const { return nonlocal_.has_value(); }

 private:
  VelocityLaw law_;
  std::optional<NonlocalVelocity> nonlocal_;
};

inline double imex_admissible_dt(double speed, double dx, double cfl) {
  return cfl * dx / (speed + kSpeedFloor);
}

namespace detail {

inline void imex_advance(const ViscousRunConfig& cfg, const ViscousAdvection& advection,
                         std::span<const double> u, double dt, std::vector<double>& velocity,
                         std::vector<double>& scratch, std::span<double> out) {
  const double speed = advection(u, velocity);
  const double admissible = imex_admissible_dt(speed, cfg.grid.dx(), cfg.cfl);
  if (dt > admissible * (1.0 + 1e-12)) {
    throw LabError("CFL violation: dt = " + format_double(dt) +
                   " exceeds admissible dt = " + format_double(admissible));
  }
  lax_friedrichs_update(u, velocity, dt, cfg.grid.dx(), scratch);
  const double r = cfg.nu * dt / (cfg.grid.dx() * cfg.grid.dx());
  implicit_diffusion(scratch, r, out);
}

}  // namespace detail

/// Explicit conservative advection followed by implicit diffusion.
inline Field imex_step(const Field& f, const ViscousRunConfig& cfg, double dt) {
  validate(cfg);
  check_finite(f);
  ensure(f.grid == cfg.grid, "field must live on the configured grid");
  ensure(dt > 0.0, "dt must be > 0");
  check_interior_support(f.values);
  ViscousAdvection advection(cfg);
  std::vector<double> velocity(f.values.size()), scratch(f.values.size());
  Field out(f.grid, f.time + dt);
  detail::imex_advance(cfg, advection, f.values, dt, velocity, scratch, out.values);
  return out;
}

// Domain needed to emulate the real line: support + 4 sqrt(nu t_end) + eps on each side.
inline void check_domain_margin(const ViscousRunConfig& cfg, const Field& initial) {
  const SupportBounds s = support_bounds(initial, 0.0);
  if (s.empty) return;
  const double margin = 4.0 * std::sqrt(cfg.nu * cfg.t_end) + (cfg.kernel ? cfg.kernel->epsilon() : 0.0);
  if (s.lo - margin < cfg.grid.x_min() || s.hi + margin > cfg.grid.x_max()) {
    // Data with Gaussian tails carry tiny values everywhere; only the bulk matters.
    const SupportBounds bulk = support_bounds(initial, 1e-12 * std::max(1.0, max_abs(initial.values)));
    if (bulk.lo - margin < cfg.grid.x_min() || bulk.hi + margin > cfg.grid.x_max()) {
      throw LabError("domain too small");
    }
  }
}

struct ViscousRun {
  std::vector<Field> fields;
  DiagnosticSeries diagnostics{{"mass", "window_mass", "entropy", "baricenter", "support_lo",
                                "support_hi", "l1", "linf"}};
  long steps = 0;
  bool l1_monotone = true;       // ||u||_1 never increased (to 1e-12 relative)
  double max_linf = 0.0;         // largest ||u||_inf seen over all steps
};

inline ViscousRun run_viscous(const ViscousRunConfig& cfg, const Field& initial) {
  validate(cfg);
  check_finite(initial);
  ensure(initial.grid == cfg.grid, "initial field must live on the configured grid");
  check_domain_margin(cfg, initial);
  const auto outputs = normalize_output_times(cfg.output_times, cfg.t_end);
  ViscousAdvection advection(cfg);
  ViscousRun run;
  Field u = initial;
  u.time = 0.0;
  Field next(cfg.grid);
  std::vector<double> velocity(u.values.size()), scratch(u.values.size());
  auto record = [&](const Field& f) {
    const SupportBounds s = support_bounds(f, 1e-10);
    run.diagnostics.record(f.time, {total_mass(f), clipped_window_mass(f, cfg.window_lo, cfg.window_hi),
                                    safe_entropy(f), baricenter(f), s.lo, s.hi, lp_norm(f, 1.0),
                                    lp_norm(f, std::numeric_limits<double>::infinity())});
    run.fields.push_back(f);
  };
  record(u);
  double l1_prev = lp_norm(u, 1.0);
  run.max_linf = max_abs(u.values);
  for (std::size_t k = 1; k < outputs.size(); ++k) {
    while (u.time < outputs[k]) {
      double dt = cfg.fixed_dt;
      if (dt == 0.0) {
        const double speed = advection(u.values, velocity);
        // At least 100 steps so the diffusion substep stays time-accurate at low speed.
        dt = std::min(imex_admissible_dt(speed, cfg.grid.dx(), cfg.cfl), cfg.t_end / 100.0);
      }
      dt = clip_step(u.time, dt, outputs[k]);
      detail::imex_advance(cfg, advection, u.values, dt, velocity, scratch, next.values);
      std::swap(u.values, next.values);
      u.time = (dt == outputs[k] - u.time) ? outputs[k] : u.time + dt;
      ++run.steps;
      check_interior_support(u.values);
      const double l1 = lp_norm(u, 1.0);
      if (l1 > l1_prev * (1.0 + 1e-12)) run.l1_monotone = false;
      l1_prev = l1;
      run.max_linf = std::max(run.max_linf, max_abs(u.values));
    }
    record(u);
  }
  return run;
}

}  // namespace nllab
