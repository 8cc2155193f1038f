// Structural invariants of the solvers, checked on seeded random fields.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nllab/core_fields.hpp"
#include "nllab/experiments.hpp"
#include "nllab/heat_kernel.hpp"
#include "nllab/kernels.hpp"
#include "nllab/local_entropy.hpp"
#include "nllab/nonlocal_solvers.hpp"
#include "nllab/particles.hpp"
#include "nllab/viscous_solver.hpp"

namespace nllab {

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest violation measure seen
  double tolerance = 0.0;  // passed iff worst <= tolerance
  int cases = 0;
};

inline PropertyResult make_property(std::string name, double worst, double tolerance, int cases) {
  return {std::move(name), worst <= tolerance, worst, tolerance, cases};
}

/// Random piecewise-constant fields with a few smooth bumps on top, supported in
/// [support_lo, support_hi]; nonnegative unless `signed_values`.
class RandomFields {
 public:
  explicit RandomFields(std::uint64_t seed) : rng_(seed) {}

  Field next(const Grid1D& g, double support_lo, double support_hi, bool signed_values = false) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pieces_dist(1, 6);
    const int pieces = pieces_dist(rng_);
    std::vector<double> breaks{support_lo};
    for (int k = 1; k < pieces; ++k) breaks.push_back(support_lo + (support_hi - support_lo) * unit(rng_));
    breaks.push_back(support_hi);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> levels;
    for (int k = 0; k < pieces; ++k) {
      const double v = 2.0 * unit(rng_);
      levels.push_back(signed_values ? v - 1.0 : v);
    }
    Field f = average_piecewise_constant(g, breaks, levels);
    const double centre = support_lo + (support_hi - support_lo) * (0.25 + 0.5 * unit(rng_));
    const double width = 0.05 + 0.2 * unit(rng_) * (support_hi - support_lo);
    const double height = signed_values ? 2.0 * unit(rng_) - 1.0 : unit(rng_);
    for (int i = 0; i < g.size(); ++i) {
      const double s = (g.center(i) - centre) / width;
      if (std::abs(s) < 1.0 && g.center(i) > support_lo && g.center(i) < support_hi) {
        f[i] += height * std::exp(-1.0 / (1.0 - s * s));
      }
    }
    if (!signed_values) {
      for (double& v : f.values) v = std::max(v, 0.0);
    }
    return f;
  }

  // Odd field: u(-x) = -u(x) cell by cell on a grid symmetric about 0.
  Field next_odd(const Grid1D& g, double reach) {
    Field f = next(g, 0.0, reach, false);
    const int n = g.size();
    for (int i = 0; i < n / 2; ++i) f[i] = -f[n - 1 - i];
    return f;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline PropertyResult lf_mass_conservation(std::uint64_t seed, int fields = 5, int steps = 1000) {
  RandomFields gen(seed);
  const Grid1D g(-4.0, 4.0, 800);
  const Kernel k(KernelShape::EvenBump, 0.1);
  NonlocalVelocity velocity(k, VelocityLaw::identity(), g.dx());
  double worst = 0.0;
  for (int c = 0; c < fields; ++c) {
    Field u = gen.next(g, -1.0, 1.0);
    const double m0 = total_mass(u);
    std::vector<double> v(u.values.size()), next(u.values.size());
    for (int s = 0; s < steps; ++s) {
      velocity(u.values, v);
      lax_friedrichs_update(u.values, v, 0.9 * lf_admissible_dt(v, g.dx(), 1.0), g.dx(), next);
      std::swap(u.values, next);
    }
    worst = std::max(worst, std::abs(total_mass(u) - m0));
  }
  return make_property("lax_friedrichs mass drift per 1000 steps", worst, 1e-12, fields);
}

inline PropertyResult godunov_mass_conservation(std::uint64_t seed, int fields = 5, int steps = 1000) {
  RandomFields gen(seed);
  const Grid1D g(-20.0, 20.0, 4000);
  const VelocityLaw law = VelocityLaw::identity();
  double worst = 0.0;
  for (int c = 0; c < fields; ++c) {
    Field u = gen.next(g, -1.0, 1.0, true);
    const double m0 = total_mass(u);
    std::vector<double> next(u.values.size());
    for (int s = 0; s < steps; ++s) {
      godunov_update(u.values, law, godunov_admissible_dt(u.values, law, g.dx(), 0.9), g.dx(), next);
      std::swap(u.values, next);
    }
    worst = std::max(worst, std::abs(total_mass(u) - m0));
  }
  return make_property("godunov mass drift per 1000 steps", worst, 1e-12, fields);
}

// Violation count: masses must be bit-identical after stepping.
inline PropertyResult particle_mass_exact(std::uint64_t seed, int fields = 5, int steps = 100) {
  RandomFields gen(seed);
  const Grid1D g(-2.0, 2.0, 200);
  const Kernel k(KernelShape::EvenBump, 0.1);
  const VelocityLaw law = VelocityLaw::identity();
  double violations = 0.0;
  for (int c = 0; c < fields; ++c) {
    ParticleEnsemble e = particles_from_field(gen.next(g, -1.0, 1.0));
    const std::vector<double> m0 = e.masses;
    const double total0 = total_mass(e);
    const double dt = 0.5 * particle_dt_limit(e, k, law);
    for (int s = 0; s < steps; ++s) e = particle_step(e, k, law, dt);
    if (e.masses != m0 || total_mass(e) != total0) violations += 1.0;
  }
  return make_property("particle mass bit-exact", violations, 0.0, fields);
}

/// ||f * eta||_p <= ||f||_p ||eta||_1 for p in {1, 2, inf}, both kernel shapes.
inline PropertyResult young_inequality(std::uint64_t seed, int fields = 100) {
  RandomFields gen(seed);
  const Grid1D g(-2.0, 2.0, 400);
  const Convolver even(Kernel(KernelShape::EvenBump, 0.1), g.dx());
  const Convolver one(Kernel(KernelShape::OneSidedLeft, 0.1), g.dx());
  double worst = -kInf;
  for (int c = 0; c < fields; ++c) {
    const Field f = gen.next(g, -1.5, 1.5, c % 2 == 1);
    for (const Convolver* conv : {&even, &one}) {
      const Field h = conv->apply(f);
      for (double p : {1.0, 2.0, kInf}) {
        const double lhs = lp_norm(h, p), rhs = lp_norm(f, p);
        worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
      }
    }
  }
  return make_property("Young inequality on random fields", worst, 1e-12, fields);
}

/// int Phi(f * eta) <= int Phi(f) for convex Phi with Phi(0) = 0.
inline PropertyResult jensen_convolution(std::uint64_t seed, int fields = 100) {
  RandomFields gen(seed);
  const Grid1D g(-2.0, 2.0, 400);
  const Convolver even(Kernel(KernelShape::EvenBump, 0.1), g.dx());
  const Convolver one(Kernel(KernelShape::OneSidedLeft, 0.1), g.dx());
  const std::vector<std::function<double(double)>> phis = {
      [](double u) { return entropy_density(u); },
      [](double u) { return std::pow(std::abs(u), 3.0); },
      [](double u) { return u * u; }};
  double worst = -kInf;
  for (int c = 0; c < fields; ++c) {
    const Field f = gen.next(g, -1.5, 1.5);
    for (const Convolver* conv : {&even, &one}) {
      const Field h = conv->apply(f);
      for (const auto& phi : phis) {
        double lhs = 0.0, rhs = 0.0, scale = 1.0;
        for (int i = 0; i < g.size(); ++i) {
          lhs += phi(h[i]);
          rhs += phi(f[i]);
          scale += std::abs(phi(f[i]));
        }
        worst = std::max(worst, (lhs - rhs) / scale);
      }
    }
  }
  return make_property("Jensen convolution estimate on random fields", worst, 1e-12, fields);
}

/// Backward-Euler diffusion with zero Dirichlet data stays within [min(0, min u), max(0, max u)].
inline PropertyResult diffusion_maximum_principle(std::uint64_t seed, int fields = 100) {
  RandomFields gen(seed);
  const Grid1D g(-2.0, 2.0, 400);
  std::uniform_real_distribution<double> log_r(-2.0, 3.0);
  double worst = -kInf;
  for (int c = 0; c < fields; ++c) {
    const Field f = gen.next(g, -1.9, 1.9, true);
    const double r = std::pow(10.0, log_r(gen.engine()));
    std::vector<double> out(f.values.size());
    implicit_diffusion(f.values, r, out);
    const double hi = std::max(0.0, *std::max_element(f.values.begin(), f.values.end()));
    const double lo = std::min(0.0, *std::min_element(f.values.begin(), f.values.end()));
    for (double v : out) worst = std::max({worst, v - hi, lo - v});
  }
  return make_property("maximum principle of the diffusion substep", worst, 1e-14, fields);
}

/// One Lax-Friedrichs step with an even kernel maps odd data to odd data.
inline PropertyResult lf_odd_symmetry(std::uint64_t seed, int fields = 100) {
  RandomFields gen(seed);
  const Grid1D g(-2.0, 2.0, 400);
  const Kernel k(KernelShape::EvenBump, 0.1);
  const VelocityLaw law = VelocityLaw::identity();
  double worst = 0.0;
  for (int c = 0; c < fields; ++c) {
    const Field f = gen.next_odd(g, 1.5);
    NonlocalVelocity velocity(k, law, g.dx());
    std::vector<double> v(f.values.size());
    velocity(f.values, v);
    const Field out = lf_step(f, k, law, 0.9 * lf_admissible_dt(v, g.dx(), 1.0));
    const int n = g.size();
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(out[i] + out[n - 1 - i]));
  }
  return make_property("odd symmetry per Lax-Friedrichs step", worst, 1e-12, fields);
}

/// With the one-sided kernel the velocity at x depends only on data right of x:
/// changing the data left of a cut leaves everything right of it bit-identical.
inline PropertyResult one_sided_right_dependence(std::uint64_t seed, int fields = 100) {
  RandomFields gen(seed);
  const Grid1D g(-2.0, 2.0, 400);
  const Kernel k(KernelShape::OneSidedLeft, 0.1);
  const NonlocalVelocity velocity(k, VelocityLaw::identity(), g.dx());
  std::uniform_int_distribution<int> cut_dist(50, 350);
  double violations = 0.0;
  for (int c = 0; c < fields; ++c) {
    const Field f = gen.next(g, -1.5, 1.5);
    Field h = gen.next(g, -1.5, 1.5);
    const int cut = cut_dist(gen.engine());
    for (int i = cut; i < g.size(); ++i) h[i] = f[i];
    std::vector<double> vf(f.values.size()), vh(f.values.size());
    velocity(f.values, vf);
    velocity(h.values, vh);
    for (int i = cut; i < g.size(); ++i) {
      if (vf[static_cast<std::size_t>(i)] != vh[static_cast<std::size_t>(i)]) {
        violations += 1.0;
        break;
      }
    }
    // Particle velocities: same statement for the exact particle convolution.
    ParticleEnsemble ef = particles_from_field(f);
    ParticleEnsemble eh = ef;
    const double x_cut = g.edge(cut);
    for (std::size_t j = 0; j < eh.size(); ++j) {
      if (eh.positions[j] < x_cut) eh.masses[j] *= 1.5;
    }
    std::vector<double> pf, ph;
    particle_velocities(ef, k, VelocityLaw::identity(), pf);
    particle_velocities(eh, k, VelocityLaw::identity(), ph);
    for (std::size_t j = 0; j < ef.size(); ++j) {
      if (ef.positions[j] >= x_cut && pf[j] != ph[j]) {
        violations += 1.0;
        break;
      }
    }
  }
  return make_property("one-sided kernel right-dependence bit-exact", violations, 0.0, fields);
}

// Reported as (0.7 - fitted order): passes when the order is at least 0.7.
inline PropertyResult godunov_convergence_order() {
  const ConvergenceStudy s = godunov_self_convergence(ConvergenceConfig{});
  PropertyResult r = make_property("godunov L1 self-convergence order >= 0.7", 0.7 - s.fitted_order, 0.0,
                                   static_cast<int>(s.cells.size()));
  return r;
}

// Relative deviation of the measured heat-kernel gradient exponent from alpha.
inline PropertyResult heat_kernel_exponent(double q, int dim = 1) {
  const HeatKernelSpec spec{0.1, dim};
  const double alpha = grad_lq_exponent(spec, q);
  const double slope = measured_grad_lq_slope(spec, q, 1e-3, 1.0);
  return make_property("heat kernel gradient L^" + format_double(q) + " exponent (alpha=" +
                           format_double(alpha) + ")",
                       std::abs(slope - alpha) / std::abs(alpha), 0.02, 1);
}

/// The structural suite: everything the solvers promise independent of scenario.
inline std::vector<PropertyResult> run_property_suite(std::uint64_t seed) {
  return {lf_mass_conservation(seed),
          godunov_mass_conservation(seed + 1),
          particle_mass_exact(seed + 2),
          young_inequality(seed + 3),
          jensen_convolution(seed + 4),
          diffusion_maximum_principle(seed + 5),
          lf_odd_symmetry(seed + 6),
          one_sided_right_dependence(seed + 7),
          godunov_convergence_order()};
}

}  // namespace nllab
