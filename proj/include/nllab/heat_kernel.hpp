// Analytic heat kernel G_nu(t, x) = G(nu t, x) in d dimensions and the
// L^q scaling of its gradient.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "nllab/error.hpp"

namespace nllab {

struct HeatKernelSpec {
  double nu = 1.0;
  int dim = 1;
};

inline void validate(const HeatKernelSpec& s) {
  ensure(std::isfinite(s.nu) && s.nu > 0.0, "nu must be > 0");
  ensure(s.dim >= 1, "dimension must be >= 1");
}

// G_nu(t, x) at radius |x| = r.
inline double heat_kernel_eval(const HeatKernelSpec& spec, double t, double r) {
  validate(spec);
  if (!(t > 0.0)) throw LabError("heat kernel requires t > 0");
  const double s = spec.nu * t;
  const double d = spec.dim;
  return std::pow(4.0 * std::numbers::pi * s, -0.5 * d) * std::exp(-r * r / (4.0 * s));
}

// |grad G_nu(t, x)| at radius r.
inline double heat_kernel_grad_magnitude(const HeatKernelSpec& spec, double t, double r) {
  const double s = spec.nu * t;
  return heat_kernel_eval(spec, t, r) * r / (2.0 * s);
}

/// Exponent alpha with ||grad G_nu(t)||_{L^q} = C(d, q) (nu t)^alpha.
inline double grad_lq_exponent(const HeatKernelSpec& spec, double q) {
  validate(spec);
  ensure(q > 1.0, "q must be > 1");
  const double d = spec.dim;
  return (d - q * (d + 1.0)) / (2.0 * q);
}

inline double sphere_area(int dim) {
  const double h = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, h) / boost::math::tgamma(h);
}

/// Radial quadrature of int |f(r)|^q over R^d; returns the L^q norm.
template <class Radial>
double radial_lq_norm(Radial f, int dim, double q) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate(
      [&](double r) { return std::pow(r, dim - 1) * std::pow(std::abs(f(r)), q); });
  return std::pow(sphere_area(dim) * integral, 1.0 / q);
}

inline double heat_kernel_l1_norm(const HeatKernelSpec& spec, double t) {
  validate(spec);
  if (!(t > 0.0)) throw LabError("heat kernel requires t > 0");
  return radial_lq_norm([&](double r) { return heat_kernel_eval(spec, t, r); }, spec.dim, 1.0);
}

inline double heat_kernel_grad_lq_norm(const HeatKernelSpec& spec, double t, double q) {
  validate(spec);
  if (!(t > 0.0)) throw LabError("heat kernel requires t > 0");
  return radial_lq_norm([&](double r) { return heat_kernel_grad_magnitude(spec, t, r); },
                        spec.dim, q);
}

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  ensure(x.size() == y.size() && x.size() >= 2, "slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Log-log slope of ||grad G_nu(t)||_{L^q} against t on log-spaced times.
inline double measured_grad_lq_slope(const HeatKernelSpec& spec, double q, double t_lo,
                                     double t_hi, int samples = 13) {
  ensure(t_lo > 0.0 && t_lo < t_hi && samples >= 2, "invalid time range");
  std::vector<double> lt, ln;
  for (int k = 0; k < samples; ++k) {
    const double lt_k = std::log(t_lo) + (std::log(t_hi) - std::log(t_lo)) * k / (samples - 1);
    lt.push_back(lt_k);
    ln.push_back(std::log(heat_kernel_grad_lq_norm(spec, std::exp(lt_k), q)));
  }
  return least_squares_slope(lt, ln);
}

}  // namespace nllab
