// Compactly supported convolution kernels, their discrete convolution on a grid
// and their exact convolution with a particle measure.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "nllab/core_fields.hpp"
#include "nllab/error.hpp"
#include "nllab/particles.hpp"

namespace nllab {

enum class KernelShape { EvenBump, OneSidedLeft };

inline std::string to_string(KernelShape s) {
  return s == KernelShape::EvenBump ? "even_bump" : "one_sided_left";
}

inline KernelShape kernel_shape_from_string(const std::string& s) {
  if (s == "even_bump" || s == "even") return KernelShape::EvenBump;
  if (s == "one_sided_left" || s == "one_sided") return KernelShape::OneSidedLeft;
  throw LabError("unknown kernel shape '" + s + "'");
}

namespace detail {

// Standard bump exp(-1/(1-r^2)) on |r| < 1.
inline double bump(double r) {
  const double q = 1.0 - r * r;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

inline double bump_derivative(double r) {
  const double q = 1.0 - r * r;
  return q > 0.0 ? std::exp(-1.0 / q) * (-2.0 * r) / (q * q) : 0.0;
}

// Unscaled profile on unit support before normalization, as a function of s = x/eps.
inline double unit_profile(KernelShape shape, double s) {
  if (shape == KernelShape::EvenBump) return bump(s);
  if (s <= -1.0 || s >= 0.0) return 0.0;
  return bump(2.0 * s + 1.0);
}

inline double unit_profile_derivative(KernelShape shape, double s) {
  if (shape == KernelShape::EvenBump) return bump_derivative(s);
  if (s <= -1.0 || s >= 0.0) return 0.0;
  return 2.0 * bump_derivative(2.0 * s + 1.0);
}

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-12);
}

}  // namespace detail

/// Scaled kernel eta_eps(x) = eta(x/eps)/eps with eta a smooth bump of unit mass.
class Kernel {
 public:
  Kernel(KernelShape shape, double epsilon) : shape_(shape), epsilon_(epsilon) {
    ensure(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be > 0");
    const double lo = -1.0;
    const double hi = shape == KernelShape::EvenBump ? 1.0 : 0.0;
    normalization_ = detail::integrate(
        [shape](double s) { return detail::unit_profile(shape, s); }, lo, hi);
    inv_eps_ = 1.0 / epsilon;
    scale_ = 1.0 / (normalization_ * epsilon);

    const double mass = detail::integrate([this](double x) { return (*this)(x); },
                                          lo * epsilon, hi * epsilon);
    ensure(std::abs(mass - 1.0) <= 1e-10, "kernel normalization failed");

    // Dense sampling of the analytic derivative on the unit support.
    double dmax = 0.0;
    constexpr int kProbe = 20000;
    for (int k = 0; k <= kProbe; ++k) {
      const double s = lo + (hi - lo) * k / kProbe;
      dmax = std::max(dmax, std::abs(detail::unit_profile_derivative(shape, s)));
    }
    max_derivative_ = dmax / normalization_ * inv_eps_ * inv_eps_;
  }

  KernelShape shape() const { return shape_; }
  double epsilon() const { return epsilon_; }
  // Integral of the unnormalized unit-scale profile.
  double normalization_constant() const { return normalization_; }
  // max |eta_eps'|.
  double max_derivative() const { return max_derivative_; }
  double support_lo() const { return -epsilon_; }
  double support_hi() const { return shape_ == KernelShape::EvenBump ? epsilon_ : 0.0; }
  bool is_even() const { return shape_ == KernelShape::EvenBump; }

  double operator()(double x) const {
    const double s = x * inv_eps_;
    if (shape_ == KernelShape::EvenBump) {
      const double q = 1.0 - s * s;
      return q > 0.0 ? std::exp(-1.0 / q) * scale_ : 0.0;
    }
    if (s <= -1.0 || s >= 0.0) return 0.0;
    const double r = 2.0 * s + 1.0;
    const double q = 1.0 - r * r;
    return q > 0.0 ? std::exp(-1.0 / q) * scale_ : 0.0;
  }

 private:
  KernelShape shape_;
  double epsilon_;
  double normalization_ = 0.0;
  double inv_eps_ = 0.0;
  double scale_ = 0.0;
  double max_derivative_ = 0.0;
};

inline double kernel_eval(const Kernel& k, double x) { return k(x); }

inline nlohmann::json to_json(const Kernel& k) {
  return {{"shape", to_string(k.shape())},
          {"epsilon", k.epsilon()},
          {"normalization_constant", k.normalization_constant()}};
}

/// Kernel samples at offsets j*dx, renormalized to sum to one.
/// Result g_i = sum_j w_j f_{i-j}; cells outside the grid contribute zero.
class Convolver {
 public:
  Convolver(const Kernel& k, double dx) : even_(k.is_even()) {
    ensure(dx > 0.0, "grid spacing must be positive");
    if (k.epsilon() < dx) throw LabError("kernel under-resolved");
    const int reach = static_cast<int>(std::ceil(k.epsilon() / dx));
    std::vector<double> raw;
    int j_lo = 0;
    bool any = false;
    for (int j = -reach; j <= reach; ++j) {
      const double w = k(j * dx);
      if (w > 0.0 && !any) {
        j_lo = j;
        any = true;
      }
      if (any) raw.push_back(w);
    }
    while (!raw.empty() && raw.back() == 0.0) raw.pop_back();
    if (raw.empty()) throw LabError("kernel under-resolved");
    double sum = 0.0;
    for (double w : raw) sum += w;
    raw_mass_ = sum * dx;
    for (double& w : raw) w /= sum;
    j_lo_ = j_lo;
    weights_ = std::move(raw);
    if (even_) {
      // Symmetric layout: weights_[half_ + j] == weights_[half_ - j].
      half_ = -j_lo_;
      for (int j = 1; j <= half_; ++j) weights_[half_ - j] = weights_[half_ + j];
    }
  }

  int first_offset() const { return j_lo_; }
  int last_offset() const { return j_lo_ + static_cast<int>(weights_.size()) - 1; }
  std::span<const double> weights() const { return weights_; }
  double weight(int j) const { return weights_[static_cast<std::size_t>(j - j_lo_)]; }
  // Riemann sum of the raw samples before renormalization; 1 - raw_mass is the
  // kernel perturbation introduced by renormalizing.
  double raw_mass() const { return raw_mass_; }

  void apply(std::span<const double> in, std::span<double> out) const {
    const int n = static_cast<int>(in.size());
    ensure(out.size() == in.size(), "convolution output size mismatch");
    if (even_) {
      // Pairing f_{i-j} + f_{i+j} makes reflection and odd symmetry exact.
      const double w0 = weights_[static_cast<std::size_t>(half_)];
      for (int i = 0; i < n; ++i) {
        double acc = w0 * in[i];
        for (int j = 1; j <= half_; ++j) {
          const double left = i - j >= 0 ? in[i - j] : 0.0;
          const double right = i + j < n ? in[i + j] : 0.0;
          acc += weights_[static_cast<std::size_t>(half_ + j)] * (left + right);
        }
        out[i] = acc;
      }
      return;
    }
    const int j_hi = last_offset();
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      // Offsets ordered from nearest to farthest source cell.
      for (int j = j_hi; j >= j_lo_; --j) {
        const int src = i - j;
        if (src < 0 || src >= n) continue;
        acc += weights_[static_cast<std::size_t>(j - j_lo_)] * in[src];
      }
      out[i] = acc;
    }
  }

  Field apply(const Field& f) const {
    Field g(f.grid, f.time);
    apply(f.values, g.values);
    return g;
  }

 private:
  bool even_;
  int j_lo_ = 0;
  int half_ = 0;
  std::vector<double> weights_;
  double raw_mass_ = 1.0;
};

inline Field convolve(const Field& f, const Kernel& k) {
  check_finite(f);
  return Convolver(k, f.grid.dx()).apply(f);
}

/// Exact convolution of the particle measure with eta_eps, evaluated at x.
/// Contributions are summed outward from x on each side, left sum first, so that
/// an antisymmetric ensemble gives an exactly odd result.
inline double convolve_particles(const ParticleEnsemble& e, const Kernel& k, double x) {
  const auto& pos = e.positions;
  // eta_eps(x - X) != 0 requires X in (x - support_hi, x - support_lo).
  const double lo = x - k.support_hi();
  const double hi = x - k.support_lo();
  const auto begin = pos.begin();
  const auto split = std::lower_bound(begin, pos.end(), x);
  double left = 0.0;
  for (auto it = split; it != begin;) {
    --it;
    if (*it <= lo) break;
    const auto j = static_cast<std::size_t>(it - begin);
    left += e.masses[j] * k(x - *it);
  }
  double self = 0.0;
  auto it = split;
  if (it != pos.end() && *it == x) {
    self = e.masses[static_cast<std::size_t>(it - begin)] * k(0.0);
    ++it;
  }
  double right = 0.0;
  for (; it != pos.end() && *it < hi; ++it) {
    const auto j = static_cast<std::size_t>(it - begin);
    right += e.masses[j] * k(x - *it);
  }
  return (left + right) + self;
}

}  // namespace nllab
