// Lipschitz velocity laws b with b(0) = 0 and the associated flux u b(u).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nllab/error.hpp"

namespace nllab {

enum class VelocityVariant { Identity, AffineShifted, Tabulated };

inline std::string to_string(VelocityVariant v) {
  switch (v) {
    case VelocityVariant::Identity: return "identity";
    case VelocityVariant::AffineShifted: return "affine_shifted";
    case VelocityVariant::Tabulated: return "tabulated";
  }
  return "unknown";
}

/// A velocity law as the user writes it, before the b(0) = 0 normalization.
struct RawVelocity {
  std::string name;
  std::function<double(double)> fn;
};

// Probe interval for the sampled Lipschitz check.
struct ProbeRange {
  double lo = -2.0;
  double hi = 2.0;
};

inline constexpr int kLipschitzProbes = 1000;

inline double sampled_lipschitz(const std::function<double(double)>& b, ProbeRange r) {
  double L = 0.0;
  double prev_x = r.lo;
  double prev_y = b(prev_x);
  for (int k = 1; k < kLipschitzProbes; ++k) {
    const double x = r.lo + (r.hi - r.lo) * k / (kLipschitzProbes - 1);
    const double y = b(x);
    L = std::max(L, std::abs(y - prev_y) / (x - prev_x));
    prev_x = x;
    prev_y = y;
  }
  return L;
}

class VelocityLaw {
 public:
  static VelocityLaw identity() {
    VelocityLaw v;
    v.variant_ = VelocityVariant::Identity;
    v.name_ = "identity";
    v.lipschitz_ = 1.0;
    v.fn_ = [](double u) { return u; };
    return v;
  }

  // b(u) = 0: pure diffusion when used by the viscous solver.
  static VelocityLaw zero() {
    VelocityLaw v;
    v.variant_ = VelocityVariant::AffineShifted;
    v.name_ = "zero";
    v.lipschitz_ = 0.0;
    v.fn_ = [](double) { return 0.0; };
    return v;
  }

  /// Piecewise-linear interpolant of (xs, ys), constant outside the table,
  /// shifted so that b(0) = 0. Requires 0 inside the table range.
  static VelocityLaw tabulated(std::vector<double> xs, std::vector<double> ys) {
    ensure(xs.size() == ys.size() && xs.size() >= 2, "table needs >= 2 samples");
    for (std::size_t k = 1; k < xs.size(); ++k) {
      ensure(xs[k - 1] < xs[k], "table abscissae must be strictly increasing");
    }
    ensure(xs.front() <= 0.0 && 0.0 <= xs.back(), "table must cover u = 0");
    VelocityLaw v;
    v.variant_ = VelocityVariant::Tabulated;
    v.name_ = "tabulated";
    const double at_zero = interpolate(xs, ys, 0.0);
    for (double& y : ys) y -= at_zero;
    double L = 0.0;
    for (std::size_t k = 1; k < xs.size(); ++k) {
      L = std::max(L, std::abs(ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]));
    }
    v.lipschitz_ = L;
    v.shift_ = at_zero;
    v.table_x_ = std::move(xs);
    v.table_y_ = std::move(ys);
    v.fn_ = [tx = v.table_x_, ty = v.table_y_](double u) { return interpolate(tx, ty, u); };
    return v;
  }

  // b(u) = raw(u) - shift for a user law; lipschitz is the sampled constant.
  static VelocityLaw affine_shifted(std::string name, std::function<double(double)> shifted,
                                    double shift, double lipschitz) {
    VelocityLaw v;
    v.variant_ = VelocityVariant::AffineShifted;
    v.name_ = std::move(name);
    v.fn_ = std::move(shifted);
    v.shift_ = shift;
    v.lipschitz_ = lipschitz;
    return v;
  }

  VelocityLaw with_shift(double shift) const {
    VelocityLaw v = *this;
    v.shift_ = shift;
    return v;
  }

  VelocityVariant variant() const { return variant_; }
  const std::string& name() const { return name_; }
  double lipschitz() const { return lipschitz_; }
  // Shift removed by normalization (raw b(0)).
  double shift() const { return shift_; }

  double operator()(double u) const {
    if (variant_ == VelocityVariant::Identity) return u;
    return fn_(u);
  }

  // Upper bound of |d/du (u b(u))| for |u| <= amplitude.
  double max_flux_speed(double amplitude) const {
    const double a = std::abs(amplitude);
    if (variant_ == VelocityVariant::Identity) return 2.0 * a;
    return lipschitz_ * a + max_abs_velocity(a);
  }

  // max |b(u)| over |u| <= amplitude; exact for Identity, Lipschitz bound otherwise.
  double max_abs_velocity(double amplitude) const {
    const double a = std::abs(amplitude);
    if (variant_ == VelocityVariant::Identity) return a;
    return std::max(std::abs((*this)(a)), std::abs((*this)(-a)));
  }

  nlohmann::json to_json() const {
    return {{"variant", to_string(variant_)}, {"name", name_}, {"L", lipschitz_},
            {"shift", shift_}};
  }

 private:
  static double interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                            double u) {
    if (u <= xs.front()) return ys.front();
    if (u >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), u);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double t = (u - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
  }

  VelocityVariant variant_ = VelocityVariant::Identity;
  std::string name_;
  double lipschitz_ = 0.0;
  double shift_ = 0.0;
  std::function<double(double)> fn_;
  std::vector<double> table_x_;
  std::vector<double> table_y_;
};

struct NormalizedLaw {
  VelocityLaw law;
  double shift;
};

/// Returns b - b(0) and the shift xi = b(0). Solutions of the shifted problem
/// relate to the original ones through x -> x - xi t.
inline NormalizedLaw normalize(const RawVelocity& raw, ProbeRange range = {}) {
  ensure(static_cast<bool>(raw.fn), "velocity law has no function");
  const double xi = raw.fn(0.0);
  ensure(std::isfinite(xi), "velocity law undefined at 0");
  auto shifted = [fn = raw.fn, xi](double u) { return fn(u) - xi; };

  bool is_identity = true;
  for (int k = 0; k < kLipschitzProbes && is_identity; ++k) {
    const double x = range.lo + (range.hi - range.lo) * k / (kLipschitzProbes - 1);
    is_identity = shifted(x) == x;
  }
  if (is_identity) return {VelocityLaw::identity().with_shift(xi), xi};
  const double lip = sampled_lipschitz(shifted, range);
  return {VelocityLaw::affine_shifted(raw.name, shifted, xi, lip), xi};
}

inline NormalizedLaw normalize(const VelocityLaw& law, ProbeRange range = {}) {
  return normalize(RawVelocity{law.name(), [law](double u) { return law(u); }}, range);
}

inline double flux(const VelocityLaw& vl, double u) { return u * vl(u); }

}  // namespace nllab
