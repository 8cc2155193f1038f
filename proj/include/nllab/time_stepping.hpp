#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nllab/error.hpp"

namespace nllab {

// Sorted output times in [0, t_end], always containing 0 and t_end.
inline std::vector<double> normalize_output_times(std::vector<double> requested, double t_end) {
  ensure(std::isfinite(t_end) && t_end > 0.0, "t_end must be > 0");
  requested.push_back(0.0);
  requested.push_back(t_end);
  std::vector<double> out;
  for (double t : requested) {
    ensure(std::isfinite(t) && t >= 0.0 && t <= t_end, "output time outside [0, t_end]");
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double a, double b) { return b - a <= 1e-12 * std::max(1.0, t_end); }),
            out.end());
  return out;
}

// Evenly spaced output times (count intervals) on [0, t_end].
inline std::vector<double> uniform_output_times(double t_end, int count) {
  std::vector<double> out;
  for (int k = 0; k <= count; ++k) out.push_back(t_end * k / count);
  return out;
}

// Clips a step so that it lands exactly on the next output time.
inline double clip_step(double t, double dt, double t_next) {
  if (t + dt >= t_next || t_next - (t + dt) < 1e-12 * std::max(1.0, t_next)) return t_next - t;
  return dt;
}

}  // namespace nllab
