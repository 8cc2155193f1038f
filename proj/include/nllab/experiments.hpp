// Scripted scenarios: the three counterexamples, the viscous epsilon-rate, the
// vanishing-viscosity surrogate and Godunov self-convergence.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nllab/core_fields.hpp"
#include "nllab/diagnostics.hpp"
#include "nllab/error.hpp"
#include "nllab/heat_kernel.hpp"
#include "nllab/kernels.hpp"
#include "nllab/local_entropy.hpp"
#include "nllab/nonlocal_solvers.hpp"
#include "nllab/particles.hpp"
#include "nllab/velocity_laws.hpp"
#include "nllab/viscous_solver.hpp"

namespace nllab {

inline constexpr const char* kCodeVersion = "nllab 1.0.0";
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- data

/// 1 on (-1, 0), 0 elsewhere.
inline Field step_datum(const Grid1D& g) {
  const double breaks[] = {-1.0, 0.0};
  const double levels[] = {1.0};
  return average_piecewise_constant(g, breaks, levels);
}

/// 1 on (-1, 0), -1 on (0, 1), 0 elsewhere (zero on 1 < |x| < 2).
inline Field odd_datum(const Grid1D& g) {
  const double breaks[] = {-1.0, 0.0, 1.0};
  const double levels[] = {1.0, -1.0};
  return average_piecewise_constant(g, breaks, levels);
}

/// Centered Gaussian of the given mass and standard deviation; values below
/// 1e-14 of the peak are set to zero so particle runs only seed the bulk.
inline Field gaussian_datum(const Grid1D& g, double mass, double width) {
  ensure(mass > 0.0, "gaussian mass must be > 0");
  ensure(width > 0.0, "gaussian width must be > 0");
  const double peak = mass / (width * std::sqrt(2.0 * M_PI));
  Field f = sample_field(g, [&](double x) { return peak * std::exp(-x * x / (2.0 * width * width)); });
  for (double& v : f.values) {
    if (v < 1e-14 * peak) v = 0.0;
  }
  return f;
}

// ---------------------------------------------------------------- verdicts

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 1;
}

/// Combined verdict: any INCONCLUSIVE wins over FAIL, which wins over PASS.
inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  return Verdict::Pass;
}

/// value must lie in [lo, hi]; solver names the scheme that produced it.
struct Check {
  std::string name;
  std::string solver;
  double value = 0.0;
  double lo = -kInf;
  double hi = kInf;
  bool passed = false;
};

inline Check make_check(std::string name, std::string solver, double value, double lo, double hi) {
  Check c{std::move(name), std::move(solver), value, lo, hi, false};
  c.passed = std::isfinite(value) && value >= lo && value <= hi;
  return c;
}

struct GateResult {
  std::string diagnostic;
  double coarse = 0.0;
  double fine = 0.0;
  double margin = 0.0;
  bool converged = false;
};

/// CONVERGED iff the diagnostic moves by less than a quarter of its decision
/// margin between the coarse and the fine resolution.
inline GateResult grid_convergence_gate(std::string diagnostic, double coarse, double fine,
                                        double margin) {
  GateResult g{std::move(diagnostic), coarse, fine, std::abs(margin), false};
  g.converged = std::isfinite(coarse) && std::isfinite(fine) &&
                std::abs(fine - coarse) < 0.25 * g.margin;
  return g;
}

/// Self-convergence gate: CONVERGED iff the difference between successive
/// resolutions shrinks when the resolution doubles.
inline GateResult richardson_gate(std::string diagnostic, double coarse, double fine) {
  GateResult g{std::move(diagnostic), coarse, fine, coarse, false};
  g.converged = std::isfinite(coarse) && std::isfinite(fine) && fine < coarse;
  return g;
}

// Decision margin of a check: distance from the value to the nearest finite bound.
inline double decision_margin(const Check& c) {
  double m = kInf;
  if (std::isfinite(c.lo)) m = std::min(m, std::abs(c.value - c.lo));
  if (std::isfinite(c.hi)) m = std::min(m, std::abs(c.value - c.hi));
  return m;
}

struct Metric {
  std::string name;
  std::string solver;
  double value = 0.0;
};

struct ScenarioReport {
  std::string scenario;
  nlohmann::json config;
  std::vector<Check> checks;
  std::vector<GateResult> gates;
  std::vector<Metric> metrics;
  std::vector<std::pair<std::string, DiagnosticSeries>> series;
  std::vector<std::pair<std::string, Field>> fields;
  double wall_seconds = 0.0;

  void check(std::string name, std::string solver, double value, double lo, double hi) {
    checks.push_back(make_check(std::move(name), std::move(solver), value, lo, hi));
  }
  void metric(std::string name, std::string solver, double value) {
    metrics.push_back({std::move(name), std::move(solver), value});
  }
  void gate(std::string name, double coarse, double fine, double margin) {
    gates.push_back(grid_convergence_gate(std::move(name), coarse, fine, margin));
  }
  const Check& find_check(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return c;
    }
    throw LabError("no check '" + name + "' in report " + scenario);
  }
  double find_metric(const std::string& name) const {
    for (const auto& m : metrics) {
      if (m.name == name) return m.value;
    }
    throw LabError("no metric '" + name + "' in report " + scenario);
  }

  bool converged() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.converged; });
  }
  Verdict verdict() const {
    if (!converged()) return Verdict::Inconclusive;
    for (const auto& c : checks) {
      if (!c.passed) return Verdict::Fail;
    }
    return Verdict::Pass;
  }
};

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline nlohmann::json to_json(const ScenarioReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["verdict"] = to_string(r.verdict());
  j["config"] = r.config;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name}, {"solver", c.solver}, {"value", json_number(c.value)},
                           {"lo", json_number(c.lo)}, {"hi", json_number(c.hi)}, {"passed", c.passed}});
  }
  j["gates"] = nlohmann::json::array();
  for (const auto& g : r.gates) {
    j["gates"].push_back({{"diagnostic", g.diagnostic}, {"coarse", json_number(g.coarse)},
                          {"fine", json_number(g.fine)}, {"margin", json_number(g.margin)},
                          {"converged", g.converged}});
  }
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : r.metrics) {
    j["metrics"].push_back({{"name", m.name}, {"solver", m.solver}, {"value", json_number(m.value)}});
  }
  return j;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Trapezoid rule of y over the (strictly increasing) abscissae t.
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  ensure(t.size() == y.size(), "trapezoid needs equal lengths");
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) acc += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
  return acc;
}

inline std::size_t time_index(const std::vector<double>& times, double t) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return k;
  }
  throw LabError("output time " + format_double(t) + " not recorded");
}

inline std::vector<double> arithmetic_times(double dt, double t_end) {
  std::vector<double> out;
  const int n = static_cast<int>(std::llround(t_end / dt));
  for (int k = 1; k <= n; ++k) out.push_back(t_end * k / n);
  return out;
}

// ---------------------------------------------------------------- configs

struct Ce1Config {
  double epsilon = 0.05;
  int particles = 2000;
  int godunov_cells = 4096;
  double t_end = 0.25;
  // Headline nonlocal solver: "particles" or "lax_friedrichs" (dx = support length / particles).
  std::string solver = "particles";
};

struct Ce2Config {
  double epsilon = 0.05;
  int particles = 1000;
  int godunov_cells = 4096;
  double t_end = 0.5;
  // Horizon of the baricenter comparison.
  double t_baricenter = 1.0;
  // Headline nonlocal solver: "particles" or "lax_friedrichs" (dx = support length / particles).
  std::string solver = "particles";
};

struct Ce3Config {
  double epsilon = 0.05;
  int particles = 2000;
  int godunov_cells = 4096;
  double t_end = 0.5;
  // Finite-volume counterpart runs at dx = epsilon / fv_refinement.
  int fv_refinement = 20;
  // Headline nonlocal solver: "particles" or "lax_friedrichs" (dx = support length / particles).
  std::string solver = "particles";
};

struct RateConfig {
  double nu = 0.1;
  double p = 2.0;
  std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.025};
  std::string kernel = "one_sided_left";
  // dx = min(eps_list) / dx_refinement
  int dx_refinement = 10;
  double t_end = 1.0;
  double output_every = 0.05;
  double mass = 1.0;
  double width = 0.3;
};

struct ViscConfig {
  double epsilon = 0.1;
  std::vector<double> nu_list = {0.1, 0.03, 0.01, 0.003};
  double dx = 0.0025;
  double t_end = 0.5;
  double mass = 0.5;
  double width = 0.3;
  // Local viscous problem on the step datum against the exact entropy solution.
  std::vector<double> local_nu_list = {0.1, 0.05, 0.025};
};

struct ConvergenceConfig {
  std::vector<int> cells = {512, 1024, 2048, 4096};
  double t_end = 0.5;
};

inline void validate(const Ce1Config& c) {
  ensure(c.epsilon > 0.0, "epsilon must be > 0");
  ensure(c.particles >= 4, "particles must be >= 4");
  ensure(c.godunov_cells >= 8, "godunov_cells must be >= 8");
  ensure(c.t_end > 0.0 && c.t_end <= 0.25, "t_end must be in (0, 0.25]");
  ensure(c.solver == "particles" || c.solver == "lax_friedrichs",
         "solver must be particles or lax_friedrichs");
}

inline void validate(const Ce2Config& c) {
  ensure(c.epsilon > 0.0, "epsilon must be > 0");
  ensure(c.particles >= 4, "particles must be >= 4");
  ensure(c.godunov_cells >= 8, "godunov_cells must be >= 8");
  ensure(c.t_end > 0.0 && c.t_end <= 1.0, "t_end must be in (0, 1]");
  ensure(c.t_baricenter >= c.t_end && c.t_baricenter <= 1.0, "t_baricenter must be in [t_end, 1]");
  ensure(c.solver == "particles" || c.solver == "lax_friedrichs",
         "solver must be particles or lax_friedrichs");
}

inline void validate(const Ce3Config& c) {
  ensure(c.epsilon > 0.0, "epsilon must be > 0");
  ensure(c.particles >= 4, "particles must be >= 4");
  ensure(c.godunov_cells >= 8, "godunov_cells must be >= 8");
  ensure(c.t_end > 0.0 && c.t_end <= 1.0, "t_end must be in (0, 1]");
  ensure(c.fv_refinement >= 1, "fv_refinement must be >= 1");
  ensure(c.solver == "particles" || c.solver == "lax_friedrichs",
         "solver must be particles or lax_friedrichs");
}

inline void validate(const RateConfig& c) {
  ensure(c.nu > 0.0, "nu must be > 0");
  ensure(c.p >= 2.0 && std::isfinite(c.p), "p must satisfy 2 <= p < inf");
  ensure(c.eps_list.size() >= 2, "eps_list needs at least two values");
  for (double e : c.eps_list) ensure(e > 0.0, "epsilon must be > 0");
  ensure(c.kernel == "even_bump" || c.kernel == "one_sided_left",
         "kernel must be even_bump or one_sided_left");
  ensure(c.dx_refinement >= 1, "dx_refinement must be >= 1");
  ensure(c.t_end > 0.0, "t_end must be > 0");
  ensure(c.output_every > 0.0 && c.output_every <= c.t_end, "output_every must be in (0, t_end]");
  ensure(c.mass > 0.0, "mass must be > 0");
  ensure(c.width > 0.0, "width must be > 0");
}

inline void validate(const ViscConfig& c) {
  ensure(c.epsilon > 0.0, "epsilon must be > 0");
  ensure(c.nu_list.size() >= 2, "nu_list needs at least two values");
  for (double n : c.nu_list) ensure(n > 0.0, "nu must be > 0");
  for (double n : c.local_nu_list) ensure(n > 0.0, "nu must be > 0");
  ensure(c.dx > 0.0 && c.dx <= c.epsilon / 4.0, "dx must be in (0, epsilon/4]");
  ensure(c.t_end > 0.0 && c.t_end <= 1.0, "t_end must be in (0, 1]");
  ensure(c.mass > 0.0, "mass must be > 0");
  ensure(c.width > 0.0, "width must be > 0");
}

inline void validate(const ConvergenceConfig& c) {
  ensure(c.cells.size() >= 2, "cells needs at least two resolutions");
  for (std::size_t k = 0; k < c.cells.size(); ++k) {
    ensure(c.cells[k] >= 8, "cells must be >= 8");
    if (k > 0) ensure(c.cells[k] == 2 * c.cells[k - 1], "cells must double at each entry");
  }
  ensure(c.t_end > 0.0 && c.t_end <= 1.0, "t_end must be in (0, 1]");
}

inline nlohmann::json to_json(const Ce1Config& c) {
  return {{"epsilon", c.epsilon}, {"particles", c.particles}, {"godunov_cells", c.godunov_cells},
          {"t_end", c.t_end}, {"solver", c.solver}};
}
inline nlohmann::json to_json(const Ce2Config& c) {
  return {{"epsilon", c.epsilon}, {"particles", c.particles}, {"godunov_cells", c.godunov_cells},
          {"t_end", c.t_end}, {"t_baricenter", c.t_baricenter}, {"solver", c.solver}};
}
inline nlohmann::json to_json(const Ce3Config& c) {
  return {{"epsilon", c.epsilon}, {"particles", c.particles}, {"godunov_cells", c.godunov_cells},
          {"t_end", c.t_end}, {"fv_refinement", c.fv_refinement}, {"solver", c.solver}};
}
inline nlohmann::json to_json(const RateConfig& c) {
  return {{"nu", c.nu}, {"p", c.p}, {"eps_list", c.eps_list}, {"kernel", c.kernel},
          {"dx_refinement", c.dx_refinement}, {"t_end", c.t_end}, {"output_every", c.output_every},
          {"mass", c.mass}, {"width", c.width}};
}
inline nlohmann::json to_json(const ViscConfig& c) {
  return {{"epsilon", c.epsilon}, {"nu_list", c.nu_list}, {"dx", c.dx}, {"t_end", c.t_end},
          {"mass", c.mass}, {"width", c.width}, {"local_nu_list", c.local_nu_list}};
}
inline nlohmann::json to_json(const ConvergenceConfig& c) {
  return {{"cells", c.cells}, {"t_end", c.t_end}};
}

// ---------------------------------------------------------------- shared runs

inline std::string particle_tag(int n) { return "particles(N=" + std::to_string(n) + ")"; }
inline std::string godunov_tag(int n) { return "godunov(N=" + std::to_string(n) + ")"; }
inline std::string lf_tag(int n) { return "lax_friedrichs(N=" + std::to_string(n) + ")"; }

// Particle run seeded with one particle per cell of `cells` uniform cells on
// [lo, hi]; the run grid is widened by `pad` on each side.
inline NonlocalRun particle_run(const Kernel& k, int cells, double lo, double hi, double pad,
                                const std::vector<double>& outputs, double t_end,
                                bool odd, double window_lo, double window_hi) {
  const double h = (hi - lo) / cells;
  const int pad_cells = static_cast<int>(std::ceil(pad / h));
  const Grid1D g(lo - pad_cells * h, hi + pad_cells * h, cells + 2 * pad_cells);
  NonlocalRunConfig cfg{g, k};
  cfg.scheme = NonlocalScheme::Particles;
  cfg.t_end = t_end;
  cfg.output_times = outputs;
  cfg.window_lo = window_lo;
  cfg.window_hi = window_hi;
  cfg.signed_masses = odd;
  return run_nonlocal(cfg, odd ? odd_datum(g) : step_datum(g));
}

// Godunov run on [-half_width, half_width].
inline LocalRun godunov_run(int cells, double half_width, double t_end,
                            const std::vector<double>& outputs, bool odd,
                            double window_lo = -kInf, double window_hi = 0.0) {
  const Grid1D g(-half_width, half_width, cells);
  LocalRunConfig cfg;
  cfg.t_end = t_end;
  cfg.output_times = outputs;
  cfg.window_lo = window_lo;
  cfg.window_hi = window_hi;
  return run_godunov(cfg, odd ? odd_datum(g) : step_datum(g));
}

// Lax-Friedrichs counterpart at dx close to `dx` on [-2, 2].
inline NonlocalRun lf_run(const Kernel& k, double dx, double t_end, bool odd,
                          double window_lo = -kInf, double window_hi = 0.0) {
  const Grid1D g = Grid1D::with_spacing(-2.0, 2.0, dx);
  NonlocalRunConfig cfg{g, k};
  cfg.t_end = t_end;
  cfg.window_lo = window_lo;
  cfg.window_hi = window_hi;
  return run_nonlocal(cfg, odd ? odd_datum(g) : step_datum(g));
}

struct TaggedRun {
  NonlocalRun run;
  std::string solver;
};

// Headline nonlocal run on datum support [lo, hi]: n particles, or a
// Lax-Friedrichs grid on [-2, 2] with the same spacing (hi - lo) / n.
inline TaggedRun nonlocal_headline(const std::string& solver, const Kernel& k, int n, double lo,
                                   double hi, double pad, const std::vector<double>& outputs,
                                   double t_end, bool odd, double window_lo, double window_hi) {
  if (nonlocal_scheme_from_string(solver) == NonlocalScheme::Particles) {
    return {particle_run(k, n, lo, hi, pad, outputs, t_end, odd, window_lo, window_hi), particle_tag(n)};
  }
  const Grid1D g = Grid1D::with_spacing(-2.0, 2.0, (hi - lo) / n);
  NonlocalRunConfig cfg{g, k};
  cfg.t_end = t_end;
  cfg.output_times = outputs;
  cfg.window_lo = window_lo;
  cfg.window_hi = window_hi;
  return {run_nonlocal(cfg, odd ? odd_datum(g) : step_datum(g)), lf_tag(g.size())};
}

// ---------------------------------------------------------------- CE1

/// Odd datum, even kernel: the nonlocal solution keeps all of the mass of
/// (-inf, 0] while the entropy solution loses a quarter of it by t = 1/4.
inline ScenarioReport counterexample_1(const Ce1Config& c = {}) {
  validate(c);
  Stopwatch clock;
  ScenarioReport r;
  r.scenario = "ce1";
  r.config = to_json(c);
  const Kernel k(KernelShape::EvenBump, c.epsilon);

  auto nonlocal_mass = [&](int n) {
    return nonlocal_headline(c.solver, k, n, -1.0, 1.0, 0.0, {}, c.t_end, true, -4.0, 0.0);
  };
  const TaggedRun headline = nonlocal_mass(c.particles);
  const NonlocalRun& fine = headline.run;
  const NonlocalRun coarse = nonlocal_mass(c.particles / 2).run;
  const double m_fine = fine.diagnostics.last("window_mass");
  r.check("nonlocal window_mass[-4,0]", headline.solver, m_fine, 0.98, 1.02);
  r.gate("nonlocal window_mass[-4,0]", coarse.diagnostics.last("window_mass"), m_fine, 0.02);

  const LocalRun gd = godunov_run(c.godunov_cells, 4.0, c.t_end, {}, true, -4.0, 0.0);
  const LocalRun gd_coarse = godunov_run(c.godunov_cells / 2, 4.0, c.t_end, {}, true, -4.0, 0.0);
  const double g_fine = gd.diagnostics.last("window_mass");
  r.check("entropy window_mass[-4,0]", godunov_tag(c.godunov_cells), g_fine, 0.73, 0.77);
  r.gate("entropy window_mass[-4,0]", gd_coarse.diagnostics.last("window_mass"), g_fine, 0.02);

  const ExactSolution exact{ExactVariant::OddDatum};
  const Field oracle = sample_exact(exact, gd.fields.back().grid, c.t_end);
  r.metric("oracle window_mass[-4,0]", "exact", clipped_window_mass(oracle, -4.0, 0.0));
  r.metric("oracle window_mass closed form", "exact", 1.0 - c.t_end);
  r.metric("godunov vs odd oracle L1", godunov_tag(c.godunov_cells), lp_distance(gd.fields.back(), oracle, 1.0));

  const NonlocalRun lf = lf_run(k, c.epsilon, c.t_end, true, -4.0, 0.0);
  r.metric("lax_friedrichs window_mass[-4,0] at dx=eps", lf_tag(lf.fields.back().size()),
           lf.diagnostics.last("window_mass"));

  r.series.emplace_back("nonlocal", fine.diagnostics);
  r.series.emplace_back("entropy", gd.diagnostics);
  r.series.emplace_back("lax_friedrichs", lf.diagnostics);
  r.fields.emplace_back("nonlocal", fine.fields.back());
  r.fields.emplace_back("entropy", gd.fields.back());
  r.fields.emplace_back("oracle", oracle);
  r.wall_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------- CE2

/// Step datum, one-sided kernel: the nonlocal solution stays in [-1, 0] while the
/// entropy solution pushes half of the mass into (0, inf); the baricenter bound
/// for confined distributional solutions separates the two.
inline ScenarioReport counterexample_2(const Ce2Config& c = {}) {
  validate(c);
  Stopwatch clock;
  ScenarioReport r;
  r.scenario = "ce2";
  r.config = to_json(c);
  const Kernel k(KernelShape::OneSidedLeft, c.epsilon);
  const double a = -1.05, b = 0.05;

  std::vector<double> bar_times;
  for (int k = 6; k <= static_cast<int>(std::floor(10.0 * c.t_baricenter + 1e-9)); ++k) {
    bar_times.push_back(k / 10.0);
  }
  std::vector<double> outputs = arithmetic_times(0.1, c.t_baricenter);
  outputs.push_back(c.t_end);
  for (double t : bar_times) outputs.push_back(t);

  auto nonlocal = [&](int n) {
    return nonlocal_headline(c.solver, k, n, -1.0, 0.0, 0.5, outputs, c.t_baricenter, false, 0.0, kInf);
  };
  const TaggedRun headline = nonlocal(c.particles);
  const NonlocalRun& nl = headline.run;
  const NonlocalRun nl_coarse = nonlocal(c.particles / 2).run;
  const std::string ptag = headline.solver;
  const auto& ntimes = nl.diagnostics.times();
  const std::size_t iT = time_index(ntimes, c.t_end);

  const double right_mass = nl.diagnostics.channel("window_mass")[iT];
  r.check("nonlocal mass on (0,inf)", ptag, right_mass, -kInf, 0.01);
  r.gate("nonlocal mass on (0,inf)", nl_coarse.diagnostics.channel("window_mass")[iT], right_mass, 0.01);
  r.check("nonlocal support_lo", ptag, nl.diagnostics.channel("support_lo")[iT], -1.01, kInf);
  r.check("nonlocal support_hi", ptag, nl.diagnostics.channel("support_hi")[iT], -kInf, 0.01);
  r.metric("nonlocal mass", ptag, nl.diagnostics.channel("mass")[iT]);

  const auto& bar = nl.diagnostics.channel("baricenter");
  const auto& bar_c = nl_coarse.diagnostics.channel("baricenter");
  const double bar_max = *std::max_element(bar.begin(), bar.end());
  r.check("nonlocal max baricenter on [0,t_baricenter]", ptag, bar_max, -kInf, 0.01);
  r.gate("nonlocal max baricenter", *std::max_element(bar_c.begin(), bar_c.end()), bar_max, 0.01);

  std::vector<double> g_out = arithmetic_times(0.01, c.t_baricenter);
  g_out.push_back(c.t_end);
  auto entropy_run = [&](int n) { return godunov_run(n, 2.0, c.t_baricenter, g_out, false, 0.0, kInf); };
  const LocalRun gd = entropy_run(c.godunov_cells);
  const LocalRun gd_c = entropy_run(c.godunov_cells / 2);
  const std::string gtag = godunov_tag(c.godunov_cells);
  const auto& gtimes = gd.diagnostics.times();
  const std::size_t gT = time_index(gtimes, c.t_end);
  const double g_right = gd.diagnostics.channel("window_mass")[gT];
  r.check("entropy mass on (0,inf)", gtag, g_right, 0.48, 0.52);
  r.gate("entropy mass on (0,inf)", gd_c.diagnostics.channel("window_mass")[gT], g_right, 0.02);

  // Mass in [0, 1] integrated over t in [0, 1/2].
  auto integrated = [&](const LocalRun& run) {
    std::vector<double> t, m;
    for (std::size_t i = 0; i < run.fields.size(); ++i) {
      if (run.fields[i].time > 0.5 + 1e-12) break;
      t.push_back(run.fields[i].time);
      m.push_back(clipped_window_mass(run.fields[i], 0.0, 1.0));
    }
    return trapezoid(t, m);
  };
  const double e_int = integrated(gd);
  r.check("entropy mass over [0,1/2]x[0,1]", gtag, e_int, 0.125 * 0.95, 0.125 * 1.05);
  r.gate("entropy mass over [0,1/2]x[0,1]", integrated(gd_c), e_int, 0.125 * 0.05);

  const double m0 = total_mass(gd.fields.front());
  const double x0 = baricenter(gd.fields.front());
  r.metric("initial mass", "exact", m0);
  r.metric("initial baricenter", "exact", x0);
  for (double t : bar_times) {
    const BaricenterBound bound = baricenter_lower_bound(m0, x0, t, a, b);
    const std::string ts = format_double(t);
    const double g_bar = gd.diagnostics.channel("baricenter")[time_index(gtimes, t)];
    const double g_bar_c = gd_c.diagnostics.channel("baricenter")[time_index(gd_c.diagnostics.times(), t)];
    const double n_bar = bar[time_index(ntimes, t)];
    // The entropy solution leaves (a, b) and falls below the (weighted) bound.
    r.check("entropy baricenter - weighted bound at t=" + ts, gtag, g_bar - bound.weighted, -kInf, 0.0);
    r.gate("entropy baricenter at t=" + ts, g_bar_c, g_bar, bound.weighted - g_bar);
    r.metric("entropy baricenter - plain bound at t=" + ts, gtag, g_bar - bound.plain);
    r.metric("weighted bound at t=" + ts, "exact", bound.weighted);
    r.metric("plain bound at t=" + ts, "exact", bound.plain);
    r.metric("entropy baricenter at t=" + ts, gtag, g_bar);
    // The confined nonlocal solution stays below both bounds: it is not a
    // distributional solution of the local problem.
    r.check("nonlocal baricenter - weighted bound at t=" + ts, ptag, n_bar - bound.weighted, -kInf, 0.0);
    r.metric("nonlocal baricenter at t=" + ts, ptag, n_bar);
  }

  // Sampling the one-sided bump at spacing eps only hits its zeros.
  const NonlocalRun lf = lf_run(k, c.epsilon / 2, c.t_end, false, 0.0, kInf);
  r.metric("lax_friedrichs mass on (0,inf) at dx=eps/2", lf_tag(lf.fields.back().size()),
           lf.diagnostics.last("window_mass"));

  r.series.emplace_back("nonlocal", nl.diagnostics);
  r.series.emplace_back("entropy", gd.diagnostics);
  r.series.emplace_back("lax_friedrichs", lf.diagnostics);
  r.fields.emplace_back("nonlocal", nl.fields[iT]);
  r.fields.emplace_back("entropy", gd.fields[gT]);
  r.wall_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------- CE3

/// Step datum, even kernel: the nonlocal flow conserves int u ln u = 0 while the
/// entropy solution dissipates it to -t/2.
inline ScenarioReport counterexample_3(const Ce3Config& c = {}) {
  validate(c);
  Stopwatch clock;
  ScenarioReport r;
  r.scenario = "ce3";
  r.config = to_json(c);
  const Kernel k(KernelShape::EvenBump, c.epsilon);

  auto nonlocal = [&](int n) {
    return nonlocal_headline(c.solver, k, n, -1.0, 0.0, 1.0, {}, c.t_end, false, -kInf, 0.0);
  };
  const TaggedRun headline = nonlocal(c.particles);
  const NonlocalRun& nl = headline.run;
  const NonlocalRun nl_c = nonlocal(c.particles / 2).run;
  const std::string ptag = headline.solver;
  const double ent = nl.diagnostics.last("entropy");
  r.check("nonlocal entropy", ptag, ent, -0.05, 0.05);
  r.gate("nonlocal entropy", nl_c.diagnostics.last("entropy"), ent, 0.05);
  r.metric("nonlocal initial entropy", ptag, nl.diagnostics.channel("entropy").front());
  for (int refine : nl.ensembles.empty() ? std::vector<int>{} : std::vector<int>{10, 20}) {
    const ParticleEnsemble& e = nl.ensembles.back();
    const Grid1D g = Grid1D::with_spacing(nl.fields.back().grid.x_min(), nl.fields.back().grid.x_max(),
                                          c.epsilon / refine);
    r.metric("nonlocal entropy (deposit dx=eps/" + std::to_string(refine) + ")", ptag,
             entropy_functional(deposit(e, g)));
  }

  const LocalRun gd = godunov_run(c.godunov_cells, 2.0, c.t_end, {}, false);
  const LocalRun gd_c = godunov_run(c.godunov_cells / 2, 2.0, c.t_end, {}, false);
  const std::string gtag = godunov_tag(c.godunov_cells);
  const double g_ent = gd.diagnostics.last("entropy");
  r.check("entropy-solution entropy", gtag, g_ent, -c.t_end / 2 - 0.02, -c.t_end / 2 + 0.02);
  r.gate("entropy-solution entropy", gd_c.diagnostics.last("entropy"), g_ent, 0.02);
  const Field oracle = sample_exact(ExactSolution{ExactVariant::StepDatum}, gd.fields.back().grid, c.t_end);
  r.metric("oracle entropy", "exact", entropy_functional(oracle));
  r.metric("oracle entropy closed form", "exact", -c.t_end / 2);

  const NonlocalRun fv = lf_run(k, c.epsilon / c.fv_refinement, c.t_end, false);
  r.metric("lax_friedrichs entropy at dx=eps/" + std::to_string(c.fv_refinement),
           lf_tag(fv.fields.back().size()), fv.diagnostics.last("entropy"));
  const NonlocalRun lf = lf_run(k, c.epsilon, c.t_end, false);
  r.metric("lax_friedrichs entropy at dx=eps", lf_tag(lf.fields.back().size()),
           lf.diagnostics.last("entropy"));

  r.series.emplace_back("nonlocal", nl.diagnostics);
  r.series.emplace_back("entropy", gd.diagnostics);
  r.series.emplace_back("lax_friedrichs_fine", fv.diagnostics);
  r.series.emplace_back("lax_friedrichs", lf.diagnostics);
  r.fields.emplace_back("nonlocal", nl.fields.back());
  r.fields.emplace_back("entropy", gd.fields.back());
  r.wall_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------- rate

struct RateSweep {
  std::vector<double> eps;
  std::vector<double> distance;
  double slope = 0.0;
  std::vector<std::pair<std::string, DiagnosticSeries>> series;
  std::optional<Field> local_final;
};

/// D(eps) = max over output times of ||u_{eps,nu} - u_nu||_p at grid spacing dx.
inline RateSweep rate_sweep(const RateConfig& c, double dx) {
  const Grid1D g = Grid1D::with_spacing(-4.0, 5.0, dx);
  const Field u0 = gaussian_datum(g, c.mass, c.width);
  ViscousRunConfig local{g};
  local.nu = c.nu;
  local.t_end = c.t_end;
  local.output_times = arithmetic_times(c.output_every, c.t_end);
  // One step for every run so the distance measures the kernel, not dt.
  local.fixed_dt = local.cfl * g.dx() / local.law.max_flux_speed(1.25 * max_abs(u0.values));
  const ViscousRun ref = run_viscous(local, u0);
  RateSweep s;
  s.series.emplace_back("local", ref.diagnostics);
  s.local_final = ref.fields.back();
  const KernelShape shape = kernel_shape_from_string(c.kernel);
  for (double eps : c.eps_list) {
    ViscousRunConfig cfg = local;
    cfg.kernel = Kernel(shape, eps);
    const ViscousRun run = run_viscous(cfg, u0);
    double d = 0.0;
    for (std::size_t i = 0; i < run.fields.size(); ++i) {
      d = std::max(d, lp_distance(run.fields[i], ref.fields[i], c.p));
    }
    s.eps.push_back(eps);
    s.distance.push_back(d);
    s.series.emplace_back("nonlocal_eps=" + format_double(eps), run.diagnostics);
  }
  std::vector<double> le, ld;
  for (std::size_t i = 0; i < s.eps.size(); ++i) {
    le.push_back(std::log(s.eps[i]));
    ld.push_back(std::log(s.distance[i]));
  }
  s.slope = least_squares_slope(le, ld);
  return s;
}

/// Order in epsilon of the distance between viscous nonlocal and viscous local
/// solutions at fixed nu.
inline ScenarioReport epsilon_rate(const RateConfig& c = {}) {
  validate(c);
  Stopwatch clock;
  ScenarioReport r;
  r.scenario = "rate";
  r.config = to_json(c);
  const double eps_min = *std::min_element(c.eps_list.begin(), c.eps_list.end());
  const double dx = eps_min / c.dx_refinement;
  const RateSweep fine = rate_sweep(c, dx);
  const RateSweep coarse = rate_sweep(c, 2.0 * dx);
  const std::string tag = "imex(dx=" + format_double(dx) + ")";
  for (std::size_t i = 0; i < fine.eps.size(); ++i) {
    r.metric("D(eps=" + format_double(fine.eps[i]) + ")", tag, fine.distance[i]);
    if (i > 0) {
      r.metric("D ratio eps=" + format_double(fine.eps[i]) + " / eps=" + format_double(fine.eps[i - 1]),
               tag, fine.distance[i] / fine.distance[i - 1]);
    }
  }
  r.check("fitted order in eps", tag, fine.slope, 0.9, kInf);
  r.gate("fitted order in eps", coarse.slope, fine.slope, fine.slope - 0.9);
  const double d = 1.0;
  r.metric("beta = (p+d)/(p-d)", "exact", (c.p + d) / (c.p - d));
  r.series = fine.series;
  r.fields.emplace_back("local", *fine.local_final);
  r.wall_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------- vanishing viscosity

struct ViscSweep {
  std::vector<double> distance;
  std::vector<double> window_gap;
  Field reference;
  std::vector<std::pair<std::string, DiagnosticSeries>> series;
};

inline ViscSweep visc_sweep(const ViscConfig& c, double dx) {
  const Grid1D g = Grid1D::with_spacing(-4.0, 5.0, dx);
  const Field u0 = gaussian_datum(g, c.mass, c.width);
  const Kernel k(KernelShape::EvenBump, c.epsilon);
  NonlocalRunConfig pc{g, k};
  pc.scheme = NonlocalScheme::Particles;
  pc.t_end = c.t_end;
  const NonlocalRun ref = run_nonlocal(pc, u0);
  ViscSweep s{{}, {}, reconstruct_density(ref.ensembles.back(), g), {}};
  s.series.emplace_back("inviscid", ref.diagnostics);
  const double ref_window = clipped_window_mass(s.reference, -kInf, 0.0);
  for (double nu : c.nu_list) {
    ViscousRunConfig vc{g, k};
    vc.nu = nu;
    vc.t_end = c.t_end;
    const ViscousRun run = run_viscous(vc, u0);
    s.distance.push_back(lp_distance(run.fields.back(), s.reference, 1.0));
    s.window_gap.push_back(std::abs(clipped_window_mass(run.fields.back(), -kInf, 0.0) - ref_window));
    s.series.emplace_back("viscous_nu=" + format_double(nu), run.diagnostics);
  }
  return s;
}

// Each step down by >= 10 %, or flat within a 5 % noise band.
inline bool decreasing_with_noise(const std::vector<double>& d) {
  for (std::size_t i = 1; i < d.size(); ++i) {
    const bool down = d[i] <= 0.9 * d[i - 1];
    const bool flat = std::abs(d[i] - d[i - 1]) <= 0.05 * d[i - 1];
    if (!(down || flat)) return false;
  }
  return true;
}

/// Viscous nonlocal solutions approach the inviscid nonlocal solution as nu -> 0
/// (strong L1 surrogate), plus two corners of the limit diagram.
inline ScenarioReport vanishing_viscosity(const ViscConfig& c = {}) {
  validate(c);
  Stopwatch clock;
  ScenarioReport r;
  r.scenario = "visc";
  r.config = to_json(c);
  const ViscSweep fine = visc_sweep(c, c.dx);
  const ViscSweep coarse = visc_sweep(c, 2.0 * c.dx);
  const std::string tag = "imex vs particles(dx=" + format_double(c.dx) + ")";
  for (std::size_t i = 0; i < c.nu_list.size(); ++i) {
    const std::string nu = format_double(c.nu_list[i]);
    r.metric("L1 distance nu=" + nu, tag, fine.distance[i]);
    r.metric("window_mass(-inf,0] gap nu=" + nu, tag, fine.window_gap[i]);
  }
  r.check("L1 distance decreasing across nu_list", tag, decreasing_with_noise(fine.distance) ? 1.0 : 0.0,
          1.0, 1.0);
  const double ratio = fine.distance.back() / fine.distance.front();
  r.check("final / first L1 distance", tag, ratio, 0.0, 0.3);
  r.gate("final / first L1 distance", coarse.distance.back() / coarse.distance.front(), ratio,
         0.3 - ratio);

  // Local viscous corner: u_nu -> entropy solution.
  {
    const Grid1D g = Grid1D::with_spacing(-3.0, 3.0, c.dx);
    const Field u0 = step_datum(g);
    const Field exact = sample_exact(ExactSolution{ExactVariant::StepDatum}, g, c.t_end);
    std::vector<double> d;
    for (double nu : c.local_nu_list) {
      ViscousRunConfig vc{g};
      vc.nu = nu;
      vc.t_end = c.t_end;
      d.push_back(lp_distance(run_viscous(vc, u0).fields.back(), exact, 1.0));
      r.metric("local viscous vs exact L1 nu=" + format_double(nu), "imex(local)", d.back());
    }
    bool monotone = true;
    for (std::size_t i = 1; i < d.size(); ++i) monotone = monotone && d[i] < d[i - 1];
    r.check("local viscous distance to entropy solution decreasing", "imex(local)",
            monotone ? 1.0 : 0.0, 1.0, 1.0);
  }

  // Inviscid corner: the one-sided nonlocal solution stays away from the entropy solution.
  {
    const Kernel k(KernelShape::OneSidedLeft, c.epsilon);
    const NonlocalRun nl = particle_run(k, static_cast<int>(std::lround(1.0 / c.dx)), -1.0, 0.0, 1.0,
                                       {}, c.t_end, false, -kInf, 0.0);
    const int cells = static_cast<int>(std::lround(4.0 / c.dx));
    const LocalRun gd = godunov_run(cells, 2.0, c.t_end, {}, false);
    const Field rho = reconstruct_density(nl.ensembles.back(), gd.fields.back().grid);
    r.check("one-sided nonlocal vs entropy solution L1", "particles vs " + godunov_tag(cells),
            lp_distance(rho, gd.fields.back(), 1.0), 0.1, kInf);
  }

  r.series = fine.series;
  r.fields.emplace_back("inviscid_reference", fine.reference);
  r.wall_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------- Godunov convergence

struct ConvergenceStudy {
  std::vector<int> cells;
  std::vector<double> self_difference;  // ||u_N - R(u_2N)||_1, one fewer than cells
  std::vector<double> exact_error;      // ||u_N - exact||_1
  std::vector<double> orders;
  double fitted_order = 0.0;
};

/// L1 self-convergence of Godunov on the step datum.
inline ConvergenceStudy godunov_self_convergence(const ConvergenceConfig& c) {
  validate(c);
  ConvergenceStudy s;
  s.cells = c.cells;
  std::vector<Field> finals;
  const ExactSolution exact{ExactVariant::StepDatum};
  for (int n : c.cells) {
    finals.push_back(godunov_run(n, 2.0, c.t_end, {}, false).fields.back());
    s.exact_error.push_back(lp_distance(finals.back(), sample_exact(exact, finals.back().grid, c.t_end), 1.0));
  }
  std::vector<double> lh, ld;
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    s.self_difference.push_back(lp_distance(finals[k], restrict_by_two(finals[k + 1]), 1.0));
    lh.push_back(std::log(finals[k].grid.dx()));
    ld.push_back(std::log(s.self_difference.back()));
  }
  for (std::size_t k = 0; k + 1 < s.self_difference.size(); ++k) {
    s.orders.push_back(std::log2(s.self_difference[k] / s.self_difference[k + 1]));
  }
  s.fitted_order = lh.size() >= 2 ? least_squares_slope(lh, ld) : 0.0;
  return s;
}

inline ScenarioReport godunov_convergence(const ConvergenceConfig& c = {}) {
  Stopwatch clock;
  ScenarioReport r;
  r.scenario = "convergence";
  r.config = to_json(c);
  const ConvergenceStudy s = godunov_self_convergence(c);
  for (std::size_t k = 0; k < s.self_difference.size(); ++k) {
    r.metric("self difference N=" + std::to_string(s.cells[k]), godunov_tag(s.cells[k]), s.self_difference[k]);
  }
  for (std::size_t k = 0; k < s.exact_error.size(); ++k) {
    r.metric("error vs exact N=" + std::to_string(s.cells[k]), godunov_tag(s.cells[k]), s.exact_error[k]);
  }
  for (std::size_t k = 0; k < s.orders.size(); ++k) {
    r.metric("order N=" + std::to_string(s.cells[k + 1]), "godunov", s.orders[k]);
  }
  r.check("fitted L1 self-convergence order", "godunov", s.fitted_order, 0.7, kInf);
  for (std::size_t k = 0; k + 1 < s.self_difference.size(); ++k) {
    r.gates.push_back(richardson_gate("self difference N=" + std::to_string(s.cells[k + 1]),
                                      s.self_difference[k], s.self_difference[k + 1]));
  }

  // Odd-datum oracle cross-check on [-4, 4]: the error must shrink at first
  // order (up to the logarithm from the rarefaction corners).
  std::vector<double> err;
  double dx = 0.0;
  for (int n : {s.cells.back() / 2, s.cells.back()}) {
    const LocalRun odd = godunov_run(n, 4.0, 0.25, {}, true);
    const Field oracle = sample_exact(ExactSolution{ExactVariant::OddDatum}, odd.fields.back().grid, 0.25);
    err.push_back(lp_distance(odd.fields.back(), oracle, 1.0));
    dx = odd.fields.back().grid.dx();
  }
  const std::string tag = godunov_tag(s.cells.back());
  r.metric("odd oracle vs godunov L1", tag, err.back());
  r.check("odd oracle vs godunov L1 / dx", tag, err.back() / dx, 0.0, 4.0);
  r.check("odd oracle error order", tag, std::log2(err.front() / err.back()), 0.7, kInf);
  r.wall_seconds = clock.seconds();
  return r;
}

}  // namespace nllab
