// Runs the eight acceptance criteria and prints one PASS/FAIL line each.
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nllab/experiments.hpp"
#include "nllab/properties.hpp"

using namespace nllab;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string failed_checks(const ScenarioReport& r, const std::function<bool(const Check&)>& filter) {
  std::string s;
  for (const auto& c : r.checks) {
    if (filter(c) && !c.passed) s += " [" + c.name + " = " + format_double(c.value) + "]";
  }
  for (const auto& g : r.gates) {
    if (!g.converged) s += " [gate " + g.diagnostic + " not converged]";
  }
  return s;
}

Outcome scenario_outcome(const ScenarioReport& r, double budget) {
  const bool ok = r.verdict() == Verdict::Pass && r.wall_seconds < budget;
  std::string d = to_string(r.verdict()) + ", " + format_double(static_cast<double>(r.checks.size())) +
                  " checks, budget " + format_double(budget) + " s";
  d += failed_checks(r, [](const Check&) { return true; });
  return {ok, d};
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& title, double seconds, const Outcome& o) {
    std::printf("%s  criterion %d  %-38s %7.2f s  %s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), seconds,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  };

  const ScenarioReport ce1 = counterexample_1();
  report(1, "CE1 half-line mass", ce1.wall_seconds, scenario_outcome(ce1, 60.0));

  const ScenarioReport ce2 = counterexample_2();
  report(2, "CE2 confinement and leak", ce2.wall_seconds, scenario_outcome(ce2, 60.0));

  const ScenarioReport ce3 = counterexample_3();
  report(3, "CE3 entropy", ce3.wall_seconds, scenario_outcome(ce3, 120.0));

  const ScenarioReport rate = epsilon_rate();
  report(4, "rate in epsilon", rate.wall_seconds, scenario_outcome(rate, 600.0));

  const ScenarioReport visc = vanishing_viscosity();
  report(5, "vanishing viscosity", visc.wall_seconds, scenario_outcome(visc, 600.0));

  {
    Stopwatch clock;
    const PropertyResult q2 = heat_kernel_exponent(2.0);
    const PropertyResult q43 = heat_kernel_exponent(4.0 / 3.0);
    report(6, "heat-kernel gradient exponents", clock.seconds(),
           {q2.passed && q43.passed, "rel. dev q=2: " + format_double(q2.worst) +
                                         ", q=4/3: " + format_double(q43.worst) + " (tol 0.02)"});
  }

  {
    Stopwatch clock;
    const auto suite = run_property_suite(20240611);
    bool ok = true;
    std::string detail = format_double(static_cast<double>(suite.size())) + " properties";
    for (const auto& p : suite) {
      if (!p.passed) {
        ok = false;
        detail += " [" + p.name + ": " + format_double(p.worst) + "]";
      }
    }
    report(7, "structural property suite", clock.seconds(), {ok, detail});
  }

  {
    int n = 0;
    bool ok = true;
    for (const auto& c : ce2.checks) {
      if (starts_with(c.name, "entropy baricenter - weighted bound") ||
          c.name == "nonlocal max baricenter on [0,t_baricenter]") {
        ++n;
        ok = ok && c.passed;
      }
    }
    for (const auto& g : ce2.gates) {
      if (starts_with(g.diagnostic, "entropy baricenter")) ok = ok && g.converged;
    }
    ok = ok && n >= 2;
    std::string detail = format_double(static_cast<double>(n)) + " baricenter checks in the CE2 report";
    detail += failed_checks(ce2, [](const Check& c) { return c.name.find("baricenter") != std::string::npos; });
    report(8, "baricenter contradiction", 0.0, {ok, detail});
  }

  std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
