// lab: command-line driver for the nonlocal conservation law experiments.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nllab/config.hpp"
#include "nllab/experiments.hpp"
#include "nllab/local_entropy.hpp"
#include "nllab/properties.hpp"
#include "nllab/report_io.hpp"

namespace {

using namespace nllab;

LabConfig load_config(const std::string& path) {
  if (path.empty()) return LabConfig{};
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void print_report(const ScenarioReport& r) {
  for (const auto& c : r.checks) {
    std::printf("%-5s %-60s %-28s value=%s range=[%s, %s]\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                c.solver.c_str(), format_double(c.value).c_str(), format_double(c.lo).c_str(),
                format_double(c.hi).c_str());
  }
  for (const auto& g : r.gates) {
    std::printf("gate  %-60s coarse=%s fine=%s %s\n", g.diagnostic.c_str(), format_double(g.coarse).c_str(),
                format_double(g.fine).c_str(), g.converged ? "CONVERGED" : "NOT CONVERGED");
  }
  for (const auto& m : r.metrics) {
    std::printf("      %-60s %-28s %s\n", m.name.c_str(), m.solver.c_str(), format_double(m.value).c_str());
  }
}

int finish(const ScenarioReport& r, const LabConfig& cfg) {
  print_report(r);
  const EmittedPaths p = emit_report(r, cfg.output_dir);
  const Verdict v = r.verdict();
  std::printf("%s %s (%.1f s) -> %s\n", r.scenario.c_str(), to_string(v).c_str(), r.wall_seconds,
              p.directory.string().c_str());
  return exit_code(v);
}

ScenarioReport run_scenario(const std::string& name, const LabConfig& cfg) {
  if (name == "ce1") return counterexample_1(cfg.ce1);
  if (name == "ce2") return counterexample_2(cfg.ce2);
  if (name == "ce3") return counterexample_3(cfg.ce3);
  if (name == "rate") return epsilon_rate(cfg.rate);
  if (name == "visc") return vanishing_viscosity(cfg.visc);
  if (name == "godunov") return godunov_convergence(cfg.convergence);
  throw CLI::ValidationError("--scenario", "unknown scenario '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal conservation law experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output root directory (overrides [lab] output_dir)");

  struct CeOpts {
    std::optional<double> eps;
    std::optional<int> n;
    std::optional<std::string> solver;
  } ce_opts[3];
  const char* ce_help[3] = {"window mass loss: entropy solution leaks, nonlocal keeps mass",
                            "odd datum: nonlocal solution stays in (0, inf), baricenter bound",
                            "entropy comparison between nonlocal and entropy solutions"};
  CLI::App* ce[3];
  for (int i = 0; i < 3; ++i) {
    ce[i] = app.add_subcommand("ce" + std::to_string(i + 1), ce_help[i]);
    ce[i]->add_option("--eps", ce_opts[i].eps, "kernel half-width epsilon");
    ce[i]->add_option("--n", ce_opts[i].n, "particles (or LF cells over the support)");
    ce[i]->add_option("--solver", ce_opts[i].solver, "particles | lax_friedrichs");
  }

  auto* rate = app.add_subcommand("rate", "convergence rate in epsilon of the viscous nonlocal problem");
  std::optional<double> rate_nu, rate_p;
  std::vector<double> rate_eps;
  rate->add_option("--nu", rate_nu, "viscosity");
  rate->add_option("--p", rate_p, "L^p exponent");
  rate->add_option("--eps-list", rate_eps, "epsilon values")->delimiter(',');

  auto* visc = app.add_subcommand("visc", "vanishing viscosity limit at fixed epsilon");
  std::optional<double> visc_eps;
  std::vector<double> visc_nu;
  visc->add_option("--eps", visc_eps, "kernel half-width epsilon");
  visc->add_option("--nu-list", visc_nu, "viscosities")->delimiter(',');

  auto* oracle = app.add_subcommand("oracle", "sample an exact Burgers entropy solution as CSV");
  std::string variant = "step";
  double t = 0.0, lo = -2.0, hi = 2.0;
  int n = 400;
  oracle->add_option("--variant", variant, "step | odd")->check(CLI::IsMember({"step", "odd"}));
  oracle->add_option("--t", t, "time")->required();
  oracle->add_option("--n", n, "cells")->check(CLI::PositiveNumber);
  oracle->add_option("--lo", lo, "left edge");
  oracle->add_option("--hi", hi, "right edge");

  auto* conv = app.add_subcommand("convergence", "grid-convergence gates of a scenario");
  std::string conv_scenario = "godunov";
  conv->add_option("--scenario", conv_scenario, "godunov | ce1 | ce2 | ce3 | rate | visc")
      ->check(CLI::IsMember({"godunov", "ce1", "ce2", "ce3", "rate", "visc"}));

  auto* selftest = app.add_subcommand("selftest", "structural property suite and heat-kernel exponents");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    LabConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    auto apply = [](auto& c, const CeOpts& o) {
      if (o.eps) c.epsilon = *o.eps;
      if (o.n) c.particles = *o.n;
      if (o.solver) c.solver = *o.solver;
      validate(c);
    };
    if (ce[0]->parsed()) return apply(cfg.ce1, ce_opts[0]), finish(counterexample_1(cfg.ce1), cfg);
    if (ce[1]->parsed()) return apply(cfg.ce2, ce_opts[1]), finish(counterexample_2(cfg.ce2), cfg);
    if (ce[2]->parsed()) return apply(cfg.ce3, ce_opts[2]), finish(counterexample_3(cfg.ce3), cfg);

    if (rate->parsed()) {
      if (rate_nu) cfg.rate.nu = *rate_nu;
      if (rate_p) cfg.rate.p = *rate_p;
      if (!rate_eps.empty()) cfg.rate.eps_list = rate_eps;
      validate(cfg.rate);
      return finish(epsilon_rate(cfg.rate), cfg);
    }
    if (visc->parsed()) {
      if (visc_eps) cfg.visc.epsilon = *visc_eps;
      if (!visc_nu.empty()) cfg.visc.nu_list = visc_nu;
      validate(cfg.visc);
      return finish(vanishing_viscosity(cfg.visc), cfg);
    }
    if (oracle->parsed()) {
      if (!(hi > lo)) throw LabError("--hi must exceed --lo");
      const Field f = sample_exact(ExactSolution{exact_variant_from_string(variant)}, Grid1D(lo, hi, n), t);
      write_csv(std::cout, f);
      return 0;
    }
    if (conv->parsed()) {
      const ScenarioReport r = run_scenario(conv_scenario, cfg);
      for (const auto& g : r.gates) {
        std::printf("%-60s coarse=%s fine=%s margin=%s %s\n", g.diagnostic.c_str(),
                    format_double(g.coarse).c_str(), format_double(g.fine).c_str(),
                    format_double(g.margin).c_str(), g.converged ? "CONVERGED" : "NOT CONVERGED");
      }
      emit_report(r, cfg.output_dir);
      std::printf("%s gates: %s\n", r.scenario.c_str(), r.converged() ? "CONVERGED" : "NOT CONVERGED");
      return r.converged() ? 0 : 3;
    }
    if (selftest->parsed()) {
      auto results = run_property_suite(cfg.seed);
      results.push_back(heat_kernel_exponent(2.0));
      results.push_back(heat_kernel_exponent(4.0 / 3.0));
      bool ok = true;
      for (const auto& p : results) {
        ok = ok && p.passed;
        std::printf("%-5s %-60s worst=%s tol=%s cases=%d\n", p.passed ? "ok" : "FAIL", p.name.c_str(),
                    format_double(p.worst).c_str(), format_double(p.tolerance).c_str(), p.cases);
      }
      std::printf("selftest %s\n", ok ? "PASS" : "FAIL");
      return ok ? 0 : 2;
    }
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const LabError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
