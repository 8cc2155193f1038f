#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nllab/experiments.hpp"
#include "nllab/viscous_solver.hpp"

using namespace nllab;

TEST(ImplicitDiffusion, SolvesTheTridiagonalSystem) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> in(50), out(50);
  for (double& v : in) v = U(rng);
  const double r = 3.7;
  implicit_diffusion(in, r, out);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double left = i > 0 ? out[i - 1] : 0.0;
    const double right = i + 1 < in.size() ? out[i + 1] : 0.0;
    EXPECT_NEAR((1 + 2 * r) * out[i] - r * (left + right), in[i], 1e-12);
  }
}

TEST(ImplicitDiffusion, ZeroNumberCopiesAndNegativeRejected) {
  std::vector<double> in{1.0, 2.0, 3.0}, out(3);
  implicit_diffusion(in, 0.0, out);
  EXPECT_EQ(out, in);
  EXPECT_THROW(implicit_diffusion(in, -1.0, out), LabError);
  std::vector<double> small(2);
  EXPECT_THROW(implicit_diffusion(in, 1.0, small), LabError);
}

TEST(ViscousRun, NonlocalRunConservesMassAndContractsL1) {
  const Grid1D g(-4.0, 5.0, 1800);
  ViscousRunConfig cfg(g, Kernel(KernelShape::EvenBump, 0.1));
  cfg.nu = 0.05;
  cfg.t_end = 0.3;
  const ViscousRun run = run_viscous(cfg, gaussian_datum(g, 0.5, 0.3));
  for (double m : run.diagnostics.channel("mass")) EXPECT_NEAR(m, 0.5, 1e-10);
  EXPECT_TRUE(run.l1_monotone);
  EXPECT_LE(run.diagnostics.last("linf"), run.diagnostics.channel("linf").front() + 1e-12);
}

TEST(ViscousRun, PureDiffusionSpreadsSymmetrically) {
  const Grid1D g(-3.0, 3.0, 600);
  ViscousRunConfig cfg(g);
  cfg.law = VelocityLaw::zero();
  cfg.nu = 0.1;
  cfg.t_end = 0.2;
  const ViscousRun run = run_viscous(cfg, gaussian_datum(g, 1.0, 0.2));
  const Field& u = run.fields.back();
  for (int i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], u[u.size() - 1 - i], 1e-12);
  EXPECT_NEAR(baricenter(u), 0.0, 1e-12);
}

TEST(ViscousRun, ErrorCases) {
  const Grid1D g(-1.0, 1.0, 200);
  ViscousRunConfig cfg(g);
  cfg.nu = 0.0;
  EXPECT_THROW(run_viscous(cfg, gaussian_datum(g, 0.5, 0.3)), LabError);
  cfg.nu = 1.0;
  cfg.t_end = 1.0;
  EXPECT_THROW(run_viscous(cfg, gaussian_datum(g, 0.5, 0.3)), LabError);
  cfg.fixed_dt = -1.0;
  EXPECT_THROW(run_viscous(cfg, gaussian_datum(g, 0.5, 0.3)), LabError);
}
