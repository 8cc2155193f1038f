#include <gtest/gtest.h>

#include <cmath>

#include "nllab/experiments.hpp"
#include "nllab/nonlocal_solvers.hpp"

using namespace nllab;

namespace {

NonlocalRunConfig lf_config(double eps, int cells, double t_end) {
  NonlocalRunConfig cfg(Grid1D(-2.0, 2.0, cells), Kernel(KernelShape::EvenBump, eps));
  cfg.t_end = t_end;
  return cfg;
}

}  // namespace

TEST(LaxFriedrichs, ConservesMassToRoundoff) {
  const auto cfg = lf_config(0.1, 400, 0.25);
  const NonlocalRun run = run_nonlocal(cfg, step_datum(cfg.grid));
  const auto& mass = run.diagnostics.channel("mass");
  for (double m : mass) EXPECT_NEAR(m, 1.0, 1e-12);
  EXPECT_GT(run.steps, 0);
  EXPECT_EQ(run.fields.back().time, 0.25);
}

TEST(LaxFriedrichs, OddDatumStaysExactlyOdd) {
  const auto cfg = lf_config(0.1, 400, 0.2);
  const NonlocalRun run = run_nonlocal(cfg, odd_datum(cfg.grid));
  const Field& u = run.fields.back();
  for (int i = 0; i < u.size(); ++i) EXPECT_EQ(u[i], -u[u.size() - 1 - i]);
}

TEST(LaxFriedrichs, CflViolationIsReported) {
  const Grid1D g(-2.0, 2.0, 400);
  const Kernel k(KernelShape::EvenBump, 0.1);
  const Field u = step_datum(g);
  try {
    lf_step(u, k, VelocityLaw::identity(), 1.0);
    FAIL() << "expected a CFL violation";
  } catch (const LabError& e) {
    EXPECT_NE(std::string(e.what()).find("CFL violation"), std::string::npos);
  }
  EXPECT_NO_THROW(lf_step(u, k, VelocityLaw::identity(), 0.001));
}

TEST(LaxFriedrichs, DomainTooSmallIsReported) {
  NonlocalRunConfig cfg(Grid1D(-1.2, 0.3, 150), Kernel(KernelShape::EvenBump, 0.1));
  cfg.t_end = 1.0;
  EXPECT_THROW(run_nonlocal(cfg, step_datum(cfg.grid)), LabError);
}

TEST(LaxFriedrichs, ConfigValidation) {
  auto cfg = lf_config(0.1, 400, 0.25);
  cfg.cfl = 1.5;
  EXPECT_THROW(run_nonlocal(cfg, step_datum(cfg.grid)), LabError);
  cfg = lf_config(0.1, 400, 0.25);
  EXPECT_THROW(run_nonlocal(cfg, step_datum(Grid1D(-2.0, 2.0, 200))), LabError);
  cfg.window_lo = 1.0;
  cfg.window_hi = 0.0;
  EXPECT_THROW(run_nonlocal(cfg, step_datum(cfg.grid)), LabError);
}

TEST(Particles, MassesAreBitExact) {
  auto cfg = lf_config(0.05, 1000, 0.25);
  cfg.scheme = NonlocalScheme::Particles;
  const NonlocalRun run = run_nonlocal(cfg, step_datum(cfg.grid));
  const auto& mass = run.diagnostics.channel("mass");
  for (double m : mass) EXPECT_EQ(m, mass.front());
  EXPECT_EQ(run.ensembles.front().masses, run.ensembles.back().masses);
  // Without the opposing mass on the right the step datum does cross 0.
  EXPECT_LT(run.diagnostics.last("window_mass"), 0.9);
}

TEST(Particles, OddEnsembleKeepsSignPartition) {
  auto cfg = lf_config(0.05, 400, 0.2);
  cfg.scheme = NonlocalScheme::Particles;
  cfg.signed_masses = true;
  const NonlocalRun run = run_nonlocal(cfg, odd_datum(cfg.grid));
  EXPECT_NO_THROW(check_sign_partition(run.ensembles.back()));
  EXPECT_NEAR(run.diagnostics.last("mass"), 0.0, 1e-12);
}

TEST(Particles, NegativeMassRejectedInNonnegativeRun) {
  auto cfg = lf_config(0.05, 400, 0.2);
  cfg.scheme = NonlocalScheme::Particles;
  EXPECT_THROW(run_nonlocal(cfg, odd_datum(cfg.grid)), LabError);
}

TEST(Particles, ContractionSafeguard) {
  const Grid1D g(-2.0, 2.0, 400);
  const Kernel k(KernelShape::EvenBump, 0.05);
  const ParticleEnsemble e = particles_from_field(step_datum(g));
  const double limit = particle_dt_limit(e, k, VelocityLaw::identity());
  EXPECT_THROW(particle_step(e, k, VelocityLaw::identity(), 2.0 * limit), LabError);
  EXPECT_THROW(particle_step(e, k, VelocityLaw::identity(), 0.0), LabError);
  EXPECT_NO_THROW(particle_step(e, k, VelocityLaw::identity(), 0.5 * limit));
  EXPECT_TRUE(std::isinf(particle_dt_limit(e, k, VelocityLaw::zero())));
}

TEST(Particles, LagrangianEntropyOfUniformEnsemble) {
  ParticleEnsemble e;
  for (int j = 0; j < 10; ++j) {
    e.positions.push_back(0.1 * j);
    e.masses.push_back(0.2);
  }
  // Density 2 on a unit length: entropy 2 ln 2.
  EXPECT_NEAR(lagrangian_entropy(e), 2.0 * std::log(2.0), 1e-12);
  e.masses[3] = -0.1;
  EXPECT_TRUE(std::isnan(lagrangian_entropy(e)));
}

TEST(Particles, CounterexampleOneSmallInstanceKeepsMassLeftOfZero) {
  auto cfg = lf_config(0.05, 1000, 0.25);
  cfg.scheme = NonlocalScheme::Particles;
  cfg.signed_masses = true;
  cfg.window_lo = -4.0;
  cfg.grid = Grid1D(-4.0, 4.0, 1000);
  const NonlocalRun run = run_nonlocal(cfg, odd_datum(cfg.grid));
  EXPECT_NEAR(run.diagnostics.last("window_mass"), 1.0, 1e-12);
  const ParticleEnsemble& e = run.ensembles.back();
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e.masses[j] > 0.0) {
      EXPECT_LT(e.positions[j], 0.0);
    }
  }
}
