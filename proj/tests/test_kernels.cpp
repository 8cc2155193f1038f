#include <gtest/gtest.h>

#include <cmath>

#include "nllab/kernels.hpp"
#include "nllab/particles.hpp"

using namespace nllab;

TEST(Kernel, EvenBumpUnitMassSupportAndSymmetry) {
  const Kernel k(KernelShape::EvenBump, 0.05);
  EXPECT_EQ(k.support_lo(), -0.05);
  EXPECT_EQ(k.support_hi(), 0.05);
  EXPECT_EQ(k(0.05), 0.0);
  EXPECT_EQ(k(-0.06), 0.0);
  EXPECT_GT(k(0.0), 0.0);
  for (double x : {0.001, 0.01, 0.03, 0.049}) EXPECT_EQ(k(x), k(-x));
  // Unnormalized profile integral of exp(-1/(1-s^2)) over (-1, 1).
  EXPECT_NEAR(k.normalization_constant(), 0.443993816168, 1e-10);
  EXPECT_NEAR(k(0.0), std::exp(-1.0) / (k.normalization_constant() * 0.05), 1e-12);
}

TEST(Kernel, OneSidedLeftVanishesOnTheRight) {
  const Kernel k(KernelShape::OneSidedLeft, 0.1);
  EXPECT_EQ(k.support_lo(), -0.1);
  EXPECT_EQ(k.support_hi(), 0.0);
  EXPECT_EQ(k(0.0), 0.0);
  EXPECT_EQ(k(0.02), 0.0);
  EXPECT_GT(k(-0.05), 0.0);
  EXPECT_FALSE(k.is_even());
}

TEST(Kernel, RejectsBadEpsilon) {
  EXPECT_THROW(Kernel(KernelShape::EvenBump, 0.0), LabError);
  EXPECT_THROW(Kernel(KernelShape::EvenBump, -1.0), LabError);
  EXPECT_THROW(Kernel(KernelShape::EvenBump, std::nan("")), LabError);
  EXPECT_THROW(kernel_shape_from_string("gaussian"), LabError);
  EXPECT_EQ(kernel_shape_from_string("one_sided_left"), KernelShape::OneSidedLeft);
}

TEST(Kernel, MaxDerivativeScalesAsEpsToMinusTwo) {
  const Kernel a(KernelShape::EvenBump, 0.1);
  const Kernel b(KernelShape::EvenBump, 0.05);
  EXPECT_NEAR(b.max_derivative() / a.max_derivative(), 4.0, 1e-9);
}

TEST(Convolver, WeightsSumToOneAndConstantIsPreservedInside) {
  const Kernel k(KernelShape::EvenBump, 0.05);
  const Convolver c(k, 0.005);
  double s = 0.0;
  for (double w : c.weights()) s += w;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(c.raw_mass(), 1.0, 1e-3);
  EXPECT_EQ(c.first_offset(), -c.last_offset());
  const Grid1D g(0.0, 1.0, 200);
  Field f(g);
  for (double& v : f.values) v = 2.5;
  const Field out = c.apply(f);
  EXPECT_NEAR(out[100], 2.5, 1e-13);
  EXPECT_LT(out[0], 2.5);
}

TEST(Convolver, OneSidedReadsOnlyTheRight) {
  const Kernel k(KernelShape::OneSidedLeft, 0.1);
  const Convolver c(k, 0.01);
  EXPECT_GE(c.first_offset(), -10);
  EXPECT_LE(c.last_offset(), 0);
  const Grid1D g(0.0, 1.0, 100);
  Field f(g);
  f[50] = 1.0;
  const Field out = c.apply(f);
  for (int i = 51; i < 100; ++i) EXPECT_EQ(out[i], 0.0);
  EXPECT_GT(out[45], 0.0);
}

TEST(Convolver, UnderResolvedKernelIsRejected) {
  const Kernel k(KernelShape::EvenBump, 0.01);
  EXPECT_THROW(Convolver(k, 0.02), LabError);
  EXPECT_THROW(Convolver(k, 0.0), LabError);
}

TEST(Convolver, ParticleConvolutionMatchesGridForFineEnsembles) {
  const Kernel k(KernelShape::EvenBump, 0.1);
  const Grid1D g(-1.0, 1.0, 2000);
  const Field f = sample_field(g, [](double x) { return std::abs(x) < 0.5 ? 1.0 - x * x : 0.0; });
  const ParticleEnsemble e = particles_from_field(f);
  const Field grid_conv = convolve(f, k);
  for (int i : {500, 1000, 1400}) {
    EXPECT_NEAR(convolve_particles(e, k, g.center(i)), grid_conv[i], 1e-4);
  }
}
