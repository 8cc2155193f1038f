#include <gtest/gtest.h>

#include <cmath>

#include "nllab/velocity_laws.hpp"

using namespace nllab;

TEST(VelocityLaw, IdentityHasUnitLipschitz) {
  const VelocityLaw b = VelocityLaw::identity();
  EXPECT_EQ(b(0.7), 0.7);
  EXPECT_EQ(b.lipschitz(), 1.0);
  EXPECT_EQ(flux(b, 3.0), 9.0);
  EXPECT_EQ(b.variant(), VelocityVariant::Identity);
  EXPECT_GE(b.max_flux_speed(1.0), 2.0);
}

TEST(VelocityLaw, NormalizeRemovesShift) {
  const NormalizedLaw n = normalize(RawVelocity{"shifted", [](double u) { return u + 0.5; }});
  EXPECT_EQ(n.shift, 0.5);
  EXPECT_EQ(n.law(0.0), 0.0);
  EXPECT_EQ(n.law.variant(), VelocityVariant::Identity);
  EXPECT_EQ(n.law(1.25), 1.25);
}

TEST(VelocityLaw, NormalizeGeneralLawSamplesLipschitz) {
  const NormalizedLaw n = normalize(RawVelocity{"sin", [](double u) { return 1.0 + std::sin(2.0 * u); }});
  EXPECT_EQ(n.shift, 1.0);
  EXPECT_NEAR(n.law(0.0), 0.0, 1e-15);
  EXPECT_NEAR(n.law.lipschitz(), 2.0, 1e-3);
  EXPECT_EQ(n.law.variant(), VelocityVariant::AffineShifted);
}

TEST(VelocityLaw, NormalizeRejectsBadInput) {
  EXPECT_THROW(normalize(RawVelocity{"empty", {}}), LabError);
  EXPECT_THROW(normalize(RawVelocity{"log", [](double u) { return std::log(u); }}), LabError);
}

TEST(VelocityLaw, TabulatedInterpolatesAndIsShifted) {
  const VelocityLaw b = VelocityLaw::tabulated({-1.0, 0.0, 2.0}, {0.0, 1.0, 5.0});
  EXPECT_EQ(b(0.0), 0.0);
  EXPECT_EQ(b.shift(), 1.0);
  EXPECT_NEAR(b(1.0), 2.0, 1e-15);
  EXPECT_NEAR(b(10.0), 4.0, 1e-15);
  EXPECT_NEAR(b.lipschitz(), 2.0, 1e-15);
  EXPECT_THROW(VelocityLaw::tabulated({0.0}, {0.0}), LabError);
  EXPECT_THROW(VelocityLaw::tabulated({1.0, 2.0}, {0.0, 1.0}), LabError);
  EXPECT_THROW(VelocityLaw::tabulated({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}), LabError);
}

TEST(VelocityLaw, ZeroLawIsStatic) {
  const VelocityLaw b = VelocityLaw::zero();
  EXPECT_EQ(b(3.0), 0.0);
  EXPECT_EQ(b.lipschitz(), 0.0);
}
