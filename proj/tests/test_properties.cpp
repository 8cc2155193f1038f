#include <gtest/gtest.h>

#include "nllab/properties.hpp"

using namespace nllab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

void expect_property(const PropertyResult& p) {
  EXPECT_TRUE(p.passed) << p.name << ": worst " << p.worst << " > tolerance " << p.tolerance;
  EXPECT_GT(p.cases, 0);
}

}  // namespace

TEST(Properties, YoungInequalityOnRandomFields) { expect_property(young_inequality(kSeed)); }
TEST(Properties, JensenForConvolution) { expect_property(jensen_convolution(kSeed)); }
TEST(Properties, DiffusionMaximumPrinciple) { expect_property(diffusion_maximum_principle(kSeed)); }
TEST(Properties, LaxFriedrichsOddSymmetry) { expect_property(lf_odd_symmetry(kSeed, 20)); }
TEST(Properties, OneSidedKernelIgnoresTheLeft) { expect_property(one_sided_right_dependence(kSeed)); }
TEST(Properties, LaxFriedrichsMassConservation) { expect_property(lf_mass_conservation(kSeed, 2, 200)); }
TEST(Properties, GodunovMassConservation) { expect_property(godunov_mass_conservation(kSeed, 2, 200)); }
TEST(Properties, ParticleMassExact) { expect_property(particle_mass_exact(kSeed, 2, 20)); }

TEST(Properties, HeatKernelExponents) {
  expect_property(heat_kernel_exponent(2.0));
  expect_property(heat_kernel_exponent(4.0 / 3.0));
  expect_property(heat_kernel_exponent(2.0, 2));
}

TEST(Properties, HeatKernelExponentFormula) {
  const HeatKernelSpec s{0.1, 1};
  EXPECT_DOUBLE_EQ(grad_lq_exponent(s, 2.0), -0.75);
  EXPECT_DOUBLE_EQ(grad_lq_exponent(s, 4.0 / 3.0), -0.625);
  EXPECT_THROW(validate(HeatKernelSpec{0.0, 1}), LabError);
}

TEST(Properties, RandomFieldsAreReproducible) {
  RandomFields a(5), b(5);
  const Grid1D g(-1.0, 1.0, 100);
  EXPECT_EQ(a.next(g, -0.5, 0.5, false).values, b.next(g, -0.5, 0.5, false).values);
}

TEST(Properties, FailingResultIsReported) {
  const PropertyResult p = make_property("x", 2.0, 1.0, 3);
  EXPECT_FALSE(p.passed);
}
