#include <gtest/gtest.h>

#include <cmath>

#include "nllab/experiments.hpp"

using namespace nllab;

TEST(Verdict, CombineOrdering) {
  EXPECT_EQ(combine(Verdict::Pass, Verdict::Pass), Verdict::Pass);
  EXPECT_EQ(combine(Verdict::Pass, Verdict::Fail), Verdict::Fail);
  EXPECT_EQ(combine(Verdict::Fail, Verdict::Inconclusive), Verdict::Inconclusive);
  EXPECT_EQ(exit_code(Verdict::Pass), 0);
  EXPECT_EQ(exit_code(Verdict::Fail), 2);
  EXPECT_EQ(exit_code(Verdict::Inconclusive), 3);
  EXPECT_EQ(to_string(Verdict::Inconclusive), "INCONCLUSIVE");
}

TEST(Checks, RangeAndNan) {
  EXPECT_TRUE(make_check("a", "s", 0.5, 0.0, 1.0).passed);
  EXPECT_TRUE(make_check("a", "s", 1.0, 0.0, 1.0).passed);
  EXPECT_FALSE(make_check("a", "s", 1.1, 0.0, 1.0).passed);
  EXPECT_FALSE(make_check("a", "s", std::nan(""), -kInf, kInf).passed);
  EXPECT_DOUBLE_EQ(decision_margin(make_check("a", "s", 0.3, 0.0, 1.0)), 0.3);
  EXPECT_TRUE(std::isinf(decision_margin(make_check("a", "s", 0.3, -kInf, kInf))));
}

TEST(Gates, GridAndRichardson) {
  EXPECT_TRUE(grid_convergence_gate("d", 1.0, 1.01, 0.1).converged);
  EXPECT_FALSE(grid_convergence_gate("d", 1.0, 1.03, 0.1).converged);
  EXPECT_FALSE(grid_convergence_gate("d", std::nan(""), 1.0, 0.1).converged);
  EXPECT_TRUE(richardson_gate("d", 0.2, 0.1).converged);
  EXPECT_FALSE(richardson_gate("d", 0.1, 0.2).converged);
}

TEST(Report, VerdictPrecedence) {
  ScenarioReport r;
  r.scenario = "x";
  r.check("ok", "s", 1.0, 0.0, 2.0);
  EXPECT_EQ(r.verdict(), Verdict::Pass);
  r.check("bad", "s", 3.0, 0.0, 2.0);
  EXPECT_EQ(r.verdict(), Verdict::Fail);
  r.gate("g", 1.0, 2.0, 0.1);
  EXPECT_EQ(r.verdict(), Verdict::Inconclusive);
  EXPECT_THROW(r.find_check("missing"), LabError);
  EXPECT_THROW(r.find_metric("missing"), LabError);
  const auto j = to_json(r);
  EXPECT_EQ(j["verdict"], "INCONCLUSIVE");
  EXPECT_EQ(j["checks"].size(), 2u);
}

TEST(Report, NonFiniteNumbersSerializeAsStrings) {
  EXPECT_EQ(json_number(kInf), "inf");
  EXPECT_EQ(json_number(-kInf), "-inf");
  EXPECT_EQ(json_number(std::nan("")), "nan");
  EXPECT_EQ(json_number(1.5), 1.5);
}

TEST(Data, StepOddGaussian) {
  const Grid1D g(-2.0, 2.0, 400);
  EXPECT_NEAR(total_mass(step_datum(g)), 1.0, 1e-14);
  const Field o = odd_datum(g);
  EXPECT_NEAR(total_mass(o), 0.0, 1e-14);
  for (int i = 0; i < o.size(); ++i) EXPECT_EQ(o[i], -o[o.size() - 1 - i]);
  EXPECT_NEAR(total_mass(gaussian_datum(g, 0.5, 0.3)), 0.5, 1e-10);
}

TEST(Helpers, TrapezoidAndTimes) {
  EXPECT_DOUBLE_EQ(trapezoid({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}), 2.0);
  EXPECT_THROW(trapezoid({0.0}, {0.0, 1.0}), LabError);
  const auto t = arithmetic_times(0.05, 1.0);
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_EQ(time_index(t, 0.5), 9u);
  EXPECT_THROW(time_index(t, 0.51), LabError);
}

TEST(Configs, ValidationMessagesNameTheKey) {
  Ce1Config c1;
  c1.epsilon = -1.0;
  try {
    validate(c1);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("epsilon", 0), 0u);
  }
  Ce2Config c2;
  c2.solver = "spectral";
  EXPECT_THROW(validate(c2), LabError);
  RateConfig r;
  r.p = 1.0;
  EXPECT_THROW(validate(r), LabError);
  r = RateConfig{};
  r.kernel = "box";
  EXPECT_THROW(validate(r), LabError);
  ViscConfig v;
  v.nu_list = {};
  EXPECT_THROW(validate(v), LabError);
  ConvergenceConfig cc;
  cc.cells = {512};
  EXPECT_THROW(validate(cc), LabError);
  EXPECT_NO_THROW(validate(Ce3Config{}));
}

TEST(Scenarios, GodunovConvergencePasses) {
  const ScenarioReport r = godunov_convergence();
  EXPECT_EQ(r.verdict(), Verdict::Pass);
  EXPECT_GE(r.find_check("fitted L1 self-convergence order").value, 0.7);
  EXPECT_LE(r.find_check("odd oracle vs godunov L1 / dx").value, 4.0);
}

TEST(Scenarios, SmallGodunovSelfConvergenceOrdersArePositive) {
  ConvergenceConfig c;
  c.cells = {128, 256, 512};
  const ConvergenceStudy s = godunov_self_convergence(c);
  ASSERT_EQ(s.self_difference.size(), 2u);
  ASSERT_EQ(s.orders.size(), 1u);
  EXPECT_GT(s.orders[0], 0.3);
  EXPECT_LT(s.exact_error.back(), s.exact_error.front());
}
