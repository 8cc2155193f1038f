#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nllab/config.hpp"
#include "nllab/report_io.hpp"

using namespace nllab;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioReport tiny_report() {
  ScenarioReport r;
  r.scenario = "tiny";
  r.config = {{"epsilon", 0.05}};
  r.check("mass", "godunov(N=8)", 1.0, 0.99, 1.01);
  r.metric("dx", "godunov(N=8)", 0.5);
  DiagnosticSeries s(standard_channels());
  s.record(0.0, {1, 1, 0, -0.5, -1, 0});
  s.record(0.5, {1, 0.5, 0, 0, -1, 0.5});
  r.series.emplace_back("godunov(N=8)", s);
  r.fields.emplace_back("godunov(N=8) t=0.5", Field(Grid1D(-2.0, 2.0, 8), 0.5));
  return r;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const LabConfig c = parse_config("");
  EXPECT_EQ(c.ce1.epsilon, 0.05);
  EXPECT_EQ(c.output_dir, "runs");
  EXPECT_EQ(c.rate.eps_list, (std::vector<double>{0.2, 0.1, 0.05, 0.025}));
}

TEST(Config, SectionOverridesAndComments) {
  const LabConfig c = parse_config(
      "output_dir = out  # root\n"
      "[ce1]\n"
      "epsilon = 0.1\n"
      "; comment\n"
      "[rate]\n"
      "eps_list = [0.4, 0.2]\n"
      "[convergence]\n"
      "cells = 64, 128, 256\n");
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.ce1.epsilon, 0.1);
  EXPECT_EQ(c.ce2.epsilon, 0.05);
  EXPECT_EQ(c.rate.eps_list, (std::vector<double>{0.4, 0.2}));
  EXPECT_EQ(c.convergence.cells, (std::vector<int>{64, 128, 256}));
}

TEST(Config, ValidationErrorCarriesLineAndKey) {
  const std::string e = config_error("[ce1]\n\nepsilon = -1\n");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
  EXPECT_NE(e.find("epsilon must be > 0"), std::string::npos) << e;
}

TEST(Config, SyntaxErrors) {
  EXPECT_NE(config_error("[ce9]\n").find("line 1: unknown section"), std::string::npos);
  EXPECT_NE(config_error("[ce1]\nepsilo = 1\n").find("line 2: unknown key 'epsilo'"), std::string::npos);
  EXPECT_NE(config_error("[ce1]\nepsilon = abc\n").find("expects a real number"), std::string::npos);
  EXPECT_NE(config_error("[ce1]\nparticles = 1.5\n").find("expects an integer"), std::string::npos);
  EXPECT_NE(config_error("[ce1]\nepsilon =\n").find("missing a value"), std::string::npos);
  EXPECT_NE(config_error("[ce1]\nepsilon = 0.1\nepsilon = 0.2\n").find("duplicate key"), std::string::npos);
  EXPECT_NE(config_error("[ce1\n").find("malformed section"), std::string::npos);
  EXPECT_NE(config_error("epsilon\n").find("expected 'key = value'"), std::string::npos);
  EXPECT_NE(config_error("[rate]\neps_list = 0.1, x\n").find("list of real numbers"), std::string::npos);
}

TEST(Config, TextRoundTrip) {
  LabConfig c;
  c.ce2.t_baricenter = 0.75;
  c.visc.nu_list = {0.2, 0.02};
  c.seed = 99;
  const LabConfig back = parse_config(to_text(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(ReportIo, HashIsStableAndSensitiveToConfig) {
  ScenarioReport a = tiny_report();
  ScenarioReport b = tiny_report();
  EXPECT_EQ(manifest_hash(a), manifest_hash(b));
  EXPECT_EQ(manifest_hash(a).size(), 16u);
  b.config["epsilon"] = 0.1;
  EXPECT_NE(manifest_hash(a), manifest_hash(b));
  EXPECT_EQ(run_directory_name(a), "tiny-" + manifest_hash(a));
  EXPECT_EQ(fnv1a64(""), 1469598103934665603ull);
}

TEST(ReportIo, EmitIsDeterministic) {
  const auto root = std::filesystem::temp_directory_path() / "nllab_emit_test";
  std::filesystem::remove_all(root);
  const ScenarioReport r = tiny_report();
  const EmittedPaths p1 = emit_report(r, root / "a");
  const EmittedPaths p2 = emit_report(r, root / "b");
  EXPECT_EQ(p1.directory.filename(), p2.directory.filename());
  EXPECT_EQ(slurp(p1.diagnostics), slurp(p2.diagnostics));
  EXPECT_EQ(slurp(p1.manifest), slurp(p2.manifest));
  ASSERT_EQ(p1.fields.size(), 1u);
  EXPECT_EQ(slurp(p1.fields[0]), slurp(p2.fields[0]));
  EXPECT_EQ(p1.fields[0].filename().string(), "godunov_N=8__t=0.5.csv");

  const std::string diag = slurp(p1.diagnostics);
  EXPECT_EQ(diag.substr(0, diag.find('\n')), "run,t,mass,window_mass,entropy,baricenter,support_lo,support_hi");
  const auto m = nlohmann::json::parse(slurp(p1.manifest));
  EXPECT_EQ(m["scenario"], "tiny");
  EXPECT_EQ(m["verdict"], "PASS");
  EXPECT_EQ(m["code_version"], kCodeVersion);
  EXPECT_EQ(m["manifest_hash"], manifest_hash(r));
  std::filesystem::remove_all(root);
}

TEST(ReportIo, UnwritableRootNamesThePath) {
  const auto root = std::filesystem::temp_directory_path() / "nllab_blocker";
  std::filesystem::remove_all(root);
  { std::ofstream(root) << "x"; }
  try {
    emit_report(tiny_report(), root);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_NE(std::string(e.what()).find(root.string()), std::string::npos);
  }
  std::filesystem::remove(root);
}
