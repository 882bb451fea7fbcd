#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freeform/suite.hpp"

using namespace freeform;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "freeform_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int run(const std::string& args) {
  const std::string cmd = std::string(FREEFORM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SuiteConfig small_config(const std::string& suite) {
  SuiteConfig c;
  c.suite = suite;
  c.Ks = {0};
  c.ns = {2};
  c.count = 3;
  return c;
}

}  // namespace

TEST(Suite, CapsPassWithEquality) {
  const ReportEnvelope env = run_suite(small_config("thm1"));
  EXPECT_EQ(env.records.size(), 10u);
  EXPECT_EQ(env.pass, 10);
  EXPECT_EQ(env.exit_code(), 0);
  for (const Record& r : env.records) EXPECT_TRUE(r.check.equality_expected);
}

TEST(Suite, RecordSchema) {
  const json j = run_suite(small_config("thm4")).to_json(false);
  EXPECT_EQ(j["tool"], "freeform");
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_FALSE(j.contains("wall_clock"));
  const json& r = j["records"][0];
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.items()) keys.push_back(k);
  const std::vector<std::string> expected = {"suite", "check", "shape", "n",      "K",          "k",         "lhs",
                                             "rhs",   "ratio", "status", "hypotheses", "quadrature", "details"};
  EXPECT_EQ(keys, expected);
  for (const char* h : {"ricci_min", "convexity_min", "free_boundary_pos", "free_boundary_angle", "half_ball"})
    EXPECT_TRUE(r["hypotheses"].contains(h)) << h;
  EXPECT_EQ(r["quadrature"]["order"], 8);
  EXPECT_EQ(r["shape"]["kind"], "cap");
}

TEST(Suite, ByteStableAcrossThreadCounts) {
  SuiteConfig c = small_config("thm1");
  c.family = "perturbed";
  c.threads = 1;
  const std::string one = run_suite(c).to_json(false).dump();
  c.threads = 4;
  EXPECT_EQ(one, run_suite(c).to_json(false).dump());
}

TEST(Suite, SeedSelectsShapes) {
  SuiteConfig c = small_config("thm1");
  c.family = "perturbed";
  const auto a = perturbed_family(c, false);
  c.seed = 2;
  const auto b = perturbed_family(c, false);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_NE(a.front().epsilon, b.front().epsilon);
}

TEST(Suite, ConfigValidation) {
  SuiteConfig c = small_config("thm1");
  c.suite = "nope";
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config("perez");
  c.Ks = {1};
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config("cor-lowdim");
  c.ns = {3};
  EXPECT_THROW(run_suite(c), ConfigError);
  c = small_config("thm1");
  c.count = 0;
  EXPECT_THROW(run_suite(c), ConfigError);
}

TEST(Suite, ExitCodeReflectsFailures) {
  ReportEnvelope env;
  InequalityCheck bad;
  bad.lhs = 2.0;
  bad.rhs = 1.0;
  bad.finalize(Tolerances{});
  env.records.push_back(Record{"thm1", std::nullopt, bad, {}});
  env.count();
  EXPECT_EQ(env.fail, 1);
  EXPECT_EQ(env.exit_code(), 1);
}

TEST(Serialisation, ShapeRoundTrip) {
  ShapeSpec s;
  s.kind = "profile";
  s.K = -1;
  s.R = 0.8;
  s.n = 3;
  s.rho = 0.4;
  s.epsilon = 0.01;
  s.coefficients = {0.1, -0.2};
  const ShapeSpec t = shape_from_json(shape_to_json(s));
  EXPECT_EQ(t.kind, s.kind);
  EXPECT_EQ(t.K, s.K);
  EXPECT_EQ(t.n, s.n);
  EXPECT_EQ(t.coefficients, s.coefficients);
  EXPECT_DOUBLE_EQ(t.epsilon, s.epsilon);
  EXPECT_EQ(shape_to_json(t).dump(), shape_to_json(s).dump());
  EXPECT_THROW(shape_from_json(json::parse(R"({"kind":"cube","K":0,"R":1})")), ConfigError);
  EXPECT_THROW(shape_from_json(json::parse(R"({"kind":"cap","K":"x","R":1})")), ConfigError);
  EXPECT_THROW(shape_from_json(json::array()), ConfigError);
}

TEST(Serialisation, NumbersAndRanges) {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-17, -7.0, 1e300}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_TRUE(number(std::nan("")).is_null());
  const auto r = parse_range("0:0.3:0.1");
  ASSERT_EQ(r.size(), 4u);
  EXPECT_DOUBLE_EQ(r.back(), 0.30000000000000004);
  EXPECT_EQ(parse_range("0.05").size(), 1u);
  EXPECT_THROW(parse_range("0:1"), ConfigError);
  EXPECT_THROW(parse_range("1:0:0.1"), ConfigError);
  EXPECT_THROW(parse_range("a:b:c"), ConfigError);
}

TEST(Sweep, RatioFollowsAmplitude) {
  SuiteConfig c = small_config("thm1");
  const auto rows = sweep(c, default_sweep_shape("profile", 2), {0.0, 0.1, 0.2});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(std::isnan(rows[0].check.ratio));
  EXPECT_LT(rows[1].check.lhs, rows[2].check.lhs);
  const std::string csv = sweep_to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,lhs,rhs,ratio,status");
  EXPECT_THROW(sweep(small_config("reilly"), default_sweep_shape("profile", 2), {0.1}), ConfigError);
}

TEST(Describe, CapSummary) {
  ShapeSpec s;
  s.kind = "cap";
  const json j = describe_shape(s);
  EXPECT_NEAR(j["area"].get<double>(), 2.0 * std::numbers::pi * (1.0 - 1.0 / std::sqrt(2.0)), 1e-11);
  EXPECT_NEAR(j["boundary_length"].get<double>(), std::numbers::pi * std::sqrt(2.0), 1e-11);
  EXPECT_EQ(j["route"], "profile");
}

TEST(Binary, VerifyWritesReport) {
  const auto out = scratch("thm1.json");
  EXPECT_EQ(run("verify thm1 --K 0 --n 2 --no-timing --out " + out.string()), 0);
  const json j = json::parse(slurp(out));
  EXPECT_EQ(j["counts"]["pass"], 10);
  EXPECT_EQ(j["suite"], "thm1");
}

TEST(Binary, CsvFormat) {
  const auto out = scratch("thm1.csv");
  EXPECT_EQ(run("verify thm1 --K 0 --n 2 --k 1 --format csv --out " + out.string()), 0);
  const std::string text = slurp(out);
  EXPECT_EQ(text.substr(0, text.find('\n')), "suite,check,n,K,k,lhs,rhs,ratio,status");
}

TEST(Binary, ShapeFileAndDescribe) {
  const auto shape = scratch("shape.json");
  std::ofstream(shape) << R"({"kind":"profile","K":1,"R":1.0,"params":{"n":2,"rho":1.0,"epsilon":0.2,"coefficients":[0.03,-0.01]}})";
  EXPECT_EQ(run("verify thm4 --shape " + shape.string()), 0);
  const auto out = scratch("describe.json");
  EXPECT_EQ(run("describe --shape cap --K 0 --out " + out.string()), 0);
  EXPECT_TRUE(json::parse(slurp(out)).contains("non_umbilicity"));
}

TEST(Binary, SweepWritesCsv) {
  const auto out = scratch("sweep.csv");
  EXPECT_EQ(run("sweep thm1 --epsilon 0:0.2:0.1 --out " + out.string()), 0);
  const std::string text = slurp(out);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run("verify nope"), 2);
  EXPECT_EQ(run("verify thm1 --K 5"), 2);
  EXPECT_EQ(run("verify perez --K 1"), 2);
  EXPECT_EQ(run("describe --shape /nonexistent/shape.json"), 2);
  const auto bad = scratch("bad_shape.json");
  std::ofstream(bad) << R"({"kind":"cap","K":1,"R":4.0,"params":{"n":2,"rho":1.0}})";
  EXPECT_EQ(run("describe --shape " + bad.string()), 3);
  EXPECT_EQ(run("--version"), 0);
}
