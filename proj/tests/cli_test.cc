// Copyright 2026 The shuffle_dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shuffle_dp/cli.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "shuffle_dp/io.h"
#include "test_util.h"

namespace shuffle_dp {
namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "shuffle_dp");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string WriteFile(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << text;
  return path;
}

std::string Rr3Path() {
  return WriteFile("rr3.json", R"({"d": 2, "W0": [0.75, 0.25], "W1": [0.25, 0.75]})");
}

// Payload rows (no '#' lines, no header).
std::vector<std::string> Rows(const std::string& csv) {
  std::vector<std::string> rows;
  bool header = true;
  for (absl::string_view line : absl::StrSplit(csv, '\n')) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    rows.emplace_back(line);
  }
  return rows;
}

TEST(CliCurveTest, ExactAnchors) {
  Result r = RunTool({"curve", "--channel", Rr3Path(), "--n", "2", "--k", "0",
                  "--eps", "0", "--engine", "exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Rows(r.out), std::vector<std::string>{"0,0.375"});
  EXPECT_NE(r.out.find("# command: curve"), std::string::npos);
  EXPECT_NE(r.out.find("epsilon,delta\n"), std::string::npos);

  r = RunTool({"curve", "--channel", Rr3Path(), "--n", "2", "--k", "0", "--eps",
           "1.0986122886681098", "--engine", "exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Rows(r.out), std::vector<std::string>{"1.0986122886681098,0"});
}

TEST(CliCurveTest, ExactMatchesBinomial) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const std::string path = WriteFile(
        "random.json", ChannelToJson(testing::RandomFullChannel(rng, 2)));
    for (int n : {1, 7, 20}) {
      const std::string ns = std::to_string(n);
      Result exact = RunTool({"curve", "--channel", path, "--n", ns});
      Result binomial =
          RunTool({"curve", "--channel", path, "--n", ns, "--engine", "binomial"});
      ASSERT_EQ(exact.code, 0) << exact.err;
      ASSERT_EQ(binomial.code, 0) << binomial.err;
      auto a = ParseCurveCsv(exact.out);
      auto b = ParseCurveCsv(binomial.out);
      ASSERT_TRUE(a.ok() && b.ok());
      ASSERT_EQ(a->size(), 64u);
      ASSERT_EQ(a->size(), b->size());
      for (size_t i = 0; i < a->size(); ++i) {
        EXPECT_EQ((*a)[i].epsilon, (*b)[i].epsilon);
        EXPECT_NEAR((*a)[i].delta, (*b)[i].delta, 1e-12);
      }
    }
  }
}

TEST(CliCurveTest, GdpAndChernoffEngines) {
  Result gdp = RunTool({"curve", "--channel", Rr3Path(), "--n", "100", "--engine",
                    "gdp", "--eps", "0,1"});
  ASSERT_EQ(gdp.code, 0) << gdp.err;
  EXPECT_NE(gdp.out.find("# mu: 0.11547005383792"), std::string::npos);
  EXPECT_NE(gdp.out.find("# source: CANONICAL"), std::string::npos);
  Result chernoff = RunTool({"curve", "--channel", Rr3Path(), "--n", "30",
                         "--engine", "chernoff", "--eps", "0.2,1.0986122886681098"});
  ASSERT_EQ(chernoff.code, 0) << chernoff.err;
  const std::vector<std::string> rows = Rows(chernoff.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], "1.0986122886681098,0");
}

TEST(CliCurveTest, JsonAndSvgOutputs) {
  const std::string svg = ::testing::TempDir() + "/curve.svg";
  Result r = RunTool({"curve", "--channel", Rr3Path(), "--n", "5", "--format",
                  "json", "--svg", svg, "--svg-log-y", "--sidedness",
                  "two-sided"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"points\""), std::string::npos);
  EXPECT_NE(r.out.find("TWO_SIDED"), std::string::npos);
  std::ifstream in(svg);
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_EQ(s.str().rfind("<svg", 0), 0u);
}

TEST(CliCurveTest, OutputFileMatchesStdout) {
  const std::string path = ::testing::TempDir() + "/curve.csv";
  Result to_stdout = RunTool({"curve", "--channel", Rr3Path(), "--n", "4"});
  Result to_file = RunTool({"curve", "--channel", Rr3Path(), "--n", "4", "-o", path});
  ASSERT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_EQ(s.str(), to_stdout.out);
}

TEST(CliExitCodeTest, MapsErrorClasses) {
  EXPECT_EQ(RunTool({"curve", "--channel", "/nonexistent.json", "--n", "2"}).code,
            kExitInvalidInput);
  const std::string bad =
      WriteFile("bad.json", R"({"d": 2, "W0": [0.7, 0.2], "W1": [0.5, 0.5]})");
  Result r = RunTool({"curve", "--channel", bad, "--n", "2"});
  EXPECT_EQ(r.code, kExitInvalidInput);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(RunTool({"curve", "--channel", Rr3Path()}).code, kExitInvalidInput);
  EXPECT_EQ(RunTool({"curve", "--channel", Rr3Path(), "--n", "3", "--engine",
                 "magic"})
                .code,
            kExitInvalidInput);
  EXPECT_EQ(RunTool({"curve", "--channel", Rr3Path(), "--n", "3", "--k", "1",
                 "--engine", "binomial"})
                .code,
            kExitInvalidInput);
  EXPECT_EQ(RunTool({"curve", "--channel", Rr3Path(), "--n", "3", "--k", "3"}).code,
            kExitInvalidInput);
  const std::string wide = WriteFile(
      "wide.json",
      R"({"d": 4, "W0": [0.25, 0.25, 0.25, 0.25], "W1": [0.1, 0.2, 0.3, 0.4]})");
  EXPECT_EQ(RunTool({"curve", "--channel", wide, "--n", "200", "--atom-cap", "100"})
                .code,
            kExitResourceCap);
  EXPECT_EQ(RunTool({"--help"}).code, kExitOk);
  EXPECT_EQ(RunTool({}).code, kExitInvalidInput);
}

TEST(CliExitCodeTest, StatusMapping) {
  EXPECT_EQ(ExitCodeForStatus(absl::OkStatus()), 0);
  EXPECT_EQ(ExitCodeForStatus(absl::InvalidArgumentError("x")), 2);
  EXPECT_EQ(ExitCodeForStatus(absl::ResourceExhaustedError("x")), 3);
  EXPECT_EQ(ExitCodeForStatus(absl::InternalError("x")), 4);
}

TEST(CliReportTest, RandomizedResponseValues) {
  Result r = RunTool({"report", "--channel", Rr3Path(), "--n", "100", "--pi", "0.5",
                  "--m", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("I_pi=1.33333333333333"), std::string::npos);
  EXPECT_NE(r.out.find("mu_unb=0.163299316185545"), std::string::npos);
  EXPECT_NE(r.out.find("ratio=1.66666666666666"), std::string::npos);
  EXPECT_NE(r.out.find("rr_regime=SUB_CRITICAL"), std::string::npos);

  r = RunTool({"report", "--channel", Rr3Path(), "--n", "10", "--k", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("jsd_canonical_asymptotic=0.0174999999"),
            std::string::npos);
  EXPECT_NE(r.out.find("jsd_canonical_exact="), std::string::npos);
  EXPECT_NE(r.out.find("jsd_canonical_residual="), std::string::npos);
}

TEST(CliReportTest, PerfectPrivacyAndJson) {
  const std::string id =
      WriteFile("id.json", R"({"d": 2, "W0": [0.5, 0.5], "W1": [0.5, 0.5]})");
  Result r = RunTool({"report", "--channel", id, "--n", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("perfect privacy: v = 0"), std::string::npos);
  r = RunTool({"report", "--channel", Rr3Path(), "--n", "10", "--k", "5",
           "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"jsd_exact_k\""), std::string::npos);
  EXPECT_EQ(RunTool({"report", "--channel", Rr3Path(), "--n", "10", "--k", "1",
                 "--pi", "0.5"})
                .code,
            kExitInvalidInput);
  const std::string null_support =
      WriteFile("null.json", R"({"d": 2, "W0": [0.5, 0.5], "W1": [1.0, 0.0]})");
  r = RunTool({"report", "--channel", null_support, "--n", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("support=NULL_SUPPORT"), std::string::npos);
}

TEST(CliSimulateTest, DeterministicAcrossRunsAndWorkers) {
  const std::vector<std::string> base = {"simulate", "--channel", Rr3Path(),
                                         "--n", "40", "--seed", "99",
                                         "--reps", "3000"};
  auto with_workers = [&](const std::string& w) {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"--workers", w});
    return RunTool(args);
  };
  Result a = with_workers("1");
  Result b = with_workers("1");
  Result c = with_workers("4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_NE(a.out.find("# sim_config: seed=99 reps=3000"), std::string::npos);
  EXPECT_NE(a.out.find("# summary: kolmogorov_distance="), std::string::npos);
}

TEST(CliSimulateTest, ZeroRepsAndMartingale) {
  Result empty = RunTool({"simulate", "--channel", Rr3Path(), "--n", "100",
                      "--reps", "0"});
  ASSERT_EQ(empty.code, 0) << empty.err;
  EXPECT_TRUE(Rows(empty.out).empty());
  EXPECT_EQ(empty.out.find("# summary"), std::string::npos);

  Result r = RunTool({"simulate", "--channel", Rr3Path(), "--n", "100", "--k", "0",
                  "--reps", "200000", "--seed", "5", "--workers", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  double mean = NAN;
  double se = NAN;
  for (absl::string_view line : absl::StrSplit(r.out, '\n')) {
    if (absl::ConsumePrefix(&line, "# summary: mean_exp_lambda=")) {
      mean = *ParseDouble(std::string(line));
    } else if (absl::ConsumePrefix(&line, "# summary: standard_error=")) {
      se = *ParseDouble(std::string(line));
    }
  }
  ASSERT_TRUE(std::isfinite(mean) && std::isfinite(se));
  EXPECT_LE(std::abs(mean - 1.0), 4.0 * se);
}

}  // namespace
}  // namespace shuffle_dp
