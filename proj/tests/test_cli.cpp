#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgn/cli.hpp"

namespace pgn::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p =
      fs::temp_directory_path() / ("pgn_test_" + std::to_string(::getpid()) + "_" + name);
  std::ofstream(p) << content;
  return p;
}

struct ToolRun {
  int code = -1;
  std::string out;
};

ToolRun run_tool(const std::string& args) {
  const fs::path out =
      fs::temp_directory_path() / ("pgn_test_stdout_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = std::string(PGN_TOOL_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  ToolRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

RunConfig rosenbrock_config(int starts, std::uint64_t seed) {
  RunConfig cfg;
  cfg.case_name = "rosenbrock";
  cfg.starts = starts;
  cfg.seed = seed;
  return cfg;
}

std::string json_text(const BenchmarkReport& r, bool trace) {
  std::ostringstream os;
  write_json(os, r, trace);
  return os.str();
}

TEST(Uniform01, TopBits) {
  EXPECT_EQ(uniform01(0), 0.0);
  EXPECT_EQ(uniform01(~0ULL), 1.0 - 0x1.0p-53);
  EXPECT_EQ(uniform01(1ULL << 63), 0.5);
}

TEST(RandomStarts, DeterministicAndInsideBox) {
  const problems::CaseInfo info = problems::case_info("osborne2");
  const auto a = random_starts(info, 20, 3);
  const auto b = random_starts(info, 20, 3);
  const auto c = random_starts(info, 20, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const Vector& x : a) EXPECT_TRUE(info.box.contains(x));
  EXPECT_THROW(random_starts(info, 0, 1), ConfigError);
}

TEST(RandomStarts, InfiniteSidesAreTruncated) {
  const problems::CaseInfo info = problems::case_info("teneq1b");
  for (const Vector& x : random_starts(info, 10, 1)) {
    EXPECT_TRUE(info.box.contains(x));
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_LE(x[i], (*info.reference_x)[i] + 10.0);
    }
  }
}

TEST(Benchmark, RosenbrockAllConverge) {
  const BenchmarkReport r = run_benchmark(rosenbrock_config(20, 7));
  EXPECT_TRUE(r.all_converged());
  EXPECT_EQ(r.aggregate.converged, 20);
  ASSERT_EQ(r.starts.size(), 20u);
  for (std::size_t i = 0; i < r.starts.size(); ++i) {
    EXPECT_EQ(r.starts[i].index, static_cast<int>(i));
    EXPECT_LE(*r.starts[i].distance_to_reference, 1e-4);
  }
}

TEST(Benchmark, JsonIsByteIdenticalAcrossRunsAndThreads) {
  RunConfig cfg = rosenbrock_config(12, 9);
  const std::string a = json_text(run_benchmark(cfg), true);
  const std::string b = json_text(run_benchmark(cfg), true);
  cfg.jobs = 4;
  const std::string c = json_text(run_benchmark(cfg), true);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Benchmark, JsonSchema) {
  const BenchmarkReport r = run_benchmark(rosenbrock_config(3, 2));
  const json j = json::parse(json_text(r, false));
  ASSERT_TRUE(j.contains("meta"));
  EXPECT_EQ(j["meta"]["case"], "rosenbrock");
  EXPECT_EQ(j["meta"]["seed"], 2);
  EXPECT_EQ(j["meta"]["tolerances"]["outer"], 1e-12);
  EXPECT_EQ(j["meta"]["tolerances"]["inner"], 1e-12);
  ASSERT_EQ(j["starts"].size(), 3u);
  for (const char* key : {"x0", "status", "final_x", "iterations"}) {
    EXPECT_TRUE(j["starts"][0].contains(key)) << key;
  }
  EXPECT_FALSE(j["starts"][0].contains("trace"));
  EXPECT_EQ(j["aggregate"]["converged"], 3);
  EXPECT_TRUE(j["aggregate"].contains("max_condition"));
  const json& avg = j["aggregate"]["avg_outer_iterations"];
  EXPECT_EQ(avg["numerator"], r.aggregate.iteration_sum);
  EXPECT_EQ(avg["denominator"], 3);

  const json t = json::parse(json_text(r, true));
  const json& trace = t["starts"][0]["trace"];
  ASSERT_EQ(trace.size(), static_cast<std::size_t>(r.starts[0].iterations));
  for (const char* key : {"n", "step_norm", "residual_norm", "inner_iterations", "jacobian_condition"}) {
    EXPECT_TRUE(trace[0].contains(key)) << key;
  }
}

TEST(Benchmark, CsvHeaderAndRows) {
  RunConfig cfg;
  cfg.case_name = "kowalik";
  cfg.starts = 1;
  cfg.seed = 1;
  const BenchmarkReport r = run_benchmark(cfg);
  std::ostringstream os;
  write_csv(os, r);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,step_norm,residual_norm,inner_iterations,jacobian_condition");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    EXPECT_EQ(line.substr(0, line.find(',')), std::to_string(rows));
    ++rows;
  }
  EXPECT_EQ(rows, r.starts[0].iterations);
}

TEST(Benchmark, ErrorsPropagate) {
  RunConfig cfg = rosenbrock_config(1, 1);
  cfg.case_name = "nope";
  EXPECT_THROW(run_benchmark(cfg), UnknownProblem);
  cfg.case_name = "twoeq6";
  EXPECT_THROW(run_benchmark(cfg), ExternalDefinitionUnavailable);
  cfg.case_name = "rosenbrock";
  cfg.x0 = Vector{1.0, 2.0, 3.0};
  EXPECT_THROW(run_benchmark(cfg), ConfigError);
  cfg.x0.reset();
  cfg.observations = Vector{1.0};
  EXPECT_THROW(run_benchmark(cfg), ConfigError);
}

TEST(Aggregate, Rounding) {
  Aggregate a;
  a.converged = 20;
  a.iteration_sum = 145;
  EXPECT_DOUBLE_EQ(a.average(), 7.25);
  EXPECT_EQ(a.rounded_average(), 7);
  a.iteration_sum = 150;
  EXPECT_EQ(a.rounded_average(), 8);
  a.iteration_sum = 149;
  EXPECT_EQ(a.rounded_average(), 7);
  Aggregate none;
  EXPECT_EQ(none.average(), 0.0);
  EXPECT_EQ(none.rounded_average(), 0);
}

TEST(Parsing, VectorsAndFormats) {
  EXPECT_EQ(parse_vector("1.5,2,-3e-1"), (Vector{1.5, 2.0, -0.3}));
  EXPECT_THROW(parse_vector("1,,2"), ConfigError);
  EXPECT_THROW(parse_vector("abc"), ConfigError);
  EXPECT_EQ(parse_format("json"), Format::kJson);
  EXPECT_EQ(parse_format("csv"), Format::kCsv);
  EXPECT_EQ(parse_format("human"), Format::kHuman);
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Parsing, ObservationAndTableFiles) {
  const fs::path obs = temp_file("obs.txt", "# comment\n0.1, 0.2\n0.3\n");
  EXPECT_EQ(read_observations(obs.string()), (Vector{0.1, 0.2, 0.3}));
  EXPECT_THROW(read_observations("/nonexistent/obs.txt"), ConfigError);
  const fs::path tab = temp_file("tab.csv", "u,L\n0,1\n0.5,2\n1,2.5\n");
  const radius::TabulatedL t = read_lipschitz_table(tab.string());
  EXPECT_EQ(t.knots, (Vector{0.0, 0.5, 1.0}));
  EXPECT_EQ(t.values, (Vector{1.0, 2.0, 2.5}));
  const fs::path bad = temp_file("bad.csv", "0,2\n1,1\n");
  EXPECT_THROW(read_lipschitz_table(bad.string()), ConfigError);
}

TEST(Radius, ReportAndExitCodes) {
  RadiusConfig cfg;
  cfg.constants = {0.0, 1.0, 1.0};
  cfg.average = radius::ConstantL{1.0};
  cfg.format = Format::kJson;
  std::ostringstream os;
  EXPECT_EQ(run_radius(os, cfg), kExitOk);
  const json j = json::parse(os.str());
  EXPECT_NEAR(j["r_bar"].get<double>(), 0.274917217635, 1e-11);
  EXPECT_EQ(j["h"].get<double>(), 0.0);
  EXPECT_EQ(j["C1"].get<double>(), 0.0);
  EXPECT_FALSE(j["closed_form_discrepancy"].get<bool>());
  EXPECT_EQ(j["q_samples"].size(), 21u);

  cfg.constants.alpha = 1.0;
  cfg.format = Format::kHuman;
  std::ostringstream bad;
  EXPECT_EQ(run_radius(bad, cfg), kExitConditionViolated);
  EXPECT_NE(bad.str().find("3.41421"), std::string::npos);
}

TEST(Validate, FilterAndNegativeControl) {
  ValidateOptions opts;
  opts.filter = "prox";
  std::ostringstream os;
  EXPECT_EQ(run_validate(os, opts), kExitOk);
  EXPECT_EQ(os.str().find("linalg."), std::string::npos);
  EXPECT_NE(os.str().find("prox.pullback"), std::string::npos);

  opts.filter = "no-such-check";
  std::ostringstream none;
  EXPECT_EQ(run_validate(none, opts), kExitConfig);

  opts.filter = "osborne1";
  Vector y(problems::osborne1_observations().begin(), problems::osborne1_observations().end());
  y[5] -= 0.1;
  opts.observations["osborne1"] = y;
  std::ostringstream corrupted;
  EXPECT_EQ(run_validate(corrupted, opts), kExitFailure);
  EXPECT_NE(corrupted.str().find("FAIL  problems.osborne1.reference"), std::string::npos);
}

TEST(Validate, FullSuitePasses) {
  std::ostringstream os;
  EXPECT_EQ(run_validate(os, {}), kExitOk) << os.str();
}

// --- the executable ---------------------------------------------------------

TEST(Tool, SolveExitCodes) {
  EXPECT_EQ(run_tool("solve --case rosenbrock --starts 3 --seed 7 --format json").code, kExitOk);
  EXPECT_EQ(run_tool("solve --case nope").code, kExitUnknownProblem);
  EXPECT_EQ(run_tool("solve --case twoeq6").code, kExitUnknownProblem);
  EXPECT_EQ(run_tool("solve --case rosenbrock --bogus").code, kExitConfig);
  EXPECT_EQ(run_tool("solve --case rosenbrock --format xml").code, kExitConfig);
  EXPECT_EQ(run_tool("solve --case rosenbrock --starts 0").code, kExitConfig);
  EXPECT_EQ(run_tool("solve").code, kExitConfig);
  EXPECT_EQ(run_tool("solve --case rosenbrock --max-outer 1 --starts 2").code, kExitFailure);
}

TEST(Tool, SolveSimdSelectionGivesSameReport) {
  const ToolRun a = run_tool("solve --case kowalik --starts 3 --seed 5 --format json --simd scalar");
  const ToolRun b = run_tool("solve --case kowalik --starts 3 --seed 5 --format json --simd avx2");
  ASSERT_EQ(a.code, kExitOk) << a.out;
  if (b.code != kExitOk) GTEST_SKIP() << "AVX2 unavailable";
  const json ja = json::parse(a.out);
  const json jb = json::parse(b.out);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(ja["starts"][i]["status"], jb["starts"][i]["status"]);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(ja["starts"][i]["final_x"][k].get<double>(),
                  jb["starts"][i]["final_x"][k].get<double>(), 1e-9);
    }
  }
}

TEST(Tool, ConfigFileMirrorsFlags) {
  const fs::path cfg = temp_file("solve.cfg",
                                 "# benchmark defaults\ncase = rosenbrock\nstarts = 4\nseed = 7\n"
                                 "format = json\nouter-tol = 1e-10\n");
  const ToolRun r = run_tool("solve --config " + cfg.string() + " --starts 2");
  ASSERT_EQ(r.code, kExitOk) << r.out;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["starts"].size(), 2u);  // command line wins
  EXPECT_EQ(j["meta"]["seed"], 7);
  EXPECT_EQ(j["meta"]["tolerances"]["outer"], 1e-10);

  const fs::path unknown = temp_file("unknown.cfg", "case = rosenbrock\ncolour = blue\n");
  EXPECT_EQ(run_tool("solve --config " + unknown.string()).code, kExitConfig);
  const fs::path malformed = temp_file("malformed.cfg", "case = rosenbrock\nstarts = many\n");
  EXPECT_EQ(run_tool("solve --config " + malformed.string()).code, kExitConfig);
  EXPECT_EQ(run_tool("solve --config /nonexistent.cfg").code, kExitConfig);

  const fs::path rad = temp_file("radius.cfg", "alpha = 0\nbeta = 1\nkappa = 1\nL = 1\nmode = radius\n");
  const ToolRun rr = run_tool("radius --config " + rad.string());
  EXPECT_EQ(rr.code, kExitOk);
  EXPECT_NE(rr.out.find("mode = radius"), std::string::npos);
}

TEST(Tool, RadiusExamples) {
  const ToolRun ok = run_tool("radius --alpha 0 --beta 1 --kappa 1 --L 1 --mode center");
  EXPECT_EQ(ok.code, kExitOk);
  EXPECT_NE(ok.out.find("r_bar = 0.274917217635"), std::string::npos) << ok.out;
  EXPECT_NE(ok.out.find("h = 0"), std::string::npos);
  const ToolRun bad = run_tool("radius --alpha 1 --beta 1 --kappa 1 --L 1 --mode center");
  EXPECT_EQ(bad.code, kExitConditionViolated);
  EXPECT_NE(bad.out.find("h = 3.41421356237"), std::string::npos);
  EXPECT_EQ(run_tool("radius --alpha 0 --beta 1 --kappa 1").code, kExitConfig);
  EXPECT_EQ(run_tool("radius --alpha 0 --beta 1 --kappa 0.5 --L 1").code, kExitConfig);
  EXPECT_EQ(run_tool("radius --alpha 0 --beta 1 --kappa 1 --L-linear 1,0.5 --format json").code,
            kExitOk);
}

TEST(Tool, ValidateNegativeControl) {
  std::ostringstream data;
  for (std::size_t i = 0; i < problems::osborne1_observations().size(); ++i) {
    data << problems::osborne1_observations()[i] + (i == 5 ? -0.1 : 0.0) << '\n';
  }
  const fs::path bad = temp_file("osborne1_bad.txt", data.str());
  const ToolRun r = run_tool("validate --filter osborne1 --data osborne1=" + bad.string());
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.out.find("FAIL  problems.osborne1.reference"), std::string::npos) << r.out;
  EXPECT_EQ(run_tool("validate --filter prox").code, kExitOk);
  EXPECT_EQ(run_tool("validate --data rosenbrock=/tmp/x").code, kExitConfig);
}

}  // namespace
}  // namespace pgn::cli
