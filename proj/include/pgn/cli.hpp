#pragma once

// Library side of the `pgn` command-line tool: benchmark runs over random or
// explicit starts, report rendering (json, csv, human), the convergence-radius
// report and the `validate` check suite.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pgn/errors.hpp"
#include "pgn/problems.hpp"
#include "pgn/radius.hpp"
#include "pgn/solver.hpp"

namespace pgn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUnknownProblem = 3;
inline constexpr int kExitConditionViolated = 4;

// Bad flags, unreadable files, malformed values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Format { kJson, kCsv, kHuman };
enum class PenaltyChoice { kBox, kNone };

Format parse_format(const std::string& text);

struct RunConfig {
  std::string case_name;
  PenaltyChoice penalty = PenaltyChoice::kBox;
  std::optional<Vector> x0;  // explicit start; otherwise `starts` random ones
  int starts = 20;
  std::uint64_t seed = 1;
  solver::SolverConfig solver;
  // Replacement observations for the data-fit cases (kowalik, osborne1, osborne2).
  std::optional<Vector> observations;
  Format format = Format::kHuman;
  bool include_trace = false;
  int jobs = 1;
};

struct StartRecord {
  int index = 0;
  Vector x0;
  solver::SolveReport report;
  int iterations = 0;  // outer iterations performed
  double max_condition = 0.0;
  std::optional<double> distance_to_reference;  // max-norm
  double max_box_violation = 0.0;               // over x_1 .. x_N
};

struct Aggregate {
  int converged = 0;
  long long iteration_sum = 0;  // over converged starts only
  double max_condition = 0.0;

  // Mean outer iterations of converged starts; 0 when none converged.
  double average() const;
  // Arithmetic mean rounded half up.
  long long rounded_average() const;
};

struct BenchmarkReport {
  std::string case_name;
  std::uint64_t seed = 0;
  double outer_tolerance = 0.0;
  double inner_tolerance = 0.0;
  std::vector<StartRecord> starts;  // sorted by index
  Aggregate aggregate;

  bool all_converged() const;
};

// Uniform draw in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::uint64_t bits);

// `count` starts drawn coordinate-wise uniformly from the box. Infinite sides
// are truncated at reference +- 10 (or the finite side +- 10) for sampling.
std::vector<Vector> random_starts(const problems::CaseInfo& info, int count, std::uint64_t seed);

// Throws UnknownProblem, ExternalDefinitionUnavailable, ConfigError.
BenchmarkReport run_benchmark(const RunConfig& cfg);

void write_json(std::ostream& out, const BenchmarkReport& report, bool include_trace);
void write_csv(std::ostream& out, const BenchmarkReport& report);
void write_human(std::ostream& out, const BenchmarkReport& report);
void write_report(std::ostream& out, const BenchmarkReport& report, Format format,
                  bool include_trace);

// "1.5,2,-3" -> {1.5, 2, -3}. Throws ConfigError.
Vector parse_vector(const std::string& text);
// One value per line or comma/space separated. Throws ConfigError.
Vector read_observations(const std::string& path);
// Two columns "u,L" per line, optional header. Throws ConfigError.
radius::TabulatedL read_lipschitz_table(const std::string& path);

struct RadiusConfig {
  radius::ProblemConstants constants;
  radius::LipschitzAverage average = radius::ConstantL{1.0};
  radius::LipschitzMode mode = radius::LipschitzMode::kCenter;
  int samples = 20;
  Format format = Format::kHuman;
};

// Writes the radius report and returns the exit code (kExitConditionViolated
// when h >= 1).
int run_radius(std::ostream& out, const RadiusConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  std::string filter;  // substring of the check name; empty runs everything
  std::map<std::string, Vector> observations;  // case name -> replacement data
  std::uint64_t seed = 20240607;
};

struct Check {
  std::string name;  // family.check
  std::function<CheckResult(const ValidateOptions&)> run;
};

const std::vector<Check>& validation_checks();

// Runs the selected checks, prints a pass/fail table and returns kExitOk iff
// every selected check passed (kExitConfig when the filter selects nothing).
int run_validate(std::ostream& out, const ValidateOptions& options);

}  // namespace pgn::cli
