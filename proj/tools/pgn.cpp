// pgn: proximal Gauss-Newton benchmark and diagnostics tool.
//
//   pgn solve --case rosenbrock --starts 20 --seed 7 --format json
//   pgn radius --alpha 0 --beta 1 --kappa 1 --L 1 --mode center
//   pgn validate --filter prox

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pgn/cli.hpp"
#include "pgn/kernels.hpp"

namespace {

using namespace pgn;

// Applies `key = value` lines to the options of `cmd` that were not given on
// the command line. Keys are the long option names without dashes.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cli::ConfigError("cannot read config file " + path);
  const std::vector<CLI::ConfigItem> items = CLI::ConfigTOML{}.from_config(in);
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw cli::ConfigError("sections are not supported: " + item.fullname());
    CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw cli::ConfigError("unknown config key '" + item.name + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

kernels::Isa parse_isa(const std::string& s) {
  if (s == "scalar") return kernels::Isa::kScalar;
  if (s == "avx2") return kernels::Isa::kAvx2;
  throw cli::ConfigError("unknown --simd value '" + s + "'");
}

struct SolveArgs {
  std::string case_name;
  int starts = 20;
  std::uint64_t seed = 1;
  std::string x0;
  std::string format = "human";
  std::string output;
  bool trace = false;
  std::string penalty = "box";
  double outer_tol = 1e-12;
  double inner_tol = 1e-12;
  int max_outer = 200;
  int max_inner = 10000;
  double sigma = 0.0;
  double rank_tol = 1e-10;
  int jobs = 1;
  std::string simd = "auto";
  std::string data;
  std::string config;
};

int run_solve(const SolveArgs& a) {
  cli::RunConfig cfg;
  cfg.case_name = a.case_name;
  if (a.starts < 1) throw cli::ConfigError("--starts must be at least 1");
  cfg.starts = a.starts;
  cfg.seed = a.seed;
  if (!a.x0.empty()) cfg.x0 = cli::parse_vector(a.x0);
  cfg.format = cli::parse_format(a.format);
  cfg.include_trace = a.trace;
  if (a.penalty == "box") {
    cfg.penalty = cli::PenaltyChoice::kBox;
  } else if (a.penalty == "none") {
    cfg.penalty = cli::PenaltyChoice::kNone;
  } else {
    throw cli::ConfigError("unknown --penalty value '" + a.penalty + "'");
  }
  if (!(a.outer_tol > 0.0) || !(a.inner_tol > 0.0)) throw cli::ConfigError("tolerances must be positive");
  if (a.max_outer < 1 || a.max_inner < 1) throw cli::ConfigError("iteration limits must be positive");
  cfg.solver.outer_tolerance = a.outer_tol;
  cfg.solver.max_outer = a.max_outer;
  cfg.solver.inner.tolerance = a.inner_tol;
  cfg.solver.inner.max_iterations = a.max_inner;
  if (a.sigma < 0.0) throw cli::ConfigError("--sigma must be positive");
  if (a.sigma > 0.0) cfg.solver.inner.step_rule = prox::FixedStep{a.sigma};
  cfg.solver.rank_tolerance = a.rank_tol;
  cfg.jobs = std::max(1, a.jobs);
  if (!a.data.empty()) cfg.observations = cli::read_observations(a.data);
  if (a.simd != "auto") kernels::set_active(parse_isa(a.simd));

  const cli::BenchmarkReport report = cli::run_benchmark(cfg);
  if (a.output.empty()) {
    cli::write_report(std::cout, report, cfg.format, cfg.include_trace);
  } else {
    std::ofstream out(a.output);
    if (!out) throw cli::ConfigError("cannot write " + a.output);
    cli::write_report(out, report, cfg.format, cfg.include_trace);
  }
  return report.all_converged() ? cli::kExitOk : cli::kExitFailure;
}

struct RadiusArgs {
  double alpha = 0.0;
  double beta = 1.0;
  double kappa = 1.0;
  double l_const = 0.0;
  std::string l_linear;
  std::string l_table;
  std::string mode = "center";
  int samples = 20;
  std::string format = "human";
  std::string config;
};

int run_radius(const RadiusArgs& a, bool have_const) {
  cli::RadiusConfig cfg;
  cfg.constants = {a.alpha, a.beta, a.kappa};
  const int specs = (have_const ? 1 : 0) + (a.l_linear.empty() ? 0 : 1) + (a.l_table.empty() ? 0 : 1);
  if (specs != 1) throw cli::ConfigError("give exactly one of --L, --L-linear, --L-table");
  if (have_const) {
    cfg.average = radius::ConstantL{a.l_const};
  } else if (!a.l_linear.empty()) {
    const Vector c = cli::parse_vector(a.l_linear);
    if (c.size() != 2) throw cli::ConfigError("--L-linear expects 'a,b' for L(u) = a + b u");
    const double c0 = c[0];
    const double c1 = c[1];
    cfg.average = radius::CallableL{[c0, c1](double u) { return c0 + c1 * u; }};
  } else {
    cfg.average = cli::read_lipschitz_table(a.l_table);
  }
  if (a.mode == "center") {
    cfg.mode = radius::LipschitzMode::kCenter;
  } else if (a.mode == "radius") {
    cfg.mode = radius::LipschitzMode::kRadius;
  } else {
    throw cli::ConfigError("unknown --mode value '" + a.mode + "'");
  }
  if (a.samples < 1) throw cli::ConfigError("--samples must be at least 1");
  cfg.samples = a.samples;
  cfg.format = cli::parse_format(a.format);
  try {
    radius::validate(cfg.constants);
    radius::validate(cfg.average);
  } catch (const InvalidArgument& e) {
    throw cli::ConfigError(e.what());
  }
  return cli::run_radius(std::cout, cfg);
}

struct ValidateArgs {
  std::string filter;
  std::vector<std::string> data;
  std::uint64_t seed = cli::ValidateOptions{}.seed;
  std::string config;
};

int run_validate(const ValidateArgs& a) {
  cli::ValidateOptions opts;
  opts.filter = a.filter;
  opts.seed = a.seed;
  for (const std::string& spec : a.data) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw cli::ConfigError("--data expects case=path, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    if (name != "kowalik" && name != "osborne1" && name != "osborne2") {
      throw cli::ConfigError("--data: '" + name + "' has no observation data");
    }
    opts.observations[name] = cli::read_observations(spec.substr(eq + 1));
  }
  return cli::run_validate(std::cout, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal Gauss-Newton solver: benchmarks, convergence radii, self-checks"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "Run the solver on a benchmark case");
  solve->add_option("--case", sa.case_name, "Case name (rosenbrock, kowalik, osborne1, osborne2)");
  solve->add_option("--starts", sa.starts, "Number of random starts in the box");
  solve->add_option("--seed", sa.seed, "Seed for the random starts");
  solve->add_option("--x0", sa.x0, "Explicit start, comma separated (overrides --starts)");
  solve->add_option("--format", sa.format, "json, csv or human");
  solve->add_option("--output", sa.output, "Write the report to this file");
  solve->add_flag("--trace", sa.trace, "Include per-iteration traces in JSON output");
  solve->add_option("--penalty", sa.penalty, "box or none");
  solve->add_option("--outer-tol", sa.outer_tol, "Outer stopping tolerance on ||x+ - x||");
  solve->add_option("--inner-tol", sa.inner_tol, "Inner stopping tolerance");
  solve->add_option("--max-outer", sa.max_outer, "Outer iteration limit");
  solve->add_option("--max-inner", sa.max_inner, "Inner iteration limit");
  solve->add_option("--sigma", sa.sigma, "Fixed inner step (default 1/||H||)");
  solve->add_option("--rank-tol", sa.rank_tol, "Relative rank tolerance for the Jacobian");
  solve->add_option("--jobs", sa.jobs, "Worker threads");
  solve->add_option("--simd", sa.simd, "auto, scalar or avx2");
  solve->add_option("--data", sa.data, "Replacement observation file for data-fit cases");
  solve->add_option("--config", sa.config, "key = value file with defaults for these flags");

  RadiusArgs ra;
  CLI::App* rad = app.add_subcommand("radius", "Convergence radius and contraction constants");
  rad->add_option("--alpha", ra.alpha, "Bound on ||F(x*)||");
  rad->add_option("--beta", ra.beta, "Bound on ||F'(x*)^dagger||");
  rad->add_option("--kappa", ra.kappa, "Bound on the metric condition number");
  CLI::Option* l_opt = rad->add_option("--L", ra.l_const, "Constant Lipschitz average");
  rad->add_option("--L-linear", ra.l_linear, "Linear average 'a,b': L(u) = a + b u");
  rad->add_option("--L-table", ra.l_table, "CSV file of u,L knots (piecewise linear)");
  rad->add_option("--mode", ra.mode, "center or radius");
  rad->add_option("--samples", ra.samples, "Number of (r, q) samples");
  rad->add_option("--format", ra.format, "json or human");
  rad->add_option("--config", ra.config, "key = value file with defaults for these flags");

  ValidateArgs va;
  CLI::App* val = app.add_subcommand("validate", "Run the invariant self-check suite");
  val->add_option("--filter", va.filter, "Only checks whose name contains this text");
  val->add_option("--data", va.data, "Replacement observations, case=path (repeatable)");
  val->add_option("--seed", va.seed, "Seed for the randomized checks");
  val->add_option("--config", va.config, "key = value file with defaults for these flags");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) {
      if (!sa.config.empty()) apply_config_file(*solve, sa.config);
      if (sa.case_name.empty()) throw cli::ConfigError("--case is required");
      return run_solve(sa);
    }
    if (rad->parsed()) {
      if (!ra.config.empty()) apply_config_file(*rad, ra.config);
      return run_radius(ra, l_opt->count() > 0);
    }
    if (!va.config.empty()) apply_config_file(*val, va.config);
    return run_validate(va);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitConfig;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const UnknownProblem& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUnknownProblem;
  } catch (const ExternalDefinitionUnavailable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUnknownProblem;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFailure;
  }
}
