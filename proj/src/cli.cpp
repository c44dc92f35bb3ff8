#include "pgn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pgn/errors.hpp"

namespace pgn::cli {
namespace {

using json = nlohmann::json;

constexpr double kSamplingHalfWidth = 10.0;

double parse_double(std::string_view token, const std::string& context) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) {
    token.remove_prefix(1);
  }
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) {
    token.remove_suffix(1);
  }
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw ConfigError(context + ": cannot parse '" + std::string(token) + "' as a number");
  }
  return value;
}

prox::Penalty make_penalty(const RunConfig& cfg, const problems::CaseInfo& info) {
  if (cfg.penalty == PenaltyChoice::kNone) return prox::ZeroPenalty{};
  return prox::BoxIndicator{info.box};
}

solver::Problem make_problem(const RunConfig& cfg, const problems::BenchmarkCase& bc) {
  if (!cfg.observations) return bc.problem;
  const Vector& y = *cfg.observations;
  try {
    if (cfg.case_name == "kowalik") return problems::kowalik(y);
    if (cfg.case_name == "osborne1") return problems::osborne1(y);
    if (cfg.case_name == "osborne2") return problems::osborne2(y);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("case '" + cfg.case_name + "' has no observation data to replace");
}

StartRecord run_start(const solver::Problem& problem, const prox::Penalty& penalty,
                      const problems::CaseInfo& info, const solver::SolverConfig& scfg, int index,
                      const Vector& x0) {
  StartRecord rec;
  rec.index = index;
  rec.x0 = x0;
  rec.report = solver::solve(problem, penalty, x0, scfg);
  rec.iterations = static_cast<int>(rec.report.trace.size());
  for (const auto& it : rec.report.trace) {
    rec.max_condition = std::max(rec.max_condition, it.jacobian_condition);
  }
  if (info.reference_x) {
    double d = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) {
      d = std::max(d, std::abs(rec.report.final_x[i] - (*info.reference_x)[i]));
    }
    rec.distance_to_reference = d;
  }
  if (const auto* box = std::get_if<prox::BoxIndicator>(&penalty)) {
    const auto xs = solver::iterates(rec.report);
    for (std::size_t k = 1; k < xs.size(); ++k) {
      rec.max_box_violation = std::max(rec.max_box_violation, box->box.max_violation(xs[k]));
    }
  }
  return rec;
}

json vector_json(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

std::string format_vector(std::span<const double> v) {
  std::ostringstream os;
  os << std::setprecision(6) << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "json") return Format::kJson;
  if (text == "csv") return Format::kCsv;
  if (text == "human") return Format::kHuman;
  throw ConfigError("unknown format '" + text + "' (json, csv, human)");
}

double Aggregate::average() const {
  return converged > 0 ? static_cast<double>(iteration_sum) / converged : 0.0;
}

long long Aggregate::rounded_average() const {
  if (converged == 0) return 0;
  // floor(sum / c + 1/2) in integers.
  return (2 * iteration_sum + converged) / (2LL * converged);
}

bool BenchmarkReport::all_converged() const {
  return std::all_of(starts.begin(), starts.end(), [](const StartRecord& s) {
    return s.report.status == solver::SolveStatus::kConverged;
  });
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<Vector> random_starts(const problems::CaseInfo& info, int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("starts must be >= 1");
  std::mt19937_64 rng(seed);
  const std::size_t n = info.box.size();
  Vector lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = info.box.lower()[i];
    hi[i] = info.box.upper()[i];
    const double centre = info.reference_x ? (*info.reference_x)[i]
                          : std::isfinite(lo[i]) ? lo[i]
                          : std::isfinite(hi[i]) ? hi[i]
                                                 : 0.0;
    if (!std::isfinite(lo[i])) lo[i] = std::min(centre, hi[i]) - kSamplingHalfWidth;
    if (!std::isfinite(hi[i])) hi[i] = std::max(centre, lo[i]) + kSamplingHalfWidth;
  }
  std::vector<Vector> starts(static_cast<std::size_t>(count), Vector(n));
  for (auto& x : starts) {
    for (std::size_t i = 0; i < n; ++i) x[i] = lo[i] + uniform01(rng()) * (hi[i] - lo[i]);
  }
  return starts;
}

BenchmarkReport run_benchmark(const RunConfig& cfg) {
  const problems::BenchmarkCase bc = problems::get_case(cfg.case_name);
  const solver::Problem problem = make_problem(cfg, bc);
  const prox::Penalty penalty = make_penalty(cfg, bc.info);

  std::vector<Vector> x0s;
  if (cfg.x0) {
    if (cfg.x0->size() != bc.info.n) {
      throw ConfigError("x0 has " + std::to_string(cfg.x0->size()) + " entries, case '" +
                        cfg.case_name + "' needs " + std::to_string(bc.info.n));
    }
    x0s.push_back(*cfg.x0);
  } else {
    x0s = random_starts(bc.info, cfg.starts, cfg.seed);
  }

  BenchmarkReport report;
  report.case_name = cfg.case_name;
  report.seed = cfg.seed;
  report.outer_tolerance = cfg.solver.outer_tolerance;
  report.inner_tolerance = cfg.solver.inner.tolerance;
  report.starts.resize(x0s.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < x0s.size(); i = next++) {
      report.starts[i] =
          run_start(problem, penalty, bc.info, cfg.solver, static_cast<int>(i), x0s[i]);
    }
  };
  const int jobs = std::clamp(cfg.jobs, 1, static_cast<int>(x0s.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& s : report.starts) {
    report.aggregate.max_condition = std::max(report.aggregate.max_condition, s.max_condition);
    if (s.report.status == solver::SolveStatus::kConverged) {
      ++report.aggregate.converged;
      report.aggregate.iteration_sum += s.iterations;
    }
  }
  return report;
}

void write_json(std::ostream& out, const BenchmarkReport& report, bool include_trace) {
  json starts = json::array();
  for (const auto& s : report.starts) {
    json j;
    j["index"] = s.index;
    j["x0"] = vector_json(s.x0);
    j["status"] = std::string(solver::to_string(s.report.status));
    j["final_x"] = vector_json(s.report.final_x);
    j["iterations"] = s.iterations;
    j["max_condition"] = s.max_condition;
    j["distance_to_reference"] =
        s.distance_to_reference ? json(*s.distance_to_reference) : json(nullptr);
    if (include_trace) {
      json trace = json::array();
      for (const auto& r : s.report.trace) {
        trace.push_back({{"n", r.index},
                         {"x", vector_json(r.x)},
                         {"step_norm", r.step_norm},
                         {"residual_norm", r.residual_norm},
                         {"inner_iterations", r.inner_iterations},
                         {"jacobian_condition", r.jacobian_condition}});
      }
      j["trace"] = std::move(trace);
    }
    starts.push_back(std::move(j));
  }

  const Aggregate& a = report.aggregate;
  json avg = {{"numerator", a.iteration_sum}, {"denominator", a.converged}};
  avg["value"] = a.converged > 0 ? json(a.average()) : json(nullptr);

  json doc;
  doc["meta"] = {{"case", report.case_name},
                 {"seed", report.seed},
                 {"tolerances", {{"outer", report.outer_tolerance},
                                 {"inner", report.inner_tolerance}}}};
  doc["starts"] = std::move(starts);
  doc["aggregate"] = {{"converged", a.converged},
                      {"avg_outer_iterations", std::move(avg)},
                      {"max_condition", a.max_condition}};
  out << doc.dump(2) << '\n';
}

void write_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "n,step_norm,residual_norm,inner_iterations,jacobian_condition\n";
  out << std::setprecision(17);
  for (const auto& s : report.starts) {
    for (const auto& r : s.report.trace) {
      out << r.index << ',' << r.step_norm << ',' << r.residual_norm << ',' << r.inner_iterations
          << ',' << r.jacobian_condition << '\n';
    }
  }
}

void write_human(std::ostream& out, const BenchmarkReport& report) {
  out << "case " << report.case_name << "  seed " << report.seed << "  tolerances outer "
      << report.outer_tolerance << " inner " << report.inner_tolerance << "\n\n";
  out << std::left << std::setw(6) << "start" << std::setw(24) << "status" << std::setw(8)
      << "iters" << std::setw(14) << "max cond" << std::setw(14) << "dist ref"
      << "final x\n";
  for (const auto& s : report.starts) {
    std::ostringstream cond, dist;
    cond << std::setprecision(4) << s.max_condition;
    if (s.distance_to_reference) {
      dist << std::setprecision(3) << std::scientific << *s.distance_to_reference;
    } else {
      dist << "-";
    }
    out << std::left << std::setw(6) << s.index << std::setw(24)
        << solver::to_string(s.report.status) << std::setw(8) << s.iterations << std::setw(14)
        << cond.str() << std::setw(14) << dist.str() << format_vector(s.report.final_x) << '\n';
  }
  const Aggregate& a = report.aggregate;
  out << "\nconverged " << a.converged << "/" << report.starts.size()
      << "  avg outer iterations " << a.rounded_average() << "  max condition "
      << std::setprecision(4) << a.max_condition << '\n';
}

void write_report(std::ostream& out, const BenchmarkReport& report, Format format,
                  bool include_trace) {
  switch (format) {
    case Format::kJson:
      write_json(out, report, include_trace);
      break;
    case Format::kCsv:
      write_csv(out, report);
      break;
    case Format::kHuman:
      write_human(out, report);
      break;
  }
}

Vector parse_vector(const std::string& text) {
  Vector v;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    v.push_back(parse_double(rest.substr(0, comma), "vector"));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return v;
}

Vector read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open observation file '" + path + "'");
  Vector y;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) y.push_back(parse_double(token, path));
  }
  if (y.empty()) throw ConfigError("observation file '" + path + "' has no values");
  return y;
}

radius::TabulatedL read_lipschitz_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Lipschitz table '" + path + "'");
  radius::TabulatedL table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path + ": expected 'u,L' rows");
    if (first && std::isalpha(static_cast<unsigned char>(line[line.find_first_not_of(" \t")]))) {
      first = false;
      continue;
    }
    first = false;
    table.knots.push_back(parse_double(std::string_view(line).substr(0, comma), path));
    table.values.push_back(parse_double(std::string_view(line).substr(comma + 1), path));
  }
  try {
    radius::validate(table);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return table;
}

int run_radius(std::ostream& out, const RadiusConfig& cfg) {
  try {
    radius::validate(cfg.constants);
    radius::validate(cfg.average);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.samples < 1) throw ConfigError("samples must be >= 1");

  const auto& c = cfg.constants;
  const double l0 = radius::evaluate(cfg.average, 0.0);
  const radius::SmallResidual small = radius::check_small_residual(c, l0);
  const bool center = cfg.mode == radius::LipschitzMode::kCenter;
  const auto* constant = std::get_if<radius::ConstantL>(&cfg.average);

  json doc;
  doc["inputs"] = {{"alpha", c.alpha}, {"beta", c.beta}, {"kappa", c.kappa}, {"L0", l0},
                   {"mode", center ? "center" : "radius"}};
  doc["h"] = small.h;
  doc["admissible"] = small.admissible;

  std::vector<std::pair<double, double>> samples;
  if (small.admissible) {
    const double r_upper = radius::upper_radius(c, cfg.average);
    const double r_bar = radius::r_bar_numeric(c, cfg.average, cfg.mode);
    const double rho0 = 0.5 * r_bar;
    const radius::ContractionConstants cc =
        radius::contraction_constants(c, cfg.average, cfg.mode, rho0);
    doc["R_bar"] = std::isfinite(r_upper) ? json(r_upper) : json("inf");
    doc["r_bar"] = r_bar;
    if (constant) {
      const radius::ClosedFormRadius cf = radius::r_bar_closed_form(c, constant->value, cfg.mode);
      doc["r_bar_closed_form"] = cf.closed_form;
      doc["closed_form_discrepancy"] = cf.discrepancy;
    }
    doc["rho0"] = rho0;
    doc["C1"] = cc.c1;
    doc["C2"] = cc.c2;

    const double span = std::min(1.5 * r_bar, r_upper * (1.0 - 1e-9));
    for (int k = 0; k <= cfg.samples; ++k) {
      const double r = span * k / cfg.samples;
      samples.emplace_back(r, radius::q_factor(c, cfg.average, cfg.mode, r));
    }
  }

  if (cfg.format == Format::kJson) {
    json q = json::array();
    for (const auto& [r, v] : samples) q.push_back({r, v});
    doc["q_samples"] = std::move(q);
    out << doc.dump(2) << '\n';
  } else {
    out << std::setprecision(12);
    out << "h = " << small.h << '\n';
    out << "admissible = " << (small.admissible ? "yes" : "no") << '\n';
    if (!small.admissible) {
      out << "condition violated: [(1+sqrt(2))kappa + 1] alpha beta^2 L(0) = " << small.h
          << " >= 1\n";
    } else {
      out << "mode = " << (center ? "center" : "radius") << '\n';
      const double r_upper = doc["R_bar"].is_string() ? INFINITY : doc["R_bar"].get<double>();
      out << "R_bar = " << r_upper << '\n';
      out << "r_bar = " << doc["r_bar"].get<double>() << '\n';
      if (constant) {
        out << "r_bar_closed_form = " << doc["r_bar_closed_form"].get<double>() << '\n';
        out << "closed_form_discrepancy = "
            << (doc["closed_form_discrepancy"].get<bool>() ? "yes" : "no") << '\n';
      }
      out << "rho0 = " << doc["rho0"].get<double>() << '\n';
      out << "C1 = " << doc["C1"].get<double>() << '\n';
      out << "C2 = " << doc["C2"].get<double>() << '\n';
      out << "\nr,q\n";
      for (const auto& [r, v] : samples) out << r << ',' << v << '\n';
    }
  }
  return small.admissible ? kExitOk : kExitConditionViolated;
}

}  // namespace pgn::cli
