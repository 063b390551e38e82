#include "cli.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "basketsdp/errors.h"
#include "basketsdp/hedging.h"
#include "basketsdp/market.h"
#include "basketsdp/moments.h"
#include "basketsdp/oracle.h"
#include "basketsdp/relaxation.h"

namespace basketsdp::cli {

namespace {

using nlohmann::json;

constexpr int kReportDigits = 12;

// Replication residual and slack limits used by `check`, matching the
// sampling tolerances the certificate is held to.
constexpr double kCheckResidual = 1e-5;
constexpr double kCheckSlack = 1e-5;

double round_significant(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", kReportDigits, v);
  return std::strtod(buf, nullptr);
}

void round_numbers(json& j) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::kBound:
      return "bound";
    case Command::kHedge:
      return "hedge";
    case Command::kOracle:
      return "oracle";
    case Command::kCheck:
      return "check";
  }
  return "?";
}

std::string_view violation_kind(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kStructure:
      return "structure";
    case Violation::Kind::kNegativePrice:
      return "negative_price";
    case Violation::Kind::kForwardOutsideBox:
      return "forward_outside_box";
    case Violation::Kind::kJensenFloor:
      return "jensen_floor";
    case Violation::Kind::kAboveBoxMax:
      return "above_box_max";
  }
  return "?";
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& diag) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(diag);
  auto log = std::make_shared<spdlog::logger>("basketsdp", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BASKETSDP_LOG")) {
    log->set_level(spdlog::level::from_str(env));
  }
  return log;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Forwards the solver's iteration log when tracing is on.
class LoggedSolver : public SolverBackend {
 public:
  LoggedSolver(bool verbose) : verbose_(verbose) {}
  std::string name() const override { return inner_.name(); }
  ConicSolution solve(const StandardForm& problem,
                      const SolverOptions& options) const override {
    SolverOptions o = options;
    o.verbose = verbose_;
    return inner_.solve(problem, o);
  }

 private:
  InteriorPointSolver inner_;
  bool verbose_;
};

json residuals_json(const Residuals& r) {
  return {{"primal_eq", r.primal_eq},
          {"dual", r.dual},
          {"gap", r.gap},
          {"min_slack_eig", r.min_slack_eig}};
}

class Runner {
 public:
  Runner(const RunConfig& config, std::ostream& diag)
      : cfg_(config), diag_(diag), log_(make_logger(diag)) {}

  int run(json& report) {
    report["command"] = std::string(command_name(cfg_.command));
    market_ = load_market(cfg_.market_path);
    if (cfg_.beta_override) market_.beta_override = cfg_.beta_override;
    log_->info("market '{}': {} assets, {} priced baskets", cfg_.market_path,
               market_.num_assets(), market_.num_priced());

    const std::vector<Violation> violations = validate(market_);
    if (!violations.empty()) return reject(violations, report);

    switch (cfg_.command) {
      case Command::kBound:
        return bound(report, false);
      case Command::kHedge:
        return bound(report, true);
      case Command::kOracle:
        return oracle(report);
      case Command::kCheck:
        return check(report);
    }
    return kExitError;
  }

 private:
  int reject(const std::vector<Violation>& violations, json& report) {
    bool arbitrage = true;
    json list = json::array();
    for (const Violation& v : violations) {
      arbitrage = arbitrage && v.is_arbitrage();
      list.push_back({{"kind", std::string(violation_kind(v.kind))},
                      {"basket", v.basket},
                      {"message", v.message}});
      diag_ << "invalid market: " << v.message << '\n';
    }
    report["status"] = arbitrage ? "arbitrage" : "invalid_market";
    report["violations"] = std::move(list);
    return arbitrage ? kExitArbitrage : kExitError;
  }

  RelaxationSpec relaxation() const {
    RelaxationSpec spec;
    spec.order = cfg_.order;
    spec.mode = cfg_.mode;
    spec.side = cfg_.side;
    spec.reduce_squares = cfg_.reduce_squares;
    spec.localizers = cfg_.localizers;
    return spec;
  }

  void write_dumps(const ConicProblem& p) const {
    const PayoffSemigroup sg(market_, cfg_.reduce_squares);
    if (!cfg_.dump_index_path.empty()) {
      write_file(cfg_.dump_index_path, dump_index(p.index, sg.layout()));
    }
    if (!cfg_.dump_matrices_path.empty()) {
      std::string text;
      for (const SymbolicMatrix& m : p.psd_blocks) {
        text += dump_matrix(m, p.index, sg.layout());
      }
      write_file(cfg_.dump_matrices_path, text);
    }
    if (!cfg_.export_problem_path.empty()) {
      write_file(cfg_.export_problem_path, export_problem(p));
    }
  }

  int bound(json& report, bool hedge) {
    const RelaxationSpec spec = relaxation();
    report["side"] = std::string(to_string(spec.side));
    report["order"] = spec.order;
    report["mode"] = std::string(to_string(spec.mode));

    const ConicProblem problem = assemble(market_, spec);
    log_->info("order {}: {} moments, {} blocks, {} equalities", spec.order,
               problem.num_vars, problem.psd_blocks.size(),
               problem.equalities.size());
    write_dumps(problem);

    const LoggedSolver solver(log_->should_log(spdlog::level::trace));
    const BoundResult result = solve_bound(problem, solver, cfg_.tol);
    report["status"] = std::string(to_string(result.status));
    report["value"] = result.value;
    report["iterations"] = result.dual.iterations;
    report["solver_residuals"] = residuals_json(result.dual.residuals);

    switch (result.status) {
      case SolveStatus::kOptimal:
        break;
      case SolveStatus::kPrimalInfeasible:
        diag_ << "static arbitrage detected at order " << spec.order
              << ": no measure reproduces the quoted prices\n";
        return kExitArbitrage;
      case SolveStatus::kDualInfeasible:
        diag_ << "relaxation is unbounded at order " << spec.order << '\n';
        return kExitError;
      case SolveStatus::kInaccurate:
        diag_ << "solver stopped before reaching tolerance " << cfg_.tol
              << " (primal " << result.dual.residuals.primal_eq << ", dual "
              << result.dual.residuals.dual << ")\n";
        return kExitError;
    }
    if (!hedge) return kExitOk;

    const HedgeCertificate cert = extract(problem, result.dual, cfg_.tol);
    const std::string text = certificate_to_json(cert);
    if (!cfg_.certificate_path.empty()) write_file(cfg_.certificate_path, text);
    report["certificate"] = json::parse(text);
    return kExitOk;
  }

  int oracle(json& report) {
    report["grid_points_per_axis"] = cfg_.grid_points;
    report["jensen_floor"] = jensen_floor(market_);
    const InteriorPointSolver solver;
    try {
      const LpBounds lp = lp_bounds(market_, {cfg_.grid_points}, solver);
      report["status"] = "optimal";
      report["lp_min"] = lp.min;
      report["lp_max"] = lp.max;
      report["grid_points"] = lp.grid_points;
      report["eps_grid"] = lp.eps_grid;
    } catch (const GridInfeasible& e) {
      report["status"] = "grid_infeasible";
      diag_ << e.what() << '\n';
      return kExitArbitrage;
    }
    return kExitOk;
  }

  int check(json& report) {
    if (cfg_.certificate_path.empty()) {
      throw Error("check needs --certificate");
    }
    const HedgeCertificate cert =
        certificate_from_json(read_file(cfg_.certificate_path));
    if (cert.num_assets != market_.num_assets() ||
        cert.num_priced != market_.num_priced()) {
      throw DimensionMismatch("certificate does not match the market");
    }
    const CheckReport r =
        check_certificate(cert, market_, cfg_.samples, cfg_.seed);
    const double scale = 1.0 + std::pow(cert.beta, 2 * cert.order);
    const bool ok = r.max_residual <= kCheckResidual * scale &&
                    r.min_slack >= -kCheckSlack;
    report["side"] = std::string(to_string(cert.side));
    report["order"] = cert.order;
    report["bound"] = cert.bound;
    report["samples"] = r.samples;
    report["max_residual"] = r.max_residual;
    report["min_slack"] = r.min_slack;
    report["min_sos"] = r.min_sos;
    report["status"] = ok ? "valid" : "invalid";
    if (!ok) {
      diag_ << "certificate fails the replication check (residual "
            << r.max_residual << ", slack " << r.min_slack << ")\n";
    }
    return ok ? kExitOk : kExitError;
  }

  const RunConfig& cfg_;
  std::ostream& diag_;
  std::shared_ptr<spdlog::logger> log_;
  MarketSpec market_;
};

}  // namespace

Command parse_command(const std::string& text) {
  if (text == "bound") return Command::kBound;
  if (text == "hedge") return Command::kHedge;
  if (text == "oracle") return Command::kOracle;
  if (text == "check") return Command::kCheck;
  throw ParseError("unknown command '" + text + "'");
}

int run(const RunConfig& config, std::ostream& report, std::ostream& diag) {
  json doc;
  int code = kExitError;
  try {
    code = Runner(config, diag).run(doc);
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    doc["command"] = std::string(command_name(config.command));
    doc["status"] = "error";
    doc["error"] = e.what();
    code = kExitError;
  }
  round_numbers(doc);
  const std::string line = doc.dump() + '\n';
  if (config.output_path.empty()) {
    report << line;
  } else {
    try {
      write_file(config.output_path, line);
    } catch (const std::exception& e) {
      diag << "error: " << e.what() << '\n';
      return kExitError;
    }
  }
  return code;
}

}  // namespace basketsdp::cli
