#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "basketsdp/conic_problem.h"

namespace basketsdp::cli {

enum class Command { kBound, kHedge, kOracle, kCheck };

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitArbitrage = 2 };

struct RunConfig {
  Command command = Command::kBound;
  std::string market_path;
  int order = 2;
  Side side = Side::kLower;
  Mode mode = Mode::kCompact;
  bool reduce_squares = true;
  LocalizerSet localizers = LocalizerSet::kFull;
  std::optional<double> beta_override;
  int grid_points = 101;
  double tol = 1e-7;
  std::uint64_t seed = 1;
  int samples = 10000;
  // Report destination; empty writes to the report stream.
  std::string output_path;
  // hedge: where to save the certificate; check: the certificate to read.
  std::string certificate_path;
  std::string dump_index_path;
  std::string dump_matrices_path;
  std::string export_problem_path;
};

Command parse_command(const std::string& text);

// Runs one command. The report (one JSON object per line) goes to the output
// file or to `report`; diagnostics go to `diag`.
int run(const RunConfig& config, std::ostream& report, std::ostream& diag);

}  // namespace basketsdp::cli
