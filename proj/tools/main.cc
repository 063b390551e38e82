#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "basketsdp/errors.h"
#include "cli.h"

using basketsdp::cli::RunConfig;

namespace {

struct Flags {
  std::string side = "lower";
  std::string mode = "compact";
  std::string localizers = "full";
  double beta = 0.0;
  bool no_reduce = false;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--market", cfg.market_path, "market JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--output", cfg.output_path,
                  "write the report here instead of standard output");
}

void add_relaxation(CLI::App* cmd, RunConfig& cfg, Flags& flags) {
  cmd->add_option("--order", cfg.order, "relaxation order N")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--side", flags.side, "lower or upper")
      ->capture_default_str()
      ->check(CLI::IsMember({"lower", "upper"}));
  cmd->add_option("--mode", flags.mode, "compact or unbounded")
      ->capture_default_str()
      ->check(CLI::IsMember({"compact", "unbounded"}));
  cmd->add_flag("!--no-reduce-squares,--reduce-squares{true}",
                cfg.reduce_squares,
                "rewrite |u|^2 as u^2 and merge identical baskets")
      ->capture_default_str();
  cmd->add_option("--localizers", flags.localizers,
                  "full (every payoff) or assets (asset coordinates only, lower bounds unbounded)")
      ->capture_default_str()
      ->check(CLI::IsMember({"full", "assets"}));
  cmd->add_option("--beta", flags.beta, "override the compactness radius")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", cfg.tol, "solver tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dump-index", cfg.dump_index_path,
                  "write the moment index listing");
  cmd->add_option("--dump-matrices", cfg.dump_matrices_path,
                  "write the symbolic moment and localizing matrices");
  cmd->add_option("--export-problem", cfg.export_problem_path,
                  "write the conic problem in standard-form text");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static-arbitrage bounds for basket straddles"};
  app.require_subcommand(1);

  RunConfig cfg;
  Flags flags;

  CLI::App* bound = app.add_subcommand("bound", "bound the target straddle price");
  add_common(bound, cfg);
  add_relaxation(bound, cfg, flags);

  CLI::App* hedge =
      app.add_subcommand("hedge", "bound plus the static hedging certificate");
  add_common(hedge, cfg);
  add_relaxation(hedge, cfg, flags);
  hedge->add_option("--certificate", cfg.certificate_path,
                    "also save the certificate to this file");

  CLI::App* oracle =
      app.add_subcommand("oracle", "grid linear-programming bounds");
  add_common(oracle, cfg);
  oracle->add_option("--grid", cfg.grid_points, "grid points per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000));

  CLI::App* check =
      app.add_subcommand("check", "verify a certificate at sampled points");
  add_common(check, cfg);
  check->add_option("--certificate", cfg.certificate_path, "certificate JSON")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--samples", cfg.samples, "number of sample points")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  check->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : basketsdp::cli::kExitError;
  }

  cfg.command = basketsdp::cli::parse_command(app.get_subcommands().front()->get_name());
  cfg.side = basketsdp::parse_side(flags.side);
  cfg.mode = basketsdp::parse_mode(flags.mode);
  cfg.localizers = basketsdp::parse_localizer_set(flags.localizers);
  if (flags.beta > 0.0) cfg.beta_override = flags.beta;

  return basketsdp::cli::run(cfg, std::cout, std::cerr);
}
