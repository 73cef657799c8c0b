#include <CLI11.hpp>
#include <iostream>

#include "bsreduce_cli/commands.hpp"

namespace cli = bsreduce::cli;

int main(int argc, char** argv) {
  CLI::App app{"Dimension reduction for multi-asset Black-Scholes problems"};
  app.require_subcommand(1);

  cli::Options opts;
  std::string path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", path, "Problem file (JSON object or array of objects)")->required();
    sub->add_flag("--no-meta", opts.no_meta, "Omit the meta block so reports are byte-reproducible");
    sub->add_flag("--csv", opts.csv, "Emit one CSV row per problem instead of JSON");
    sub->add_flag("--from-vols", opts.from_vols, "Read \"vols\" and \"corr\" instead of \"cov\"");
    sub->add_option("--force-alpha", opts.force_alpha,
                    "Override the exponents of the first product step (negative control)")
        ->delimiter(',');
  };
  auto add_numeric = [&](CLI::App* sub) {
    sub->add_option("--paths", opts.paths, "Monte Carlo paths")->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    sub->add_option("--seed", opts.seed, "Monte Carlo seed");
    sub->add_option("--grid", opts.grid, "Finite-difference space intervals and time steps")->check(CLI::Range(50, 100000));
    sub->add_option("--steps", opts.steps, "Time steps for the Vasicek simulation")->check(CLI::Range(64, 1000000));
    sub->add_flag("--antithetic", opts.antithetic, "Antithetic sampling (needs an even path count)");
  };

  auto* reduce = app.add_subcommand("reduce", "Print the reduction plan");
  add_common(reduce);

  auto* price = app.add_subcommand("price", "Price a problem");
  add_common(price);
  add_numeric(price);
  price->add_option("--method", opts.method, "closed, fd or mc")
      ->check(CLI::IsMember({"closed", "fd", "mc"}));

  auto* verify = app.add_subcommand("verify", "Check the reduced price against simulation of the original");
  add_common(verify);
  add_numeric(verify);
  verify->add_option("--tolerance-sigmas", opts.tolerance_sigmas, "Allowed standard errors")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kExitSchema;
  }

  cli::Command cmd = cli::Command::kReduce;
  if (price->parsed()) cmd = cli::Command::kPrice;
  if (verify->parsed()) cmd = cli::Command::kVerify;

  const auto result = cli::run_command_file(cmd, path, opts);
  std::cout << result.out;
  std::cerr << result.err;
  return result.exit_code;
}
