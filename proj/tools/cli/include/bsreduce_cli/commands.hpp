#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "bsreduce_cli/problem_file.hpp"

namespace bsreduce::cli {

enum class Command { kReduce, kPrice, kVerify };

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFail = 1,
  kExitSchema = 2,
  kExitPayoffParse = 3,
  kExitNoClosedForm = 4,
  kExitNumeric = 5,
};

struct Options {
  /// closed, fd or mc (price only).
  std::string method = "closed";
  std::int64_t paths = 200000;
  std::uint64_t seed = 1;
  /// Space intervals and time steps of the finite-difference grid.
  int grid = 400;
  /// Time steps for the Vasicek simulation.
  int steps = 256;
  bool antithetic = false;
  double tolerance_sigmas = 3.0;
  bool no_meta = false;
  bool csv = false;
  bool from_vols = false;
  std::vector<double> force_alpha;
};

struct CommandResult {
  int exit_code = kExitOk;
  /// What the tool writes to stdout (JSON or CSV) and stderr.
  std::string out;
  std::string err;
  nlohmann::json report;
};

nlohmann::json reduce_report(const ProblemFile& file, const Options& opts);
nlohmann::json price_report(const ProblemFile& file, const Options& opts);
/// Carries "verdict": "PASS" or "FAIL".
nlohmann::json verify_report(const ProblemFile& file, const Options& opts);

/// Runs a command over JSON text holding one problem or an array of them.
/// Never throws; failures are reported through exit_code and err.
CommandResult run_command(Command cmd, const std::string& text, const Options& opts);

/// Same, reading the problem document from `path`.
CommandResult run_command_file(Command cmd, const std::string& path, const Options& opts);

}  // namespace bsreduce::cli
