#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bsreduce/problem.hpp"
#include "bsreduce/vasicek.hpp"

namespace bsreduce::cli {

/// Malformed or inconsistent problem file. `pointer` is a JSON pointer to the
/// offending value ("" for the document root).
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& message);

  [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

struct GbmFile {
  BlackScholesProblem problem;
  std::vector<double> spots;
  std::string payoff_source;
};

struct VasicekFile {
  VasicekFxParams params;
  VasicekState state;
};

struct ProblemFile {
  std::string name;
  std::variant<GbmFile, VasicekFile> body;

  [[nodiscard]] bool is_vasicek() const noexcept { return body.index() == 1; }
};

struct ParseOptions {
  /// Accept "vols" and "corr" in place of "cov".
  bool from_vols = false;
};

/// One problem object. `base` prefixes reported pointers (for batch files).
/// Throws SchemaError, or ParseError for a bad payoff string.
ProblemFile parse_problem(const nlohmann::json& j, const ParseOptions& opts = {},
                          const std::string& base = "");

/// A document holding one problem object or an array of them.
std::vector<ProblemFile> parse_problem_document(const nlohmann::json& j, const ParseOptions& opts = {});

/// Reads and parses JSON text; syntax errors become SchemaError with the
/// line and column in the message.
nlohmann::json read_json_text(const std::string& text);

}  // namespace bsreduce::cli
