#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bsreduce {

enum class Errc {
  kInvalidInput,
  kNotSymmetric,
  kNotPsd,
  kPayoffNotReducible,
  kNotHomogeneous,
  kSyntaxError,
  kUnknownSymbol,
  kDomainError,
  kNonDifferentiableKink,
  kWeightsNotSimplex,
  kFactorizationFailure,
  kGridTooCoarse,
  kNoClosedForm,
  kNumericFailure,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (notably the CLI) map failures onto exit statuses without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failure in a payoff expression. `offset` is the byte offset into
/// the source text where the parser gave up.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t offset, const std::string& message);

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace bsreduce
