#include "bsreduce/error.hpp"

namespace bsreduce {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidInput: return "InvalidInput";
    case Errc::kNotSymmetric: return "NotSymmetric";
    case Errc::kNotPsd: return "NotPSD";
    case Errc::kPayoffNotReducible: return "PayoffNotReducible";
    case Errc::kNotHomogeneous: return "NotHomogeneous";
    case Errc::kSyntaxError: return "SyntaxError";
    case Errc::kUnknownSymbol: return "UnknownSymbol";
    case Errc::kDomainError: return "DomainError";
    case Errc::kNonDifferentiableKink: return "NonDifferentiableKink";
    case Errc::kWeightsNotSimplex: return "WeightsNotSimplex";
    case Errc::kFactorizationFailure: return "FactorizationFailure";
    case Errc::kGridTooCoarse: return "GridTooCoarse";
    case Errc::kNoClosedForm: return "NoClosedForm";
    case Errc::kNumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ParseError::ParseError(Errc code, std::size_t offset, const std::string& message)
    : Error(code, message + " at offset " + std::to_string(offset)), offset_(offset) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace bsreduce
