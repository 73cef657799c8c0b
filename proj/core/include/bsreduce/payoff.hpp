#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsreduce {

/// Largest number of asset symbols the payoff grammar accepts (S0..S15).
inline constexpr int kMaxAssets = 16;

/// Immutable expression tree for an expiry payoff P(S0, ..., Sn).
///
/// Nodes are shared, so copying a PayoffExpr is cheap and the tree may be
/// used from any number of threads. Exponents are always constants.
class PayoffExpr {
 public:
  enum class Kind { kSymbol, kConst, kAdd, kSub, kMul, kDiv, kPow, kMax, kMin, kNeg };

  /// Default-constructs the constant 0.
  PayoffExpr();

  static PayoffExpr symbol(int index);
  static PayoffExpr constant(double value);
  static PayoffExpr add(PayoffExpr lhs, PayoffExpr rhs);
  static PayoffExpr sub(PayoffExpr lhs, PayoffExpr rhs);
  static PayoffExpr mul(PayoffExpr lhs, PayoffExpr rhs);
  static PayoffExpr div(PayoffExpr lhs, PayoffExpr rhs);
  static PayoffExpr pow(PayoffExpr base, double exponent);
  static PayoffExpr max(std::vector<PayoffExpr> args);
  static PayoffExpr min(std::vector<PayoffExpr> args);
  static PayoffExpr neg(PayoffExpr arg);

  [[nodiscard]] Kind kind() const noexcept;
  /// Symbol index; only meaningful for kSymbol.
  [[nodiscard]] int index() const noexcept;
  /// Constant value for kConst, exponent for kPow.
  [[nodiscard]] double value() const noexcept;
  [[nodiscard]] std::span<const PayoffExpr> children() const noexcept;

  /// Evaluates at asset values `s`. Throws DomainError on division by zero
  /// or a non-finite power.
  [[nodiscard]] double eval(std::span<const double> s) const;

  /// Highest symbol index referenced, or -1 for a constant expression.
  [[nodiscard]] int max_symbol() const noexcept;
  [[nodiscard]] bool references(int index) const noexcept;

  /// Canonical text in the payoff grammar; parse(to_string()) evaluates
  /// identically. Numbers use the shortest round-trip decimal form.
  [[nodiscard]] std::string to_string() const;

  /// Replaces every symbol by `replace(index)`. The result is simplified.
  [[nodiscard]] PayoffExpr substitute(const std::function<PayoffExpr(int)>& replace) const;

  /// Structural equality (exact constants).
  [[nodiscard]] bool same_as(const PayoffExpr& other) const noexcept;

 private:
  struct Node;
  explicit PayoffExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Light algebraic cleanup: folds constant subtrees and drops neutral
/// elements (x*1, x/1, x+0, x-0, x^1, 1^a). Evaluation is unchanged for
/// positive symbol values.
PayoffExpr simplify(const PayoffExpr& expr);

/// Parses the payoff grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' exponent)?
///   primary := number | S<k> | max(expr, expr, ...) | min(...) | '(' expr ')'
///   exponent:= ['-'] number | '(' constant expr ')'
/// Throws ParseError with code SyntaxError or UnknownSymbol.
PayoffExpr parse_payoff(std::string_view text);

/// Convenience wrapper around PayoffExpr::eval with the precondition checks
/// (positive values, enough of them).
double eval_payoff(const PayoffExpr& expr, std::span<const double> s);

}  // namespace bsreduce
