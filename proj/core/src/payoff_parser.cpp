#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "bsreduce/error.hpp"
#include "bsreduce/payoff.hpp"

namespace bsreduce {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PayoffExpr parse() {
    PayoffExpr e = expr();
    skip_ws();
    if (pos_ != text_.size()) syntax("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void syntax(const std::string& message) const {
    throw ParseError(Errc::kSyntaxError, pos_, message);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      syntax(pos_ < text_.size() ? "expected '" + std::string(1, c) + "'"
                                 : "unexpected end of input, expected '" + std::string(1, c) + "'");
    }
  }

  PayoffExpr expr() {
    PayoffExpr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = PayoffExpr::add(lhs, term());
      } else if (accept('-')) {
        lhs = PayoffExpr::sub(lhs, term());
      } else {
        return lhs;
      }
    }
  }

  PayoffExpr term() {
    PayoffExpr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = PayoffExpr::mul(lhs, unary());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        PayoffExpr rhs = unary();
        if (rhs.kind() == PayoffExpr::Kind::kConst && rhs.value() == 0.0) {
          throw ParseError(Errc::kSyntaxError, at, "division by the constant 0");
        }
        lhs = PayoffExpr::div(lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  PayoffExpr unary() {
    if (accept('-')) return PayoffExpr::neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  PayoffExpr power() {
    PayoffExpr base = primary();
    if (accept('^')) return PayoffExpr::pow(base, exponent());
    return base;
  }

  double exponent() {
    skip_ws();
    if (accept('(')) {
      const std::size_t at = pos_;
      PayoffExpr e = expr();
      expect(')');
      if (e.max_symbol() >= 0) {
        throw ParseError(Errc::kSyntaxError, at, "exponent must be a constant");
      }
      double v = 0.0;
      try {
        v = e.eval({});
      } catch (const Error&) {
        throw ParseError(Errc::kSyntaxError, at, "exponent is not a finite constant");
      }
      if (!std::isfinite(v)) throw ParseError(Errc::kSyntaxError, at, "exponent is not finite");
      return v;
    }
    double sign = 1.0;
    if (accept('-')) {
      sign = -1.0;
    } else {
      accept('+');
    }
    skip_ws();
    if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                  text_[pos_] == '.')) {
      syntax("exponent must be a numeric literal");
    }
    return sign * number();
  }

  double number() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc{} || ptr == text_.data() + start) syntax("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (!std::isfinite(v)) {
      throw ParseError(Errc::kSyntaxError, start, "number out of range");
    }
    return v;
  }

  PayoffExpr primary() {
    skip_ws();
    if (pos_ >= text_.size()) syntax("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return PayoffExpr::constant(number());
    }
    if (c == '(') {
      ++pos_;
      PayoffExpr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "max" || ident == "min") return call(ident == "max", start);
      return symbol(ident, start);
    }
    syntax("unexpected '" + std::string(1, c) + "'");
  }

  PayoffExpr call(bool is_max, std::size_t start) {
    expect('(');
    std::vector<PayoffExpr> args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    if (args.size() < 2) {
      throw ParseError(Errc::kSyntaxError, start,
                       std::string(is_max ? "max" : "min") + " needs at least two arguments");
    }
    return is_max ? PayoffExpr::max(std::move(args)) : PayoffExpr::min(std::move(args));
  }

  static PayoffExpr symbol(std::string_view ident, std::size_t start) {
    if (ident.size() >= 2 && ident[0] == 'S') {
      int index = -1;
      const auto digits = ident.substr(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      const bool canonical = digits.size() == 1 || digits[0] != '0';
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && canonical && index >= 0 &&
          index < kMaxAssets) {
        return PayoffExpr::symbol(index);
      }
    }
    throw ParseError(Errc::kUnknownSymbol, start, "unknown symbol '" + std::string(ident) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

PayoffExpr parse_payoff(std::string_view text) { return Parser(text).parse(); }

}  // namespace bsreduce
