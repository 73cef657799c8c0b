#include "bsreduce/payoff.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "bsreduce/error.hpp"

namespace bsreduce {

struct PayoffExpr::Node {
  Kind kind = Kind::kConst;
  int index = -1;
  double value = 0.0;
  std::vector<PayoffExpr> children;
};

namespace {

using Kind = PayoffExpr::Kind;

std::string format_number(double v) {
  std::array<char, 64> buf{};
  // Whole numbers print without an exponent so 1000000 stays readable.
  const bool whole = std::abs(v) < 1e15 && v == std::trunc(v);
  auto [end, ec] = whole ? std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed)
                         : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return {buf.data(), end};
}

int precedence(const PayoffExpr& e) {
  switch (e.kind()) {
    case Kind::kAdd:
    case Kind::kSub: return 1;
    case Kind::kMul:
    case Kind::kDiv: return 2;
    case Kind::kNeg: return 3;
    case Kind::kPow: return 4;
    case Kind::kConst: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    default: return 5;
  }
}

void print(const PayoffExpr& e, std::string& out);

void print_child(const PayoffExpr& e, int required, std::string& out) {
  const bool parens = precedence(e) < required;
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const PayoffExpr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::kSymbol:
      out += 'S';
      out += std::to_string(e.index());
      return;
    case Kind::kConst:
      out += format_number(e.value());
      return;
    case Kind::kAdd:
    case Kind::kSub:
    case Kind::kMul:
    case Kind::kDiv: {
      const int p = precedence(e);
      print_child(e.children()[0], p, out);
      switch (e.kind()) {
        case Kind::kAdd: out += " + "; break;
        case Kind::kSub: out += " - "; break;
        case Kind::kMul: out += " * "; break;
        default: out += " / "; break;
      }
      print_child(e.children()[1], p + 1, out);
      return;
    }
    case Kind::kNeg:
      out += '-';
      print_child(e.children()[0], 3, out);
      return;
    case Kind::kPow: {
      print_child(e.children()[0], 5, out);
      out += '^';
      const std::string exponent = format_number(e.value());
      if (e.value() < 0.0) {
        out += '(' + exponent + ')';
      } else {
        out += exponent;
      }
      return;
    }
    case Kind::kMax:
    case Kind::kMin: {
      out += e.kind() == Kind::kMax ? "max(" : "min(";
      bool first = true;
      for (const auto& c : e.children()) {
        if (!first) out += ", ";
        first = false;
        print(c, out);
      }
      out += ')';
      return;
    }
  }
}

bool is_const(const PayoffExpr& e, double v) {
  return e.kind() == Kind::kConst && e.value() == v;
}

bool all_const(std::span<const PayoffExpr> children) {
  return std::all_of(children.begin(), children.end(),
                     [](const PayoffExpr& c) { return c.kind() == Kind::kConst; });
}

}  // namespace

PayoffExpr::PayoffExpr() : node_(std::make_shared<Node>()) {}

PayoffExpr::PayoffExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

PayoffExpr PayoffExpr::symbol(int index) {
  if (index < 0 || index >= kMaxAssets) {
    fail(Errc::kUnknownSymbol, "symbol index " + std::to_string(index) + " out of range");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::kSymbol;
  n->index = index;
  return PayoffExpr(std::move(n));
}

PayoffExpr PayoffExpr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kConst;
  n->value = value;
  return PayoffExpr(std::move(n));
}

#define BSREDUCE_BINARY(name, kind_value)                       \
  PayoffExpr PayoffExpr::name(PayoffExpr lhs, PayoffExpr rhs) { \
    auto n = std::make_shared<Node>();                          \
    n->kind = kind_value;                                       \
    n->children = {std::move(lhs), std::move(rhs)};             \
    return PayoffExpr(std::move(n));                            \
  }

BSREDUCE_BINARY(add, Kind::kAdd)
BSREDUCE_BINARY(sub, Kind::kSub)
BSREDUCE_BINARY(mul, Kind::kMul)
BSREDUCE_BINARY(div, Kind::kDiv)

#undef BSREDUCE_BINARY

PayoffExpr PayoffExpr::pow(PayoffExpr base, double exponent) {
  if (!std::isfinite(exponent)) fail(Errc::kInvalidInput, "non-finite exponent");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kPow;
  n->value = exponent;
  n->children = {std::move(base)};
  return PayoffExpr(std::move(n));
}

PayoffExpr PayoffExpr::max(std::vector<PayoffExpr> args) {
  if (args.size() < 2) fail(Errc::kInvalidInput, "max needs at least two arguments");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kMax;
  n->children = std::move(args);
  return PayoffExpr(std::move(n));
}

PayoffExpr PayoffExpr::min(std::vector<PayoffExpr> args) {
  if (args.size() < 2) fail(Errc::kInvalidInput, "min needs at least two arguments");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kMin;
  n->children = std::move(args);
  return PayoffExpr(std::move(n));
}

PayoffExpr PayoffExpr::neg(PayoffExpr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kNeg;
  n->children = {std::move(arg)};
  return PayoffExpr(std::move(n));
}

PayoffExpr::Kind PayoffExpr::kind() const noexcept { return node_->kind; }
int PayoffExpr::index() const noexcept { return node_->index; }
double PayoffExpr::value() const noexcept { return node_->value; }
std::span<const PayoffExpr> PayoffExpr::children() const noexcept { return node_->children; }

double PayoffExpr::eval(std::span<const double> s) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::kSymbol:
      return s[static_cast<std::size_t>(n.index)];
    case Kind::kConst:
      return n.value;
    case Kind::kAdd:
      return n.children[0].eval(s) + n.children[1].eval(s);
    case Kind::kSub:
      return n.children[0].eval(s) - n.children[1].eval(s);
    case Kind::kMul:
      return n.children[0].eval(s) * n.children[1].eval(s);
    case Kind::kDiv: {
      const double den = n.children[1].eval(s);
      if (den == 0.0) fail(Errc::kDomainError, "division by zero");
      return n.children[0].eval(s) / den;
    }
    case Kind::kPow: {
      const double base = n.children[0].eval(s);
      const double r = std::pow(base, n.value);
      if (!std::isfinite(r)) {
        fail(Errc::kDomainError, "power " + format_number(base) + "^" + format_number(n.value) +
                                     " is not finite");
      }
      return r;
    }
    case Kind::kNeg:
      return -n.children[0].eval(s);
    case Kind::kMax: {
      double r = -std::numeric_limits<double>::infinity();
      for (const auto& c : n.children) r = std::max(r, c.eval(s));
      return r;
    }
    case Kind::kMin: {
      double r = std::numeric_limits<double>::infinity();
      for (const auto& c : n.children) r = std::min(r, c.eval(s));
      return r;
    }
  }
  return 0.0;
}

int PayoffExpr::max_symbol() const noexcept {
  if (node_->kind == Kind::kSymbol) return node_->index;
  int m = -1;
  for (const auto& c : node_->children) m = std::max(m, c.max_symbol());
  return m;
}

bool PayoffExpr::references(int index) const noexcept {
  if (node_->kind == Kind::kSymbol) return node_->index == index;
  return std::any_of(node_->children.begin(), node_->children.end(),
                     [index](const PayoffExpr& c) { return c.references(index); });
}

std::string PayoffExpr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

PayoffExpr PayoffExpr::substitute(const std::function<PayoffExpr(int)>& replace) const {
  const auto& n = *node_;
  if (n.kind == Kind::kSymbol) return replace(n.index);
  if (n.kind == Kind::kConst) return *this;
  auto copy = std::make_shared<Node>(n);
  for (auto& c : copy->children) c = c.substitute(replace);
  return simplify(PayoffExpr(std::move(copy)));
}

bool PayoffExpr::same_as(const PayoffExpr& other) const noexcept {
  if (node_ == other.node_) return true;
  const auto& a = *node_;
  const auto& b = *other.node_;
  if (a.kind != b.kind || a.index != b.index || a.value != b.value ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!a.children[i].same_as(b.children[i])) return false;
  }
  return true;
}

PayoffExpr simplify(const PayoffExpr& expr) {
  const Kind kind = expr.kind();
  if (kind == Kind::kSymbol || kind == Kind::kConst) return expr;

  std::vector<PayoffExpr> kids;
  kids.reserve(expr.children().size());
  bool changed = false;
  for (const auto& c : expr.children()) {
    kids.push_back(simplify(c));
    changed = changed || !kids.back().same_as(c);
  }

  if (all_const(kids)) {
    const auto folded = [&] {
      switch (kind) {
        case Kind::kAdd: return PayoffExpr::add(kids[0], kids[1]);
        case Kind::kSub: return PayoffExpr::sub(kids[0], kids[1]);
        case Kind::kMul: return PayoffExpr::mul(kids[0], kids[1]);
        case Kind::kDiv: return PayoffExpr::div(kids[0], kids[1]);
        case Kind::kPow: return PayoffExpr::pow(kids[0], expr.value());
        case Kind::kNeg: return PayoffExpr::neg(kids[0]);
        case Kind::kMax: return PayoffExpr::max(kids);
        default: return PayoffExpr::min(kids);
      }
    }();
    try {
      const double v = folded.eval({});
      if (std::isfinite(v)) return PayoffExpr::constant(v);
    } catch (const Error&) {
      // Leave the failing subtree in place so evaluation reports it.
    }
    return folded;
  }

  switch (kind) {
    case Kind::kAdd:
      if (is_const(kids[1], 0.0)) return kids[0];
      if (is_const(kids[0], 0.0)) return kids[1];
      return changed ? PayoffExpr::add(kids[0], kids[1]) : expr;
    case Kind::kSub:
      if (is_const(kids[1], 0.0)) return kids[0];
      if (is_const(kids[0], 0.0)) return simplify(PayoffExpr::neg(kids[1]));
      return changed ? PayoffExpr::sub(kids[0], kids[1]) : expr;
    case Kind::kMul:
      if (is_const(kids[1], 1.0)) return kids[0];
      if (is_const(kids[0], 1.0)) return kids[1];
      return changed ? PayoffExpr::mul(kids[0], kids[1]) : expr;
    case Kind::kDiv:
      if (is_const(kids[1], 1.0)) return kids[0];
      return changed ? PayoffExpr::div(kids[0], kids[1]) : expr;
    case Kind::kPow: {
      const double e = expr.value();
      if (e == 1.0) return kids[0];
      // Symbols are strictly positive, so (S^a)^b == S^(a*b).
      if (kids[0].kind() == Kind::kPow && kids[0].children()[0].kind() == Kind::kSymbol) {
        const double combined = kids[0].value() * e;
        return combined == 1.0 ? kids[0].children()[0]
                               : PayoffExpr::pow(kids[0].children()[0], combined);
      }
      return changed ? PayoffExpr::pow(kids[0], e) : expr;
    }
    case Kind::kNeg:
      if (kids[0].kind() == Kind::kNeg) return kids[0].children()[0];
      return changed ? PayoffExpr::neg(kids[0]) : expr;
    case Kind::kMax:
      return changed ? PayoffExpr::max(kids) : expr;
    case Kind::kMin:
      return changed ? PayoffExpr::min(kids) : expr;
    default:
      return expr;
  }
}

double eval_payoff(const PayoffExpr& expr, std::span<const double> s) {
  if (static_cast<int>(s.size()) < expr.max_symbol() + 1) {
    fail(Errc::kInvalidInput, "payoff references S" + std::to_string(expr.max_symbol()) +
                                  " but only " + std::to_string(s.size()) + " values given");
  }
  for (double v : s) {
    if (!(v > 0.0)) fail(Errc::kInvalidInput, "asset values must be strictly positive");
  }
  return expr.eval(s);
}

}  // namespace bsreduce
