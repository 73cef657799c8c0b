#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "bsreduce/error.hpp"
#include "bsreduce/payoff.hpp"
#include "oracles.hpp"

namespace bsreduce {
namespace {

using testing::rel_err;

TEST(ParsePayoff, CallOnProductTree) {
  const auto e = parse_payoff("max(S0*S1 - 100, 0)");
  ASSERT_EQ(e.kind(), PayoffExpr::Kind::kMax);
  ASSERT_EQ(e.children().size(), 2u);
  const auto& sub = e.children()[0];
  ASSERT_EQ(sub.kind(), PayoffExpr::Kind::kSub);
  EXPECT_EQ(sub.children()[0].kind(), PayoffExpr::Kind::kMul);
  EXPECT_EQ(sub.children()[0].children()[0].index(), 0);
  EXPECT_EQ(sub.children()[0].children()[1].index(), 1);
  EXPECT_EQ(sub.children()[1].value(), 100.0);
  EXPECT_EQ(e.children()[1].kind(), PayoffExpr::Kind::kConst);
}

TEST(ParsePayoff, PowersBindTighterThanProducts) {
  const auto e = parse_payoff("S0^0.5 * S1^0.5");
  ASSERT_EQ(e.kind(), PayoffExpr::Kind::kMul);
  for (const auto& c : e.children()) {
    EXPECT_EQ(c.kind(), PayoffExpr::Kind::kPow);
    EXPECT_EQ(c.value(), 0.5);
  }
}

TEST(ParsePayoff, TruncatedInputReportsOffset) {
  try {
    (void)parse_payoff("max(S0,");
    FAIL() << "expected a syntax error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::kSyntaxError);
    EXPECT_EQ(e.offset(), 7u);
  }
}

TEST(ParsePayoff, UnknownSymbolAndBadArity) {
  try {
    (void)parse_payoff("S0 + X1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownSymbol);
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW((void)parse_payoff("S16"), ParseError);
  EXPECT_THROW((void)parse_payoff("max(S0)"), ParseError);
  EXPECT_THROW((void)parse_payoff("S0 / 0"), ParseError);
  EXPECT_THROW((void)parse_payoff("S0 ^ S1"), ParseError);
  EXPECT_THROW((void)parse_payoff("(S0"), ParseError);
  EXPECT_THROW((void)parse_payoff(""), ParseError);
}

TEST(ParsePayoff, WhitespaceInsensitive) {
  const auto a = parse_payoff("max(S0*S1-100,0)");
  const auto b = parse_payoff("  max ( S0 * S1 -  100 ,\t0 )\n");
  EXPECT_TRUE(a.same_as(b));
}

TEST(EvalPayoff, Examples) {
  const auto call = parse_payoff("max(S0*S1 - 100, 0)");
  const std::vector<double> a{10, 20};
  const std::vector<double> b{5, 10};
  EXPECT_EQ(eval_payoff(call, a), 100.0);
  EXPECT_EQ(eval_payoff(call, b), 0.0);
  const std::vector<double> c{3, 7};
  EXPECT_EQ(eval_payoff(parse_payoff("max(S0, S1)"), c), 7.0);
  EXPECT_EQ(eval_payoff(parse_payoff("min(S0, S1, 5)"), c), 3.0);
  EXPECT_EQ(eval_payoff(parse_payoff("-S0 + 2*S1^2"), c), 95.0);
}

TEST(EvalPayoff, DomainAndPreconditionErrors) {
  const auto e = parse_payoff("S0 / (S1 - 2)");
  const std::vector<double> s{1, 2};
  try {
    (void)eval_payoff(e, s);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kDomainError);
  }
  const std::vector<double> short_s{1};
  EXPECT_THROW((void)eval_payoff(e, short_s), Error);
  const std::vector<double> negative{-1, 3};
  EXPECT_THROW((void)eval_payoff(e, negative), Error);
}

// Printing then re-parsing must not change the value anywhere.
TEST(PayoffText, RoundTripEvaluatesIdentically) {
  const std::vector<std::string> sources{
      "max(S0*S1 - 100, 0)",
      "S0^0.5 * S1^0.5",
      "max(S0, S1, S2)",
      "S0 + max(S1 - 3.25, 0) * S2^2",
      "-(S0 - S1) / (S2 + 1e-3)",
      "min(S0^-1.5, S1^(1/3)) - 0.1*S2",
      "max(S0*S1*S2 - 1, 0)",
      "S0 - (S1 - S2)",
      "S0 / (S1 / S2)",
      "(S0 + S1)^2.5",
      "-S0^2",
      "(-S0)^2"};
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (const auto& src : sources) {
    const auto e = parse_payoff(src);
    const auto again = parse_payoff(e.to_string());
    for (int k = 0; k < 200; ++k) {
      const std::vector<double> s{u(gen), u(gen), u(gen)};
      const double x = e.eval(s);
      const double y = again.eval(s);
      EXPECT_LE(rel_err(x, y), 1e-15) << src << " -> " << e.to_string();
    }
  }
}

TEST(PayoffText, PrecedenceIsPreserved) {
  const std::vector<double> s{2, 3, 4};
  EXPECT_EQ(parse_payoff("S0 - S1 - S2").eval(s), -5.0);
  EXPECT_EQ(parse_payoff("S0 - (S1 - S2)").eval(s), 3.0);
  EXPECT_DOUBLE_EQ(parse_payoff("S2 / S0 / S0").eval(s), 1.0);
  EXPECT_EQ(parse_payoff("-S0^2").eval(s), -4.0);
  EXPECT_EQ(parse_payoff("S0^-1").eval(s), 0.5);
}

TEST(PayoffExpr, SubstituteAndSimplify) {
  const auto e = parse_payoff("max(S0*S1 - 100, 0)");
  const auto f = e.substitute([](int i) {
    return i == 0 ? PayoffExpr::symbol(0) : PayoffExpr::constant(1.0);
  });
  EXPECT_EQ(f.to_string(), "max(S0 - 100, 0)");
  EXPECT_EQ(e.max_symbol(), 1);
  EXPECT_TRUE(e.references(1));
  EXPECT_FALSE(f.references(1));
  EXPECT_EQ(simplify(parse_payoff("(S0^2)^0.5 * 1 + 0")).to_string(), "S0");
}

}  // namespace
}  // namespace bsreduce
