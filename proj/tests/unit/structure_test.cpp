#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bsreduce/error.hpp"
#include "bsreduce/payoff.hpp"
#include "bsreduce/structure.hpp"
#include "oracles.hpp"

namespace bsreduce {
namespace {

using testing::rel_err;

ProbeConfig around(std::vector<double> center) {
  ProbeConfig cfg;
  cfg.center = std::move(center);
  return cfg;
}

TEST(DetectGroupStructure, ProductCallPair) {
  const auto p = parse_payoff("max(S0*S1*S2 - 1000, 0)");
  const std::vector<int> cand{0, 1};
  const auto found = detect_group_structure(p, 3, cand, around({10, 10, 10}));
  ASSERT_TRUE(found.has_value());
  EXPECT_EQ(found->alphas, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(found->residual.to_string(), "max(S0 * S1 - 1000, 0)");
}

TEST(DetectGroupStructure, AdditiveIsRejected) {
  const auto p = parse_payoff("S0 + S1");
  const std::vector<int> cand{0, 1};
  EXPECT_FALSE(detect_group_structure(p, 2, cand).has_value());
}

TEST(DetectGroupStructure, GeometricMeanNormalized) {
  const auto p = parse_payoff("(S0*S1*S2)^(1/3)");
  const std::vector<int> cand{0, 1, 2};
  const auto found = detect_group_structure(p, 3, cand);
  ASSERT_TRUE(found.has_value());
  EXPECT_EQ(found->alphas, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(DetectGroupStructure, NonIntegerAndNegativeExponents) {
  const auto p = parse_payoff("max(S0^0.5 * S1^-1.5 - 0.8, 0) + S2");
  const std::vector<int> cand{0, 1};
  const auto found = detect_group_structure(p, 3, cand);
  ASSERT_TRUE(found.has_value());
  EXPECT_NEAR(found->alphas[0], 1.0, 1e-12);
  EXPECT_NEAR(found->alphas[1], -3.0, 1e-12);
}

// Rescaling the payoff must not change the normalized exponents.
TEST(DetectGroupStructure, ScaleInvariant) {
  const std::vector<int> cand{0, 1};
  const auto a = detect_group_structure(parse_payoff("max(S0^2*S1 - 1.1, 0)"), 2, cand);
  const auto b = detect_group_structure(parse_payoff("7.5*max(S0^2*S1 - 1.1, 0)"), 2, cand);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->alphas, b->alphas);
  EXPECT_NEAR(a->alphas[1], 0.5, 1e-12);
}

TEST(DetectGroupStructure, FlatPayoffGivesNothing) {
  const std::vector<int> cand{0, 1};
  EXPECT_FALSE(detect_group_structure(parse_payoff("max(S0*S1 - 1e9, 0)"), 2, cand).has_value());
}

TEST(CheckHomogeneity, Examples) {
  EXPECT_TRUE(check_homogeneity(parse_payoff("max(S0, S1, S2)"), 3));
  EXPECT_FALSE(check_homogeneity(parse_payoff("max(S0*S1 - 1.3, 0)"), 2));
  EXPECT_FALSE(check_homogeneity(parse_payoff("max(1, S0, S1)"), 2));
  EXPECT_TRUE(check_homogeneity(parse_payoff("max(S1 - S0, 0)"), 2));
  EXPECT_TRUE(check_homogeneity(parse_payoff("max(S0*S1/S2 - S0, 0)"), 3));
}

// Any linear form, or max of linear forms, is homogeneous of degree one.
TEST(CheckHomogeneity, LinearFormsProperty) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto linear = [&] {
      PayoffExpr e = PayoffExpr::mul(PayoffExpr::constant(coef(gen)), PayoffExpr::symbol(0));
      for (int i = 1; i < 3; ++i) {
        e = PayoffExpr::add(e, PayoffExpr::mul(PayoffExpr::constant(coef(gen)), PayoffExpr::symbol(i)));
      }
      return e;
    };
    EXPECT_TRUE(check_homogeneity(linear(), 3));
    EXPECT_TRUE(check_homogeneity(PayoffExpr::max({linear(), linear(), linear()}), 3));
  }
}

TEST(RewritePayoff, ProductPair) {
  const auto p = parse_payoff("max(S0*S1*S2 - 1000, 0)");
  const MultiplicativeTransform t({0, 1}, {1.0, 1.0});
  const auto f = rewrite_payoff(p, 3, t, around({10, 10, 10}));
  EXPECT_EQ(f.to_string(), "max(S0 * S1 - 1000, 0)");
}

TEST(RewritePayoff, IdentityTransformRenames) {
  const auto p = parse_payoff("max(S0 - S2, 0) + S1");
  const MultiplicativeTransform t({0, 1}, {1.0, 0.0});
  // Only fails if the payoff really depends on S1 beyond z = S0.
  EXPECT_THROW((void)rewrite_payoff(p, 3, t), Error);
  const auto q = parse_payoff("max(S0 - S2, 0) + S3");
  const auto f = rewrite_payoff(q, 4, t);
  EXPECT_EQ(f.to_string(), "max(S0 - S1, 0) + S2");
}

TEST(RewritePayoff, NotReducibleThrows) {
  const MultiplicativeTransform t({0, 1}, {1.0, 1.0});
  try {
    (void)rewrite_payoff(parse_payoff("S0 + S1"), 2, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kPayoffNotReducible);
  }
}

// Random payoffs built as G(prod S_i^alpha_i, S_rest): whenever detection
// succeeds, the rewrite must reproduce P at random points.
TEST(RewritePayoff, RandomEvaluationOracle) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> exps(-2.0, 2.0);
  std::uniform_real_distribution<double> pts(0.5, 2.0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const double a0 = exps(gen);
    const double a1 = exps(gen);
    if (std::abs(a0) < 0.2 || std::abs(a1) < 0.2) continue;
    auto z = PayoffExpr::mul(PayoffExpr::pow(PayoffExpr::symbol(0), a0),
                             PayoffExpr::pow(PayoffExpr::symbol(2), a1));
    auto p = PayoffExpr::add(PayoffExpr::max({PayoffExpr::sub(z, PayoffExpr::symbol(1)),
                                              PayoffExpr::constant(0.0)}),
                             PayoffExpr::mul(z, PayoffExpr::constant(0.25)));
    const std::vector<int> cand{0, 2};
    const auto found = detect_group_structure(p, 3, cand);
    ASSERT_TRUE(found.has_value()) << p.to_string();
    EXPECT_NEAR(found->alphas[1], a1 / a0, 1e-7);
    const MultiplicativeTransform t(found->group, found->alphas);
    const auto f = rewrite_payoff(p, 3, t);
    for (int k = 0; k < 256; ++k) {
      const std::vector<double> s{pts(gen), pts(gen), pts(gen)};
      const std::vector<double> reduced{t.apply(s), s[1]};
      EXPECT_LE(std::abs(f.eval(reduced) - p.eval(s)), 1e-12 * std::max(1.0, std::abs(p.eval(s))));
    }
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(NumerairePayoff, RainbowBecomesMaxWithOne) {
  const auto f = numeraire_payoff(parse_payoff("max(S0, S1, S2)"), 3, 0);
  EXPECT_EQ(f.to_string(), "max(1, S0, S1)");
}

TEST(ProbePoints, DeterministicAndInRange) {
  ProbeConfig cfg = around({100, 2});
  const auto a = probe_points(2, 64, cfg);
  const auto b = probe_points(2, 64, cfg);
  EXPECT_EQ(a, b);
  for (const auto& s : a) {
    EXPECT_GE(s[0], 50.0 - 1e-9);
    EXPECT_LE(s[0], 200.0 + 1e-9);
    EXPECT_GE(s[1], 1.0 - 1e-12);
    EXPECT_LE(s[1], 4.0 + 1e-12);
  }
}

}  // namespace
}  // namespace bsreduce
