#include <gtest/gtest.h>

#include <cmath>

#include "bsreduce_cli/closed_form.hpp"
#include "bsreduce_cli/problem_file.hpp"
#include "oracles.hpp"

namespace bsreduce::cli {
namespace {

using testing::rel_err;

// E[max(c S_T^p - K, 0)] e^{-rT} integrated over the Gaussian log return,
// split at the kink.
double power_call_by_quadrature(double spot, double c, double p, double k, double vol, double r, double q,
                                double tau) {
  const double m = std::log(spot) + (r - q - 0.5 * vol * vol) * tau;
  const double sd = vol * std::sqrt(tau);
  const double kink = (std::log(k / c) / p - m) / sd;
  auto integrand = [&](double z) {
    return std::max(c * std::exp(p * (m + sd * z)) - k, 0.0) * testing::normal_density(z);
  };
  const double tol = 1e-13 * k;
  double total = 0.0;
  for (double a = -12.0; a < 12.0; a += 0.5) {
    const double b = a + 0.5;
    if (a < kink && kink < b) {
      total += testing::adaptive_simpson(integrand, a, kink, tol) + testing::adaptive_simpson(integrand, kink, b, tol);
    } else {
      total += testing::adaptive_simpson(integrand, a, b, tol);
    }
  }
  return std::exp(-r * tau) * total;
}

BlackScholesProblem one_asset(const std::string& payoff, double vol = 0.25) {
  return make_problem(Eigen::MatrixXd::Constant(1, 1, vol * vol), 0.04, Eigen::VectorXd::Constant(1, 0.01), 1.5,
                      parse_payoff(payoff));
}

TEST(PowerVanilla, RecognizesShapes) {
  auto m = match_power_vanilla(parse_payoff("max(S0 - 100, 0)"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->pattern(), "vanilla");
  EXPECT_EQ(m->kind, OptionKind::kCall);
  EXPECT_EQ(m->strike, 100.0);

  m = match_power_vanilla(parse_payoff("max(1 - S0, 0)"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->kind, OptionKind::kPut);

  m = match_power_vanilla(parse_payoff("2.5 * max(0, 3*S0^0.5 / 2 - 10)"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->scale, 2.5);
  EXPECT_EQ(m->coefficient, 1.5);
  EXPECT_EQ(m->power, 0.5);
  EXPECT_EQ(m->pattern(), "power_vanilla");

  EXPECT_FALSE(match_power_vanilla(parse_payoff("max(S0 - 100, 1)")));
  EXPECT_FALSE(match_power_vanilla(parse_payoff("max(S0, S1)")));
  EXPECT_FALSE(match_power_vanilla(parse_payoff("max(-S0 - 1, 0)")));
  EXPECT_FALSE(match_power_vanilla(parse_payoff("S0")));
}

TEST(PowerVanilla, PlainCallIsBsVanilla) {
  const auto p = one_asset("max(S0 - 100, 0)");
  const auto m = match_power_vanilla(p.payoff);
  ASSERT_TRUE(m);
  EXPECT_EQ(price_power_vanilla(*m, p, 95), bs_vanilla(95, 100, 0.25, 0.04, 0.01, 1.5, OptionKind::kCall));
}

TEST(PowerVanilla, PowerPayoffAgainstQuadrature) {
  for (double power : {1.0 / 3, 0.5, 2.0, -1.0}) {
    const double c = 1.7;
    const double spot = 90;
    const double k = c * std::pow(100.0, power);
    const auto p = one_asset("max(1.7*S0^" + std::string(power < 0 ? "(-1)" : "(" + std::to_string(power) + ")") +
                             " - " + std::to_string(k) + ", 0)");
    const auto m = match_power_vanilla(p.payoff);
    ASSERT_TRUE(m) << p.payoff.to_string();
    const double oracle = power_call_by_quadrature(spot, c, m->power, m->strike, 0.25, 0.04, 0.01, 1.5);
    EXPECT_LE(rel_err(price_power_vanilla(*m, p, spot), oracle), 1e-8) << power;
  }
}

TEST(ProblemFile, ParsesAndRejects) {
  const auto doc = read_json_text(R"json({"dim": 2, "cov": [0.04, 0.01, 0.01, 0.09], "rate": 0.05,
      "dividends": [0, 0.01], "maturity": 2, "payoff": "max(S0 - S1, 0)", "spots": [1, 2]})json");
  const auto files = parse_problem_document(doc);
  ASSERT_EQ(files.size(), 1u);
  const auto& g = std::get<GbmFile>(files[0].body);
  EXPECT_EQ(g.problem.cov(1, 0), 0.01);
  EXPECT_EQ(g.spots[1], 2.0);

  auto bad = doc;
  bad["cov"] = {0.04, 0.01, 0.01};
  try {
    (void)parse_problem_document(bad);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/cov");
  }
  bad = doc;
  bad["spots"][1] = -1.0;
  EXPECT_THROW((void)parse_problem_document(bad), SchemaError);
  EXPECT_THROW((void)read_json_text("{"), SchemaError);
}

TEST(ProblemFile, FromVols) {
  const auto doc = read_json_text(R"json({"dim": 2, "vols": [0.2, 0.3], "corr": [1, 0.5, 0.5, 1], "rate": 0.05,
      "dividends": [0, 0], "maturity": 1, "payoff": "S0"})json");
  EXPECT_THROW((void)parse_problem_document(doc), SchemaError);
  const auto files = parse_problem_document(doc, ParseOptions{true});
  EXPECT_NEAR(std::get<GbmFile>(files[0].body).problem.cov(0, 1), 0.03, 1e-16);
}

TEST(ProblemFile, VasicekStateFromBonds) {
  const auto doc = read_json_text(R"json({"model": "vasicek_fx", "a1": 0.1, "a2": 0.2, "b1": 0.005, "b2": 0.004,
      "sigma1": [0.01, 0, 0], "sigma2": [0, 0.015, 0], "sigma3": [0, 0, 0.1], "strike": 1.3, "maturity": 1,
      "r1": 0.03, "r2": 0.02, "fx": 1.3})json");
  const auto v = std::get<VasicekFile>(parse_problem(doc).body);
  const auto bonds = vasicek_bond_prices(v.params, v.state);
  auto by_bonds = doc;
  by_bonds.erase("r1");
  by_bonds.erase("r2");
  by_bonds["p1"] = bonds.p1;
  by_bonds["p2"] = bonds.p2;
  const auto w = std::get<VasicekFile>(parse_problem(by_bonds).body);
  EXPECT_NEAR(w.state.r1, 0.03, 1e-14);
  EXPECT_NEAR(w.state.r2, 0.02, 1e-14);
  by_bonds["r1"] = 0.03;
  EXPECT_THROW((void)parse_problem(by_bonds), SchemaError);
}

}  // namespace
}  // namespace bsreduce::cli
