#include "bsreduce_cli/problem_file.hpp"

#include <cmath>
#include <set>

#include "bsreduce/error.hpp"
#include "bsreduce/payoff.hpp"

namespace bsreduce::cli {

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : std::runtime_error(message), pointer_(std::move(pointer)) {}

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_fail(const std::string& ptr, const std::string& message) {
  throw SchemaError(ptr, "schema error at '" + ptr + "': " + message);
}

std::string child(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string child(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& base) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) schema_fail(child(base, key), "unknown key");
  }
}

const json& require(const json& j, const std::string& key, const std::string& base) {
  if (!j.contains(key)) schema_fail(child(base, key), "missing required key");
  return j.at(key);
}

double number(const json& v, const std::string& ptr) {
  if (!v.is_number()) schema_fail(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema_fail(ptr, "expected a finite number");
  return x;
}

double positive(const json& v, const std::string& ptr) {
  const double x = number(v, ptr);
  if (!(x > 0.0)) schema_fail(ptr, "expected a positive number");
  return x;
}

double non_negative(const json& v, const std::string& ptr) {
  const double x = number(v, ptr);
  if (x < 0.0) schema_fail(ptr, "expected a non-negative number");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& ptr, std::size_t expected) {
  if (!v.is_array()) schema_fail(ptr, "expected an array of numbers");
  if (v.size() != expected) {
    schema_fail(ptr, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], child(ptr, i)));
  return out;
}

Eigen::MatrixXd square(const json& v, const std::string& ptr, int dim) {
  const auto n = static_cast<std::size_t>(dim);
  const auto flat = numbers(v, ptr, n * n);
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) m(i, k) = flat[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(k)];
  }
  return m;
}

Eigen::Vector3d vec3(const json& v, const std::string& ptr) {
  const auto x = numbers(v, ptr, 3);
  return {x[0], x[1], x[2]};
}

std::string name_of(const json& j, const std::string& base) {
  if (!j.contains("name")) return {};
  if (!j["name"].is_string()) schema_fail(child(base, "name"), "expected a string");
  return j["name"].get<std::string>();
}

GbmFile parse_gbm(const json& j, const ParseOptions& opts, const std::string& base) {
  std::set<std::string> allowed{"name", "dim", "rate", "dividends", "maturity", "payoff", "spots"};
  if (opts.from_vols) {
    allowed.insert({"vols", "corr"});
  } else {
    allowed.insert("cov");
  }
  reject_unknown(j, allowed, base);

  const json& dim_v = require(j, "dim", base);
  if (!dim_v.is_number_integer() || dim_v.get<long long>() < 1 || dim_v.get<long long>() > kMaxAssets) {
    schema_fail(child(base, "dim"), "expected an integer in [1, " + std::to_string(kMaxAssets) + "]");
  }
  const int dim = dim_v.get<int>();
  const auto n = static_cast<std::size_t>(dim);

  Eigen::MatrixXd cov;
  if (opts.from_vols) {
    const auto vols = numbers(require(j, "vols", base), child(base, "vols"), n);
    for (std::size_t i = 0; i < n; ++i) {
      if (vols[i] < 0.0) schema_fail(child(child(base, "vols"), i), "expected a non-negative number");
    }
    const Eigen::MatrixXd corr = square(require(j, "corr", base), child(base, "corr"), dim);
    cov = covariance_from_vols(Eigen::Map<const Eigen::VectorXd>(vols.data(), dim), corr);
  } else {
    cov = square(require(j, "cov", base), child(base, "cov"), dim);
  }

  const double rate = number(require(j, "rate", base), child(base, "rate"));
  const auto div = numbers(require(j, "dividends", base), child(base, "dividends"), n);
  const double maturity = positive(require(j, "maturity", base), child(base, "maturity"));
  const json& payoff_v = require(j, "payoff", base);
  if (!payoff_v.is_string()) schema_fail(child(base, "payoff"), "expected a payoff expression string");

  GbmFile out;
  out.payoff_source = payoff_v.get<std::string>();
  if (j.contains("spots")) {
    out.spots = numbers(j["spots"], child(base, "spots"), n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(out.spots[i] > 0.0)) schema_fail(child(child(base, "spots"), i), "expected a positive number");
    }
  }
  out.problem = make_problem(std::move(cov), rate, Eigen::Map<const Eigen::VectorXd>(div.data(), dim), maturity,
                             parse_payoff(out.payoff_source));
  if (out.problem.payoff.max_symbol() >= dim) {
    schema_fail(child(base, "payoff"), "payoff references S" + std::to_string(out.problem.payoff.max_symbol()) +
                                           " but dim is " + std::to_string(dim));
  }
  validate(out.problem);
  return out;
}

VasicekFile parse_vasicek(const json& j, const std::string& base) {
  reject_unknown(j,
                 {"name", "model", "a1", "a2", "b1", "b2", "lambda1", "lambda2", "sigma1", "sigma2", "sigma3",
                  "strike", "maturity", "r1", "r2", "p1", "p2", "fx"},
                 base);
  VasicekFile out;
  auto& p = out.params;
  p.a1 = non_negative(require(j, "a1", base), child(base, "a1"));
  p.a2 = non_negative(require(j, "a2", base), child(base, "a2"));
  p.b1 = number(require(j, "b1", base), child(base, "b1"));
  p.b2 = number(require(j, "b2", base), child(base, "b2"));
  if (j.contains("lambda1")) p.lambda1 = number(j["lambda1"], child(base, "lambda1"));
  if (j.contains("lambda2")) p.lambda2 = number(j["lambda2"], child(base, "lambda2"));
  p.sigma1 = vec3(require(j, "sigma1", base), child(base, "sigma1"));
  p.sigma2 = vec3(require(j, "sigma2", base), child(base, "sigma2"));
  p.sigma3 = vec3(require(j, "sigma3", base), child(base, "sigma3"));
  p.strike = positive(require(j, "strike", base), child(base, "strike"));
  p.maturity = positive(require(j, "maturity", base), child(base, "maturity"));
  p.validate();

  out.state.fx = positive(require(j, "fx", base), child(base, "fx"));
  const bool rates = j.contains("r1") || j.contains("r2");
  const bool bonds = j.contains("p1") || j.contains("p2");
  if (rates == bonds) schema_fail(base, "give either the short rates r1, r2 or the bond prices p1, p2");
  if (rates) {
    out.state.r1 = number(require(j, "r1", base), child(base, "r1"));
    out.state.r2 = number(require(j, "r2", base), child(base, "r2"));
  } else {
    const double p1 = positive(require(j, "p1", base), child(base, "p1"));
    const double p2 = positive(require(j, "p2", base), child(base, "p2"));
    out.state = vasicek_state_from_bonds(p, p1, p2, out.state.fx);
  }
  return out;
}

}  // namespace

ProblemFile parse_problem(const json& j, const ParseOptions& opts, const std::string& base) {
  if (!j.is_object()) schema_fail(base, "expected a problem object");
  ProblemFile out;
  out.name = name_of(j, base);
  if (j.contains("model")) {
    const json& model = j["model"];
    if (!model.is_string() || model.get<std::string>() != "vasicek_fx") {
      schema_fail(child(base, "model"), "the only supported model is \"vasicek_fx\"");
    }
    out.body = parse_vasicek(j, base);
  } else {
    out.body = parse_gbm(j, opts, base);
  }
  return out;
}

std::vector<ProblemFile> parse_problem_document(const json& j, const ParseOptions& opts) {
  std::vector<ProblemFile> out;
  if (j.is_array()) {
    if (j.empty()) schema_fail("", "batch file holds no problems");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_problem(j[i], opts, child("", i)));
  } else {
    out.push_back(parse_problem(j, opts));
  }
  return out;
}

json read_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace bsreduce::cli
