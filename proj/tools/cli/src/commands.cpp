#include "bsreduce_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "bsreduce/error.hpp"
#include "bsreduce/finite_difference.hpp"
#include "bsreduce/monte_carlo.hpp"
#include "bsreduce/parallel.hpp"
#include "bsreduce/plan.hpp"
#include "bsreduce/reduction.hpp"
#include "bsreduce_cli/closed_form.hpp"

namespace bsreduce::cli {
namespace {

using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json problem_json(const BlackScholesProblem& p) {
  return {{"dim", p.dim()},
          {"names", p.names},
          {"cov", matrix_json(p.cov)},
          {"rate", p.rate},
          {"dividends", vector_json(p.dividends)},
          {"maturity", p.maturity},
          {"payoff", p.payoff.to_string()}};
}

PlanOptions plan_options(const GbmFile& g, const Options& opts) {
  PlanOptions po;
  if (!g.spots.empty()) po.probe.center = g.spots;
  po.force_alpha = opts.force_alpha;
  return po;
}

json plan_json(const ReductionPlan& plan, const GbmFile& g) {
  json steps = json::array();
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto& s = plan.steps[k];
    json step;
    if (s.kind == ReductionStep::Kind::kProduct) {
      step["kind"] = "product";
      step["group"] = s.transform->group();
      step["alphas"] = s.transform->alphas();
    } else {
      step["kind"] = "numeraire";
      step["numeraire"] = s.numeraire;
    }
    step["warnings"] = s.warnings;
    step["problem"] = problem_json(plan.states[k]);
    steps.push_back(std::move(step));
  }
  json out{{"initial_dim", plan.initial.dim()},
           {"final_dim", plan.final_problem().dim()},
           {"steps", std::move(steps)},
           {"final", problem_json(plan.final_problem())}};
  if (!g.spots.empty()) {
    const auto mapped = plan.map_spots(g.spots);
    out["reduced_spots"] = mapped.spots;
    out["multiplier"] = mapped.multiplier;
  }
  return out;
}

const std::vector<double>& require_spots(const GbmFile& g) {
  if (g.spots.empty()) throw SchemaError("/spots", "schema error at '/spots': pricing needs spots");
  return g.spots;
}

McConfig mc_config(const Options& opts, int steps = 1) {
  McConfig cfg;
  cfg.n_paths = opts.paths;
  cfg.seed = opts.seed;
  cfg.n_steps = steps;
  cfg.antithetic = opts.antithetic;
  return cfg;
}

FdGrid fd_grid(const Options& opts) {
  FdGrid grid;
  grid.intervals = {opts.grid};
  grid.time_steps = opts.grid;
  return grid;
}

struct Priced {
  std::string method;
  std::string pattern;
  PriceEstimate estimate;
};

json estimate_json(const Priced& p) {
  json out{{"method", p.method}, {"price", p.estimate.value}};
  if (p.method == "mc") out["std_error"] = p.estimate.std_error;
  if (p.method == "fd") out["grid_error"] = p.estimate.grid_error;
  if (!p.pattern.empty()) out["pattern"] = p.pattern;
  return out;
}

std::optional<Priced> closed_form(const ReductionPlan& plan, std::span<const double> spots) {
  const auto& fin = plan.final_problem();
  if (fin.dim() != 1) return std::nullopt;
  const auto match = match_power_vanilla(fin.payoff);
  if (!match) return std::nullopt;
  const auto mapped = plan.map_spots(spots);
  const double value = mapped.multiplier * price_power_vanilla(*match, fin, mapped.spots[0]);
  return Priced{"closed", match->pattern(), {value, 0.0, 0.0}};
}

Priced finite_difference(const ReductionPlan& plan, std::span<const double> spots, const Options& opts) {
  const auto& fin = plan.final_problem();
  if (fin.dim() > 2) {
    fail(Errc::kNoClosedForm, "finite differences need a reduced dimension of 1 or 2, got " +
                                  std::to_string(fin.dim()));
  }
  const auto mapped = plan.map_spots(spots);
  auto est = fd_solve(to_log_parabolic(fin), fd_grid(opts), mapped.spots);
  est.value *= mapped.multiplier;
  est.grid_error *= mapped.multiplier;
  return {"fd", "", est};
}

Priced reduced_best(const ReductionPlan& plan, std::span<const double> spots, const Options& opts) {
  if (auto c = closed_form(plan, spots)) return *c;
  if (plan.final_problem().dim() <= 2) return finite_difference(plan, spots, opts);
  // No deterministic method applies: simulate the reduced problem on an
  // independent stream.
  const auto mapped = plan.map_spots(spots);
  auto cfg = mc_config(opts);
  cfg.seed = opts.seed + 1;
  auto est = mc_price(plan.final_problem(), mapped.spots, cfg);
  est.value *= mapped.multiplier;
  est.std_error *= mapped.multiplier;
  return {"mc", "", est};
}

json vasicek_reduce(const VasicekFile& v) {
  const auto bonds = vasicek_bond_prices(v.params, v.state);
  const double variance = fx_vol_integral(0.0, v.params.maturity, v.params);
  json steps = json::array();
  steps.push_back({{"kind", "product"},
                   {"group", {"p2", "F"}},
                   {"alphas", {1.0, 1.0}},
                   {"warnings", json::array()}});
  steps.push_back({{"kind", "numeraire"}, {"numeraire", "p1"}, {"warnings", v.params.warnings()}});
  return {{"initial_dim", 3},
          {"final_dim", 1},
          {"steps", std::move(steps)},
          {"final",
           {{"y", bonds.p2 * v.state.fx / bonds.p1},
            {"strike", v.params.strike},
            {"variance", variance},
            {"multiplier", bonds.p1}}},
          {"bonds", {{"p1", bonds.p1}, {"p2", bonds.p2}}}};
}

json with_name(json report, const ProblemFile& file) {
  if (!file.name.empty()) report["name"] = file.name;
  return report;
}

}  // namespace

json reduce_report(const ProblemFile& file, const Options& opts) {
  json out{{"command", "reduce"}};
  if (file.is_vasicek()) {
    out["model"] = "vasicek_fx";
    out["plan"] = vasicek_reduce(std::get<VasicekFile>(file.body));
  } else {
    const auto& g = std::get<GbmFile>(file.body);
    out["model"] = "gbm";
    out["plan"] = plan_json(plan_reduction(g.problem, plan_options(g, opts)), g);
  }
  return with_name(std::move(out), file);
}

json price_report(const ProblemFile& file, const Options& opts) {
  json out{{"command", "price"}};
  Priced priced;
  json plan_used = nullptr;
  if (file.is_vasicek()) {
    const auto& v = std::get<VasicekFile>(file.body);
    out["model"] = "vasicek_fx";
    if (opts.method == "closed") {
      const auto bonds = vasicek_bond_prices(v.params, v.state);
      priced = {"closed", "vasicek_fx",
                {price_fx_option_vasicek(bonds.p1, bonds.p2, v.state.fx, 0.0, v.params), 0.0, 0.0}};
      plan_used = vasicek_reduce(v);
    } else if (opts.method == "mc") {
      priced = {"mc", "", mc_price_vasicek_fx(v.params, v.state, mc_config(opts, opts.steps)).price};
    } else {
      fail(Errc::kNoClosedForm, "method " + opts.method + " is not available for vasicek_fx problems");
    }
  } else {
    const auto& g = std::get<GbmFile>(file.body);
    const auto& spots = require_spots(g);
    out["model"] = "gbm";
    if (opts.method == "mc") {
      priced = {"mc", "", mc_price(g.problem, spots, mc_config(opts))};
    } else {
      const auto plan = plan_reduction(g.problem, plan_options(g, opts));
      plan_used = plan_json(plan, g);
      if (opts.method == "closed") {
        auto c = closed_form(plan, spots);
        if (!c) {
          fail(Errc::kNoClosedForm, "reduced payoff " + plan.final_problem().payoff.to_string() +
                                        " matches no closed-form pattern");
        }
        priced = *c;
      } else {
        priced = finite_difference(plan, spots, opts);
      }
    }
  }
  out.update(estimate_json(priced));
  out["plan_used"] = std::move(plan_used);
  return with_name(std::move(out), file);
}

json verify_report(const ProblemFile& file, const Options& opts) {
  json out{{"command", "verify"}};
  Priced original;
  Priced reduced;
  if (file.is_vasicek()) {
    const auto& v = std::get<VasicekFile>(file.body);
    out["model"] = "vasicek_fx";
    const auto mc = mc_price_vasicek_fx(v.params, v.state, mc_config(opts, opts.steps));
    original = {"mc", "", mc.price};
    reduced = {"closed", "vasicek_fx",
               {price_fx_option_vasicek(mc.bonds.p1, mc.bonds.p2, v.state.fx, 0.0, v.params), 0.0, 0.0}};
    out["plan"] = vasicek_reduce(v);
    out["martingale_checks"] = {
        {"discount_bond", {{"simulated", mc.discount_bond.value}, {"std_error", mc.discount_bond.std_error},
                           {"expected", mc.bonds.p1}}},
        {"foreign_bond", {{"simulated", mc.foreign_bond.value}, {"std_error", mc.foreign_bond.std_error},
                          {"expected", v.state.fx * mc.bonds.p2}}}};
  } else {
    const auto& g = std::get<GbmFile>(file.body);
    const auto& spots = require_spots(g);
    out["model"] = "gbm";
    const auto plan = plan_reduction(g.problem, plan_options(g, opts));
    original = {"mc", "", mc_price(g.problem, spots, mc_config(opts))};
    reduced = reduced_best(plan, spots, opts);
    out["plan"] = plan_json(plan, g);
  }
  const double delta = original.estimate.value - reduced.estimate.value;
  const double se = std::hypot(original.estimate.std_error, reduced.estimate.std_error);
  const double tolerance = opts.tolerance_sigmas * se + reduced.estimate.grid_error;
  out["original"] = estimate_json(original);
  out["reduced"] = estimate_json(reduced);
  out["delta"] = delta;
  out["tolerance"] = tolerance;
  out["tolerance_sigmas"] = opts.tolerance_sigmas;
  out["verdict"] = std::abs(delta) <= tolerance ? "PASS" : "FAIL";
  return with_name(std::move(out), file);
}

namespace {

json meta() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"tool", "bsreduce"}, {"version", kVersion}, {"generated_at", buf}, {"threads", worker_count()}};
}

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

json at_or_null(const json& j, const json::json_pointer& ptr) { return j.contains(ptr) ? j.at(ptr) : json(nullptr); }

std::string to_csv(Command cmd, const json& reports) {
  std::vector<std::pair<std::string, std::string>> cols;
  switch (cmd) {
    case Command::kReduce:
      cols = {{"name", "/name"}, {"model", "/model"}, {"initial_dim", "/plan/initial_dim"},
              {"final_dim", "/plan/final_dim"}, {"final_payoff", "/plan/final/payoff"}};
      break;
    case Command::kPrice:
      cols = {{"name", "/name"}, {"model", "/model"}, {"method", "/method"}, {"price", "/price"},
              {"std_error", "/std_error"}, {"grid_error", "/grid_error"}};
      break;
    case Command::kVerify:
      cols = {{"name", "/name"}, {"model", "/model"}, {"verdict", "/verdict"},
              {"original", "/original/price"}, {"reduced", "/reduced/price"}, {"reduced_method", "/reduced/method"},
              {"delta", "/delta"}, {"tolerance", "/tolerance"}};
      break;
  }
  std::string out = "index";
  for (const auto& c : cols) out += "," + c.first;
  out += "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += std::to_string(i);
    for (const auto& c : cols) out += "," + csv_field(at_or_null(reports[i], json::json_pointer(c.second)));
    out += "\n";
  }
  return out;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kSyntaxError:
    case Errc::kUnknownSymbol: return kExitPayoffParse;
    case Errc::kNoClosedForm: return kExitNoClosedForm;
    case Errc::kInvalidInput:
    case Errc::kNotSymmetric:
    case Errc::kNotPsd:
    case Errc::kWeightsNotSimplex: return kExitSchema;
    default: return kExitNumeric;
  }
}

}  // namespace

CommandResult run_command(Command cmd, const std::string& text, const Options& opts) {
  CommandResult result;
  try {
    if (opts.method != "closed" && opts.method != "fd" && opts.method != "mc") {
      throw SchemaError("", "unknown method '" + opts.method + "' (expected closed, fd or mc)");
    }
    const json doc = read_json_text(text);
    const auto files = parse_problem_document(doc, ParseOptions{opts.from_vols});
    json reports = json::array();
    bool all_pass = true;
    for (const auto& f : files) {
      json r;
      switch (cmd) {
        case Command::kReduce: r = reduce_report(f, opts); break;
        case Command::kPrice: r = price_report(f, opts); break;
        case Command::kVerify:
          r = verify_report(f, opts);
          all_pass = all_pass && r["verdict"] == "PASS";
          break;
      }
      reports.push_back(std::move(r));
    }
    if (doc.is_array()) {
      result.report = {{"results", reports}};
    } else {
      result.report = reports[0];
    }
    if (!opts.no_meta) result.report["meta"] = meta();
    result.out = opts.csv ? to_csv(cmd, reports) : result.report.dump(2) + "\n";
    result.exit_code = all_pass ? kExitOk : kExitVerifyFail;
  } catch (const SchemaError& e) {
    result.exit_code = kExitSchema;
    result.err = std::string(e.what()) + "\n";
  } catch (const ParseError& e) {
    result.exit_code = kExitPayoffParse;
    result.err = std::string("payoff ") + e.what() + "\n";
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.code());
    result.err = std::string(e.what()) + "\n";
  } catch (const std::exception& e) {
    result.exit_code = kExitNumeric;
    result.err = std::string("error: ") + e.what() + "\n";
  }
  return result;
}

CommandResult run_command_file(Command cmd, const std::string& path, const Options& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    CommandResult r;
    r.exit_code = kExitSchema;
    r.err = "cannot read " + path + "\n";
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return run_command(cmd, ss.str(), opts);
}

}  // namespace bsreduce::cli
