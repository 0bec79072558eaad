#include "svi/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "svi/grid.hpp"
#include "svi/increase.hpp"
#include "svi/penalty.hpp"
#include "svi/sensitivity.hpp"
#include "svi/value_fn.hpp"

namespace svi {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Json to_json(const GeneratorSet& g) {
  Json pts = Json::array(), rays = Json::array();
  for (const Vec& p : g.points) pts.push_back(to_json(p));
  for (const Vec& r : g.rays) rays.push_back(to_json(r));
  return {{"points", pts}, {"rays", rays}};
}

Json to_json(const PolyhedronH& h) {
  Json rows = Json::array();
  for (int j = 0; j < h.rows(); ++j) {
    rows.push_back({{"normal", to_json(Vec(h.normals.row(j).transpose()))}, {"offset", num(h.offsets(j))}});
  }
  return rows;
}

Vec vec_param(const Json& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  return out;
}

template <class T>
T param(const Json& p, const char* key, T fallback) {
  return p.contains(key) ? p.at(key).get<T>() : fallback;
}

std::vector<Vec> grid_param(const Json& p, const char* key, int dim, double lo, double hi, double step) {
  if (p.contains(key)) {
    const Json& g = p.at(key);
    return product_grid(vec_param(g.at("lo")), vec_param(g.at("hi")), vec_param(g.at("step")));
  }
  return product_grid(Vec::Constant(dim, lo), Vec::Constant(dim, hi), Vec::Constant(dim, step));
}

std::vector<Vec> default_parameter_grid(const Json& p, int s) {
  return s == 1 ? grid_param(p, "grid", s, -2.0, 2.0, 0.01) : grid_param(p, "grid", s, -1.0, 1.0, 0.5);
}

struct TaskResult {
  std::string status = "ok";
  std::string extension = "json";
  std::string body;  // file contents
};

struct Context {
  const InstanceConfig& cfg;
  const ProblemInstance& inst;
  const RunOptions& opts;
  std::optional<double> alpha_f;
};

std::vector<Vec> points_of(const Context& ctx, const Json& p) {
  if (ctx.opts.points) return *ctx.opts.points;
  if (p.contains("points")) {
    std::vector<Vec> out;
    for (const Json& v : p.at("points")) out.push_back(vec_param(v));
    return out;
  }
  return {Vec::Zero(ctx.inst.s())};
}

std::uint64_t seed_of(const Context& ctx, const Json& p) {
  return p.contains("seed") ? p.at("seed").get<std::uint64_t>() : ctx.opts.seed;
}

Vec x_bar_of(const Context& ctx, const Json& p, const Vec& p_bar) {
  if (p.contains("x_bar")) return vec_param(p.at("x_bar"));
  const SolveReport sol = solve(ctx.inst, p_bar);
  if (sol.status != SolveStatus::Optimal) throw Error("not_optimal", std::string("solve status ") + to_string(sol.status));
  return sol.argmin;
}

TaskResult json_result(const std::string& quantity, Json body, std::string status = "ok") {
  body["quantity"] = quantity;
  TaskResult r;
  r.status = std::move(status);
  r.body = body.dump(2) + "\n";
  return r;
}

TaskResult run_feasibility(Context& ctx, const Json& p) {
  Json rows = Json::array();
  for (const Vec& pt : points_of(ctx, p)) {
    const FeasibleRegion fr = feasible_region(ctx.inst.map, ctx.inst.cone, pt);
    rows.push_back({{"p", to_json(pt)}, {"empty", !is_feasible(fr.region)}, {"rows", to_json(fr.region)}});
  }
  return json_result("S(p)", {{"regions", rows}});
}

TaskResult run_value_grid(Context& ctx, const Json& p) {
  SolveOptions so;
  so.force_subgradient = param(p, "force_subgradient", false);
  const std::vector<Vec> grid = default_parameter_grid(p, ctx.inst.s());
  const std::vector<SolveReport> rows = value_grid(ctx.inst, grid, so, ctx.opts.parallel);
  std::ostringstream out;
  out << "# svi " << kToolVersion << " value-grid quantity=val\n";
  for (int i = 0; i < ctx.inst.s(); ++i) out << "p" << i << ",";
  out << "status,value";
  for (int i = 0; i < ctx.inst.n(); ++i) out << ",argmin" << i;
  out << ",iterations\n";
  for (const SolveReport& r : rows) {
    for (Eigen::Index i = 0; i < r.p.size(); ++i) out << format_double(r.p(i)) << ",";
    out << to_string(r.status) << "," << format_double(r.value);
    for (int i = 0; i < ctx.inst.n(); ++i) {
      out << "," << (r.status == SolveStatus::Optimal ? format_double(r.argmin(i)) : "");
    }
    out << "," << r.iterations << "\n";
  }
  TaskResult res;
  res.extension = "csv";
  res.body = out.str();
  return res;
}

TaskResult run_convexity(Context& ctx, const Json& p) {
  const std::vector<Vec> grid = default_parameter_grid(p, ctx.inst.s());
  const double tol = param(p, "tol", 1e-7);
  const ConvexityAuditReport rep = convexity_audit(value_grid(ctx.inst, grid, {}, ctx.opts.parallel));
  Json worst = Json::array();
  for (const MidpointViolation& v : rep.worst) {
    worst.push_back({{"p1", to_json(v.p1)}, {"p2", to_json(v.p2)}, {"excess", num(v.excess)}});
  }
  return json_result("val",
                     {{"max_midpoint_violation", num(rep.max_midpoint_violation)},
                      {"triples", rep.triples},
                      {"tol", tol},
                      {"worst", worst}},
                     rep.max_midpoint_violation <= tol ? "ok" : "violations");
}

TaskResult run_lipschitz(Context& ctx, const Json& p) {
  const std::vector<Vec> grid = default_parameter_grid(p, ctx.inst.s());
  const LipschitzAuditReport rep =
      lipschitz_audit(value_grid(ctx.inst, grid, {}, ctx.opts.parallel), param(p, "window", 5));
  Json local = Json::array();
  for (double v : rep.local_constants) local.push_back(num(v));
  return json_result("val", {{"max_constant", num(rep.max_constant)}, {"window", rep.window}, {"local_constants", local}});
}

TaskResult run_subdiff(Context& ctx, const Json& p) {
  SubdiffOptions so;
  so.allow_unverified = param(p, "allow_unverified", false);
  so.seed = ctx.opts.seed;
  const bool oracle = param(p, "oracle", ctx.inst.s() == 1);
  Json rows = Json::array();
  for (const Vec& pt : points_of(ctx, p)) {
    const SubdiffReport rep = value_subdiff(ctx.inst, pt, so);
    Json row = {{"p_bar", to_json(rep.p_bar)},
                {"x_bar", to_json(rep.x_bar)},
                {"mode", rep.mode},
                {"qualification", to_string(rep.qualification)},
                {"value_subdiff", to_json(rep.value_subdiff)},
                {"objective_subdiff", to_json(rep.objective_subdiff)},
                {"coderivative_cone", to_json(rep.coderivative_cone)},
                {"notes", rep.notes}};
    row["argmin_unique"] = rep.argmin_unique ? Json(*rep.argmin_unique) : Json(nullptr);
    if (ctx.inst.s() == 1) {
      double lo = -INFINITY, hi = INFINITY;
      for (int j = 0; j < rep.value_subdiff_halfspaces->rows(); ++j) {
        const double a = rep.value_subdiff_halfspaces->normals(j, 0), b = rep.value_subdiff_halfspaces->offsets(j);
        if (a > 0) hi = std::min(hi, b / a);
        if (a < 0) lo = std::max(lo, b / a);
      }
      row["interval"] = {num(lo), num(hi)};
      if (oracle) {
        const OracleInterval o = subdiff_oracle_1d(ctx.inst, pt(0));
        row["oracle"] = {{"lower", num(o.lower)}, {"upper", num(o.upper)}, {"monotone", o.monotone}};
      }
    }
    rows.push_back(row);
  }
  return json_result("subdiff_val", {{"points", rows}});
}

Json certificate_json(const IncreaseCertificate& c) {
  Json j = {{"method", to_string(c.method)}, {"eta", num(c.eta)}, {"notes", c.notes}};
  j["alpha_lower"] = c.alpha_lower ? num(*c.alpha_lower) : Json(nullptr);
  j["interior_witness"] = c.interior_witness ? to_json(*c.interior_witness) : Json(nullptr);
  return j;
}

TaskResult run_increase(Context& ctx, const Json& p) {
  const std::string variable = param<std::string>(p, "variable", "both");
  const std::string method = param<std::string>(p, "method", "auto");
  if (variable != "both" && variable != "joint" && variable != "state") {
    throw Error("config_task", "increase-cert.variable must be joint, state or both");
  }
  if (method != "auto" && method != "analytic" && method != "numeric") {
    throw Error("config_task", "increase-cert.method must be auto, analytic or numeric");
  }
  Json out;
  Json certs = Json::object();
  if (ctx.inst.map.kind() == MapKind::Fan) {
    for (const auto& [name, v] : {std::pair{"joint", FanVariable::Joint}, std::pair{"state", FanVariable::StateOnly}}) {
      if (variable != "both" && variable != name) continue;
      try {
        certs[name] = certificate_json(fan_increase_certificate(ctx.inst.map, ctx.inst.cone, v));
      } catch (const Error& e) {
        certs[name] = {{"method", "none"}, {"error", e.code()}};
      }
    }
  }
  out["certificates"] = certs;
  if (p.contains("p_grid") && p.contains("x_grid")) {
    const auto pg = grid_param(p, "p_grid", ctx.inst.s(), 0, 0, 1);
    const auto xg = grid_param(p, "x_grid", ctx.inst.n(), 0, 0, 1);
    const std::vector<PointPX> grid = joint_grid(pg, xg);
    AlphaFOptions ao;
    ao.method = method == "analytic" ? AlphaMethod::Analytic : method == "numeric" ? AlphaMethod::Numeric : AlphaMethod::Auto;
    ao.alpha_max = param(p, "alpha_max", 10.0);
    ao.check.seed = seed_of(ctx, p);
    const AlphaFReport rep = alpha_f_estimate(ctx.inst.map, ctx.inst.cone, grid, ao);
    out["alpha_f"] = {{"value", num(rep.value)},
                      {"status", rep.status},
                      {"label", rep.label},
                      {"method", rep.method},
                      {"points_with_excess", rep.points_with_excess}};
    if (rep.status == "certified") ctx.alpha_f = rep.value;
  }
  return json_result("alpha_F", out);
}

TaskResult run_error_bound(Context& ctx, const Json& p) {
  const double alpha = param(p, "alpha", 1.9);
  std::optional<double> certified = ctx.alpha_f;
  if (p.contains("certified_alpha")) certified = p.at("certified_alpha").get<double>();
  const double step_p = ctx.inst.s() <= 1 ? 0.1 : 0.5, step_x = ctx.inst.n() <= 1 ? 0.1 : 0.5;
  const auto pg = grid_param(p, "p_grid", ctx.inst.s(), -2.0, 2.0, step_p);
  const auto xg = grid_param(p, "x_grid", ctx.inst.n(), -3.0, 3.0, step_x);
  const std::vector<PointPX> grid = joint_grid(pg, xg);
  const ErrorBoundReport rep =
      error_bound_audit(ctx.inst.map, ctx.inst.cone, alpha, grid, certified, param(p, "tol", 1e-7));
  Json viol = Json::array();
  for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i) {
    const auto& v = rep.violations[i];
    viol.push_back({{"p", to_json(v.p)}, {"x", to_json(v.x)}, {"distance", num(v.distance)},
                    {"excess", num(v.excess)}, {"reason", v.reason}});
  }
  Json body = {{"alpha", alpha},
               {"max_ratio", num(rep.max_ratio)},
               {"checked", rep.checked},
               {"skipped_feasible", rep.skipped_feasible},
               {"violation_count", rep.violations.size()},
               {"violations", viol}};
  body["certified_alpha"] = certified ? num(*certified) : Json(nullptr);
  return json_result("dist_to_S", body, rep.violations.empty() ? "ok" : "violations");
}

TaskResult run_penalty(Context& ctx, const Json& p) {
  PenaltyOptions po;
  po.seed = seed_of(ctx, p);
  Json rows = Json::array();
  bool ok = true;
  for (const Vec& pt : points_of(ctx, p)) {
    const Vec xb = x_bar_of(ctx, p, pt);
    const PenaltyReport rep =
        penalty_threshold(ctx.inst, pt, xb, param(p, "lambda_max", 100.0), param(p, "bisect_tol", 1e-3), po);
    ok = ok && rep.flags.empty();
    rows.push_back({{"p_bar", to_json(pt)},
                    {"x_bar", to_json(xb)},
                    {"lambda_star_estimate", num(rep.lambda_star_estimate)},
                    {"bracket", {num(rep.lambda_fail), num(rep.lambda_ok)}},
                    {"checks", rep.verified_lambdas.size()},
                    {"flags", rep.flags},
                    {"note", rep.note}});
  }
  return json_result("lambda_star", {{"points", rows}}, ok ? "ok" : "violations");
}

TaskResult run_calmness(Context& ctx, const Json& p) {
  Json rows = Json::array();
  for (const Vec& pt : points_of(ctx, p)) {
    const Vec xb = x_bar_of(ctx, p, pt);
    const CalmnessEstimate est = calmness_estimate(ctx.inst, pt, xb, param(p, "r", 0.3), param(p, "p_samples", 500),
                                                   param(p, "x_samples", 200), seed_of(ctx, p));
    rows.push_back({{"p_bar", to_json(pt)},
                    {"x_bar", to_json(xb)},
                    {"r", est.r},
                    {"samples", est.samples},
                    {"empty_probes", est.empty_probes},
                    {"inf_quotient", num(est.inf_quotient)},
                    {"lambda_bound", num(est.lambda_bound)},
                    {"seed", est.seed}});
  }
  return json_result("calmness_lambda", {{"points", rows}});
}

TaskResult run_subreg(Context& ctx, const Json& p) {
  Json rows = Json::array();
  bool ok = true;
  for (const Vec& pt : points_of(ctx, p)) {
    const Vec xb = x_bar_of(ctx, p, pt);
    const SubregReport rep =
        uniform_subreg_check(ctx.inst, pt, xb, param(p, "r_beta", 0.5), param(p, "samples", 200), seed_of(ctx, p));
    ok = ok && rep.holds_at_sampling;
    rows.push_back({{"p_bar", to_json(pt)},
                    {"x_bar", to_json(xb)},
                    {"beta_estimate", num(rep.beta_estimate)},
                    {"holds_at_sampling", rep.holds_at_sampling},
                    {"samples", rep.samples},
                    {"feasible_skipped", rep.feasible_skipped},
                    {"infeasible_in_p", rep.infeasible_in_p},
                    {"flags", rep.flags}});
  }
  return json_result("beta", {{"points", rows}}, ok ? "ok" : "violations");
}

const std::map<std::string, std::string>& quantities() {
  static const std::map<std::string, std::string> q = {
      {"feasibility", "S(p)"},        {"value-grid", "val"},       {"convexity-audit", "val"},
      {"lipschitz-audit", "val"},     {"subdiff", "subdiff_val"},  {"increase-cert", "alpha_F"},
      {"error-bound-audit", "dist_to_S"}, {"penalty", "lambda_star"}, {"calmness", "calmness_lambda"},
      {"subreg-check", "beta"}};
  return q;
}

TaskResult dispatch(Context& ctx, const TaskSpec& t) {
  const Json& p = t.params;
  if (t.type == "feasibility") return run_feasibility(ctx, p);
  if (t.type == "value-grid") return run_value_grid(ctx, p);
  if (t.type == "convexity-audit") return run_convexity(ctx, p);
  if (t.type == "lipschitz-audit") return run_lipschitz(ctx, p);
  if (t.type == "subdiff") return run_subdiff(ctx, p);
  if (t.type == "increase-cert") return run_increase(ctx, p);
  if (t.type == "error-bound-audit") return run_error_bound(ctx, p);
  if (t.type == "penalty") return run_penalty(ctx, p);
  if (t.type == "calmness") return run_calmness(ctx, p);
  if (t.type == "subreg-check") return run_subreg(ctx, p);
  throw Error("config_task", "unknown task type \"" + t.type + "\"");
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  out << body;
}

}  // namespace

bool RunReport::all_ok() const {
  for (const TaskOutcome& t : tasks) {
    if (t.status != "ok") return false;
  }
  return true;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunReport run(const InstanceConfig& cfg, const std::filesystem::path& out_dir, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);
  const ProblemInstance inst = cfg.build();
  Context ctx{cfg, inst, opts, std::nullopt};

  std::vector<TaskSpec> tasks;
  for (const std::string& type : task_order()) {
    if (!opts.only.empty() && !opts.only.count(type)) continue;
    bool found = false;
    for (const TaskSpec& t : cfg.tasks) {
      if (t.type == type) {
        tasks.push_back(t);
        found = true;
      }
    }
    if (!found && opts.only.count(type)) tasks.push_back({type, Json::object()});
  }

  RunReport rep;
  rep.tool_version = kToolVersion;
  rep.config_digest = config_digest(cfg);
  rep.seed = opts.seed;
  std::map<std::string, int> uses;
  for (const TaskSpec& t : tasks) {
    TaskOutcome o;
    o.type = t.type;
    o.quantity = quantities().at(t.type);
    const int k = ++uses[t.type];
    const std::string stem = k == 1 ? t.type : t.type + "_" + std::to_string(k);
    try {
      TaskResult r = dispatch(ctx, t);
      o.status = r.status;
      o.artifact = stem + "." + r.extension;
      write_file(out_dir / o.artifact, r.body);
    } catch (const Error& e) {
      o.status = "failed";
      o.error = e.code();
    } catch (const std::exception& e) {
      o.status = "failed";
      o.error = "internal";
    }
    rep.tasks.push_back(std::move(o));
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json summary = {{"tool_version", rep.tool_version},
                  {"config_name", cfg.name},
                  {"config_digest", rep.config_digest},
                  {"seed", rep.seed},
                  {"wall_time_s", rep.wall_time_s},
                  {"ok", rep.all_ok()}};
  Json list = Json::array();
  for (const TaskOutcome& o : rep.tasks) {
    Json j = {{"type", o.type}, {"quantity", o.quantity}, {"status", o.status}};
    j["error"] = o.error.empty() ? Json(nullptr) : Json(o.error);
    j["artifact"] = o.artifact.empty() ? Json(nullptr) : Json(o.artifact);
    list.push_back(j);
  }
  summary["tasks"] = list;
  write_file(out_dir / "run.json", summary.dump(2) + "\n");
  return rep;
}

}  // namespace svi
