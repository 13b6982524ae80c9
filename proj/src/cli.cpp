#include "mtwlab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mtwlab/c_geometry.hpp"
#include "mtwlab/exec.hpp"
#include "mtwlab/io.hpp"
#include "mtwlab/report.hpp"
#include "mtwlab/rng.hpp"
#include "mtwlab/stability_lab.hpp"

namespace mtw {

using nlohmann::ordered_json;

namespace {

enum class Kind { Real, Int, Seed, Text, RealList, Flag, Path };

struct Param {
  std::string name;
  Kind kind;
  ordered_json fallback;  // null: optional without default
  std::string help;
  bool required = false;
};

struct Context {
  ordered_json cfg;
  std::ostream& out;
  std::ostream& err;
  std::string subcommand;

  [[nodiscard]] bool has(const std::string& k) const { return cfg.contains(k) && !cfg.at(k).is_null(); }
  [[nodiscard]] double real(const std::string& k) const { return cfg.at(k).get<double>(); }
  [[nodiscard]] int integer(const std::string& k) const { return cfg.at(k).get<int>(); }
  [[nodiscard]] std::uint64_t seed() const { return cfg.at("seed").get<std::uint64_t>(); }
  [[nodiscard]] std::string text(const std::string& k) const { return cfg.at(k).get<std::string>(); }
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<int(Context&)> run;
};

std::string print_number(double v) {
  if (v == 0.0) v = 0.0;
  std::string s = format_number(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

double parse_real(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw ConfigError("--" + key + ": expected a number, got '" + s + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw ConfigError("--" + key + ": expected an integer, got '" + s + "'");
  return v;
}

ordered_json from_flag(const Param& p, const std::string& s) {
  switch (p.kind) {
    case Kind::Real:
      return parse_real(p.name, s);
    case Kind::Int:
      return parse_integer(p.name, s);
    case Kind::Seed: {
      const long long v = parse_integer(p.name, s);
      if (v < 0) throw ConfigError("--seed must be nonnegative");
      return static_cast<std::uint64_t>(v);
    }
    case Kind::RealList: {
      ordered_json a = ordered_json::array();
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) a.push_back(parse_real(p.name, item));
      return a;
    }
    case Kind::Flag:
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw ConfigError("--" + p.name + ": expected true or false, got '" + s + "'");
    case Kind::Text:
    case Kind::Path:
      return s;
  }
  return nullptr;
}

void check_type(const Param& p, const ordered_json& v) {
  bool ok = false;
  switch (p.kind) {
    case Kind::Real:
      ok = v.is_number();
      break;
    case Kind::Int:
      ok = v.is_number_integer();
      break;
    case Kind::Seed:
      ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
      break;
    case Kind::RealList:
      ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const ordered_json& e) { return e.is_number(); });
      break;
    case Kind::Flag:
      ok = v.is_boolean();
      break;
    case Kind::Text:
    case Kind::Path:
      ok = v.is_string();
      break;
  }
  if (!ok) throw ConfigError("config key '" + p.name + "' has the wrong type");
}

std::string out_path(const Context& ctx, const std::string& ext) {
  if (ctx.has("out")) return ctx.text("out");
  const char* dir = std::getenv("MTWLAB_OUT_DIR");
  const std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : std::filesystem::path(".");
  return (base / (ctx.subcommand + ext)).string();
}

ReportFormat report_format(const Context& ctx) {
  const std::string f = ctx.text("format");
  if (f == "csv") return ReportFormat::Csv;
  if (f == "json") return ReportFormat::Json;
  throw ConfigError("--format must be csv or json");
}

int finish_rows(Context& ctx, const std::vector<BoundRow>& rows, const std::string& extra = "") {
  const ReportFormat fmt = report_format(ctx);
  const std::string path = out_path(ctx, fmt == ReportFormat::Csv ? ".csv" : ".json");
  emit_report(rows, path, fmt);
  const ReportSummary s = summarize(rows);
  ctx.out << ctx.subcommand << ": rows=" << s.rows << " pass=" << s.pass_count
          << " worst_ratio=" << print_number(s.worst_ratio) << extra << " report=" << path << '\n';
  return s.pass_count == s.rows ? kExitPass : kExitBoundViolation;
}

void write_object(Context& ctx, const ordered_json& doc) { write_text_file(out_path(ctx, ".json"), doc.dump(2) + "\n"); }

CostModel model_for(const Context& ctx) {
  const CostKind kind = parse_cost_kind(ctx.text("cost"));
  const int dim = ctx.integer("dim");
  if (dim < 2 || dim > kMaxDim) throw ConfigError("--dim must be in [2, 8]");
  if (kind == CostKind::Reflector || kind == CostKind::Gauss) return {kind, GroundSpace::sphere(dim)};
  Vec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = -1.0;
    hi[i] = 1.0;
  }
  return {kind, GroundSpace::box(lo, hi)};
}

std::vector<double> real_list(const Context& ctx, const std::string& k) { return ctx.cfg.at(k).get<std::vector<double>>(); }

Vec point_arg(const Context& ctx, const std::string& k) {
  if (!ctx.has(k)) throw ConfigError("--" + k + " is required");
  const auto c = real_list(ctx, k);
  if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError("--" + k + ": bad dimension");
  return Vec(std::span<const double>(c));
}

SweepConfig sweep_config(const Context& ctx) {
  SweepConfig c;
  c.model = parse_cost_kind(ctx.text("cost"));
  c.eps = ctx.real("eps");
  c.seed = ctx.seed();
  const std::pair<const char*, int*> counts[] = {{"n_source", &c.n_source}, {"n_target", &c.n_target},
                                                 {"n_instances", &c.n_instances}, {"n_plans", &c.n_plans},
                                                 {"n_pairs", &c.n_pairs}};
  for (const auto& [k, field] : counts)
    if (ctx.has(k)) *field = ctx.integer(k);
  if (ctx.has("perturbations")) c.perturbations = real_list(ctx, "perturbations");
  if (ctx.has("beta")) c.beta = ctx.real("beta");
  if (ctx.has("binning")) c.binning = ctx.cfg.at("binning").get<bool>();
  c.validate();
  return c;
}

Param seed_param() { return {"seed", Kind::Seed, nullptr, "master seed (required)", true}; }
Param cost_param(const char* def) { return {"cost", Kind::Text, def, "reflector | gauss | neg_inner | quadratic"}; }
Param eps_param(double def) { return {"eps", Kind::Real, def, "domain parameter of D_eps"}; }
Param int_param(const char* name, int def, const char* help) { return {name, Kind::Int, def, help}; }
Param dim_param() { return int_param("dim", 3, "ambient dimension"); }

std::vector<Param> sweep_params(int n, std::vector<double> perturb) {
  return {cost_param("reflector"),
          eps_param(0.3),
          int_param("n_source", n, "source grid size"),
          int_param("n_target", n, "target grid size"),
          {"perturbations", Kind::RealList, perturb, "perturbation magnitudes, ascending"},
          seed_param()};
}

int cmd_cost_eval(Context& ctx) {
  const CostModel model = model_for(ctx);
  const Vec x = point_arg(ctx, "x");
  const Vec y = point_arg(ctx, "y");
  if (x.dim() != model.space().ambient_dim() || y.dim() != model.space().ambient_dim())
    throw ConfigError("--x/--y dimension must equal --dim");
  if (!model.space().contains(x) || !model.space().contains(y)) throw ConfigError("--x/--y not on the ground space");
  const ExtendedReal c = cost(model, x, y);
  ordered_json doc;
  doc["cost"] = c.is_finite() ? json_number(c.value()) : ordered_json(nullptr);
  doc["finite"] = c.is_finite();
  doc["distance"] = json_number(geodesic_distance(model.space(), x, y));
  if (c.is_finite()) {
    doc["grad_x"] = json_vec(grad_x(model, x, y));
    doc["grad_y"] = json_vec(grad_y(model, x, y));
  }
  if (ctx.has("eps")) doc["in_domain"] = in_domain(model, x, y, ctx.real("eps"));
  write_object(ctx, doc);
  ctx.out << "cost-eval: cost=" << (c.is_finite() ? print_number(c.value()) : std::string("inf"))
          << " report=" << out_path(ctx, ".json") << '\n';
  return kExitPass;
}

int cmd_cexp_check(Context& ctx) {
  const CostModel model = model_for(ctx);
  const double eps = ctx.real("eps");
  const int n = ctx.integer("samples");
  if (n < 1) throw ConfigError("--samples must be positive");
  Rng rng(ctx.seed());
  std::vector<BoundRow> rows;
  for (int k = 0; k < n; ++k) {
    const auto [x, y] = sample_domain_pair(model, eps, rng);
    const Vec back = cexp(model, x, -grad_x(model, x, y));
    const double e = norm(back - y);
    rows.push_back(make_row("cexp", k, e, 1e-9, {{"distance", geodesic_distance(model.space(), x, y)}}));
  }
  return finish_rows(ctx, rows);
}

int cmd_mtw_verify(Context& ctx) {
  const CostModel model = model_for(ctx);
  const MtwReport r = verify_mtww(model, ctx.real("eps"), ctx.integer("samples"), ctx.integer("dirs"), ctx.seed());
  ordered_json doc;
  doc["cost"] = to_string(model.kind());
  doc["eps"] = json_number(ctx.real("eps"));
  doc["mtw_constant_C"] = json_number(r.mtw_constant_C);
  doc["min_tensor_value"] = json_number(r.min_tensor_value);
  doc["n_points"] = r.n_points;
  doc["n_dirs"] = r.n_dirs;
  doc["n_evaluated"] = r.n_evaluated;
  doc["n_skipped"] = r.n_skipped;
  doc["noise_floor"] = json_number(r.noise_floor);
  if (r.violating_pair) {
    const MtwSample& s = *r.violating_pair;
    doc["violating_pair"] = {{"x", json_vec(s.x)},
                             {"y", json_vec(s.y)},
                             {"zeta", json_vec(s.zeta)},
                             {"eta_tilde", json_vec(s.eta_tilde)},
                             {"value", json_number(s.value)},
                             {"cosine", json_number(s.cosine)}};
  } else {
    doc["violating_pair"] = nullptr;
  }
  write_object(ctx, doc);
  ctx.out << "mtw-verify: mtw_constant_C=" << print_number(r.mtw_constant_C)
          << " min_tensor_value=" << print_number(r.min_tensor_value) << " report=" << out_path(ctx, ".json") << '\n';
  if (ctx.has("max_C") && r.mtw_constant_C > ctx.real("max_C")) return kExitBoundViolation;
  return kExitPass;
}

int cmd_c_convexity(Context& ctx) {
  const CostModel model = model_for(ctx);
  const ConvexityReport r =
      check_c_convexity(model, ctx.real("eps"), ctx.integer("samples"), ctx.integer("n_t"), ctx.seed());
  ordered_json doc;
  doc["cost"] = to_string(model.kind());
  doc["eps"] = json_number(ctx.real("eps"));
  doc["n_pairs"] = r.n_pairs;
  doc["n_t"] = r.n_t;
  doc["violations"] = r.violations.size();
  doc["max_norm_identity_error"] = json_number(r.max_norm_identity_error);
  doc["max_norm_excess"] = json_number(r.max_norm_excess);
  doc["examples"] = ordered_json::array();
  for (std::size_t k = 0; k < r.violations.size() && k < 10; ++k) {
    const auto& v = r.violations[k];
    doc["examples"].push_back({{"x", json_vec(v.x)},
                               {"y0", json_vec(v.y0)},
                               {"y1", json_vec(v.y1)},
                               {"t", json_number(v.t)},
                               {"distance", json_number(v.distance)}});
  }
  write_object(ctx, doc);
  ctx.out << "c-convexity: violations=" << r.violations.size() << " report=" << out_path(ctx, ".json") << '\n';
  return r.violations.empty() ? kExitPass : kExitBoundViolation;
}

int cmd_concavity_certify(Context& ctx) {
  if (!ctx.has("psi")) throw ConfigError("--psi is required");
  GroundSpace sp = GroundSpace::sphere(3);
  const Potential psi = potential_from_json(read_json_file(ctx.text("psi")), &sp);
  const CostKind kind = parse_cost_kind(ctx.text("cost"));
  const CostModel model(kind, sp);
  PointList X;
  if (ctx.has("sources")) {
    X = measure_from_json(read_json_file(ctx.text("sources"))).points;
  } else {
    if (!sp.is_sphere() || sp.ambient_dim() != 3) throw ConfigError("--sources is required off the 2-sphere");
    X = fibonacci_grid(3, ctx.integer("n_source"));
  }
  const ConcavityCertificate c = certify_strong_c_concavity(model, psi, ctx.real("eps"), X, ctx.real("tol"));
  ordered_json doc;
  doc["cost"] = to_string(kind);
  doc["eps"] = json_number(ctx.real("eps"));
  doc["is_c_concave"] = c.is_c_concave;
  doc["strong_constant_C"] = json_number(c.strong_constant_C);
  doc["n_triples"] = c.n_triples;
  doc["n_admissible_pairs"] = c.n_admissible_pairs;
  doc["n_empty_superdifferential"] = c.n_empty_superdifferential;
  if (c.worst_triple)
    doc["worst_triple"] = {{"x", json_vec(c.worst_triple->x)},
                           {"y", json_vec(c.worst_triple->y)},
                           {"z", json_vec(c.worst_triple->z)}};
  write_object(ctx, doc);
  ctx.out << "concavity-certify: is_c_concave=" << (c.is_c_concave ? "true" : "false")
          << " strong_constant_C=" << print_number(c.strong_constant_C) << " report=" << out_path(ctx, ".json")
          << '\n';
  return c.is_c_concave ? kExitPass : kExitBoundViolation;
}

std::pair<DiscreteMeasure, DiscreteMeasure> measure_pair(const Context& ctx) {
  if (!ctx.has("a") || !ctx.has("b")) throw ConfigError("--a and --b are required");
  DiscreteMeasure a = measure_from_json(read_json_file(ctx.text("a")));
  DiscreteMeasure b = measure_from_json(read_json_file(ctx.text("b")));
  if (!(a.space == b.space)) throw ConfigError("--a and --b live on different ground spaces");
  return {std::move(a), std::move(b)};
}

int cmd_ot_solve(Context& ctx) {
  const auto [a, b] = measure_pair(ctx);
  const CostKind kind = parse_cost_kind(ctx.text("cost"));
  const CostModel model(kind, a.space);
  try {
    const SolveResult r = solve_discrete_ot(model, a, b);
    ordered_json doc;
    doc["cost"] = to_string(kind);
    doc["value"] = json_number(r.primal_value);
    doc["duality_gap"] = json_number(r.duality_gap);
    doc["plan"] = plan_to_json(r.plan);
    doc["phi"] = potential_to_json(a.space, r.dual_phi);
    doc["psi"] = potential_to_json(b.space, r.dual_psi);
    write_object(ctx, doc);
    ctx.out << "ot-solve: value=" << print_number(r.primal_value) << " duality_gap=" << print_number(r.duality_gap)
            << " report=" << out_path(ctx, ".json") << '\n';
    return kExitPass;
  } catch (const InfeasibleError& e) {
    write_object(ctx, {{"cost", to_string(kind)}, {"feasible", false}, {"reason", e.what()}});
    ctx.err << "ot-solve: infeasible: " << e.what() << '\n';
    return kExitBoundViolation;
  }
}

int cmd_w1(Context& ctx) {
  const auto [a, b] = measure_pair(ctx);
  const double w = wasserstein1(a.space, a, b);
  write_object(ctx, {{"w1", json_number(w)}});
  ctx.out << print_number(w) << '\n';
  return kExitPass;
}

int cmd_stability_target(Context& ctx) {
  return finish_rows(ctx, run_target_stability(sweep_config(ctx)));
}

int cmd_stability_both(Context& ctx) {
  const auto rows = run_both_measures(sweep_config(ctx));
  return finish_rows(ctx, rows, " slope=" + print_number(loglog_slope(rows, "eps_w1")));
}

int cmd_gap_check(Context& ctx) { return finish_rows(ctx, run_gap_bound(sweep_config(ctx))); }

int cmd_holder_check(Context& ctx) { return finish_rows(ctx, run_holder_experiment(sweep_config(ctx))); }

int cmd_support_check(Context& ctx) { return finish_rows(ctx, run_support_localization(sweep_config(ctx))); }

int cmd_gauss_run(Context& ctx) {
  GaussExperimentConfig g;
  g.n_grid = ctx.integer("n_grid");
  g.r = ctx.real("r");
  g.R = ctx.real("R");
  g.seed = ctx.seed();
  if (g.n_grid < 10) throw ConfigError("--n_grid must be at least 10");
  auto [K0, family] = default_gauss_family(g.seed);
  if (ctx.has("bodies")) {
    family.clear();
    const ordered_json j = read_json_file(ctx.text("bodies"));
    if (!j.is_array()) throw ConfigError("--bodies must hold an array of {\"name\", \"vertices\"}");
    for (std::size_t k = 0; k < j.size(); ++k)
      family.push_back({j[k].value("name", "body" + std::to_string(k)), body_from_json(j[k])});
  }
  return finish_rows(ctx, run_gauss_experiment(K0, family, g));
}

int cmd_reflector_run(Context& ctx) {
  const int n = ctx.integer("n_grid");
  if (n < 2) throw ConfigError("--n_grid must be at least 2");
  return finish_rows(ctx, run_reflector_synthesis(n, ctx.seed()));
}

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = [] {
    std::vector<Command> c;
    c.push_back({"cost-eval",
                 "evaluate a cost, its gradients and the domain predicate at one pair",
                 {cost_param("reflector"), dim_param(), {"x", Kind::RealList, nullptr, "first point"},
                  {"y", Kind::RealList, nullptr, "second point"}, {"eps", Kind::Real, nullptr, "domain parameter"}},
                 cmd_cost_eval});
    c.push_back({"cexp-check",
                 "check cexp_x(-grad_x c(x,y)) = y on sampled pairs",
                 {cost_param("reflector"), dim_param(), eps_param(0.3), int_param("samples", 200, "pairs"),
                  seed_param()},
                 cmd_cexp_check});
    c.push_back({"mtw-verify",
                 "sample the MTW tensor and report the weak-MTW constant",
                 {cost_param("reflector"), dim_param(), eps_param(0.3), int_param("samples", 200, "base points"),
                  int_param("dirs", 20, "direction pairs per point"), seed_param(),
                  {"max_C", Kind::Real, nullptr, "fail when mtw_constant_C exceeds this"}},
                 cmd_mtw_verify});
    c.push_back({"c-convexity",
                 "sample c-segments and report exits from D_eps",
                 {cost_param("reflector"), dim_param(), eps_param(0.3), int_param("samples", 500, "segment pairs"),
                  int_param("n_t", 21, "points per segment"), seed_param()},
                 cmd_c_convexity});
    c.push_back({"concavity-certify",
                 "brute-force strong c-concavity certificate of a grid potential",
                 {cost_param("reflector"), eps_param(0.3), {"psi", Kind::Path, nullptr, "potential JSON"},
                  {"sources", Kind::Path, nullptr, "source points (measure JSON)"},
                  int_param("n_source", 400, "Fibonacci source grid size when --sources is absent"),
                  {"tol", Kind::Real, 1e-9, "superdifferential tolerance"}},
                 cmd_concavity_certify});
    c.push_back({"ot-solve",
                 "exact discrete optimal transport",
                 {cost_param("reflector"), {"a", Kind::Path, nullptr, "source measure JSON"},
                  {"b", Kind::Path, nullptr, "target measure JSON"}},
                 cmd_ot_solve});
    c.push_back({"w1",
                 "exact Wasserstein-1 distance",
                 {{"a", Kind::Path, nullptr, "first measure JSON"}, {"b", Kind::Path, nullptr, "second measure JSON"}},
                 cmd_w1});
    auto target = sweep_params(100, {0.01, 0.02, 0.05, 0.1, 0.2});
    target.push_back({"binning", Kind::Flag, true, "add the nearest-atom discretization row"});
    c.push_back({"stability-target", "target-perturbation stability sweep", target, cmd_stability_target});
    c.push_back({"stability-both", "both-measures stability sweep", sweep_params(60, {0.01, 0.02, 0.05, 0.1, 0.2}),
                 cmd_stability_both});
    auto gap = sweep_params(100, {0.01});
    gap.push_back(int_param("n_instances", 5, "instances"));
    gap.push_back(int_param("n_plans", 50, "mixture plans per instance"));
    c.push_back({"gap-check", "suboptimality-gap bounds on mixture plans", gap, cmd_gap_check});
    auto holder = sweep_params(100, {0.01});
    holder.push_back(int_param("n_pairs", 500, "point pairs"));
    c.push_back({"holder-check", "1/2-Holder bound for the induced map", holder, cmd_holder_check});
    auto support = sweep_params(80, {0.01});
    support.push_back(int_param("n_instances", 20, "instances"));
    support.push_back({"beta", Kind::Real, 0.4, "concentration scale"});
    c.push_back({"support-check", "support localization of reflector plans", support, cmd_support_check});
    c.push_back({"gauss-run",
                 "Gauss-curvature stability on a family of convex bodies",
                 {int_param("n_grid", 2000, "normal grid size"), {"r", Kind::Real, 0.9, "inner radius"},
                  {"R", Kind::Real, 1.1, "outer radius"}, seed_param(),
                  {"bodies", Kind::Path, nullptr, "body family JSON"}},
                 cmd_gauss_run});
    c.push_back({"reflector-run",
                 "reflector synthesis round trip on antipodal grids",
                 {int_param("n_grid", 200, "grid size"), seed_param()},
                 cmd_reflector_run});
    for (auto& cmd : c) {
      cmd.params.push_back({"out", Kind::Path, nullptr, "report path"});
      cmd.params.push_back({"format", Kind::Text, "csv", "csv | json for row reports"});
      cmd.params.push_back({"threads", Kind::Int, nullptr, "worker thread cap"});
    }
    return c;
  }();
  return cmds;
}

}  // namespace

std::vector<std::string> subcommand_names() {
  std::vector<std::string> n;
  for (const auto& c : commands()) n.push_back(c.name);
  return n;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mtwlab: optimal transport stability checks", "mtwlab"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; its keys override flags");
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "JSON config; its keys override flags");
    for (const auto& p : cmd.params) sub->add_option("--" + p.name, raw[cmd.name][p.name], p.help);
    subs[cmd.name] = sub;
  }
  if (!args.empty() && !args.front().starts_with("-") && !subs.contains(args.front())) {
    err << "error: unknown subcommand '" << args.front() << "'\n";
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands())
    if (subs[c.name]->parsed()) cmd = &c;
  if (!cmd) {
    err << "error: no subcommand\n";
    return kExitUsage;
  }
  Context ctx{ordered_json::object(), out, err, cmd->name};
  try {
    for (const auto& p : cmd->params) {
      const CLI::Option* opt = subs[cmd->name]->get_option("--" + p.name);
      if (opt->count() > 0) ctx.cfg[p.name] = from_flag(p, raw[cmd->name][p.name]);
    }
    if (!config_path.empty()) {
      const ordered_json file = read_json_file(config_path);
      if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
      for (const auto& [k, v] : file.items()) {
        const auto it = std::find_if(cmd->params.begin(), cmd->params.end(), [&](const Param& p) { return p.name == k; });
        if (it == cmd->params.end()) throw ConfigError("unknown config key '" + k + "' for " + cmd->name);
        check_type(*it, v);
        if (ctx.cfg.contains(k) && ctx.cfg[k] != v)
          err << "warning: config file overrides --" << k << " (" << ctx.cfg[k].dump() << " -> " << v.dump() << ")\n";
        ctx.cfg[k] = v;
      }
    }
    ordered_json resolved = ordered_json::object();
    for (const auto& p : cmd->params) {
      if (ctx.cfg.contains(p.name)) {
        resolved[p.name] = ctx.cfg[p.name];
      } else if (p.required) {
        throw ConfigError("--" + p.name + " is required for " + cmd->name);
      } else {
        resolved[p.name] = p.fallback;
      }
    }
    ctx.cfg = resolved;
    if (ctx.has("threads")) {
      if (ctx.integer("threads") < 1) throw ConfigError("--threads must be positive");
      set_thread_count(ctx.integer("threads"));
    }
    out << "config " << ctx.cfg.dump() << '\n';
    return cmd->run(ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBoundViolation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace mtw
