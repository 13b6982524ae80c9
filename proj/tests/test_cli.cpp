#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtwlab/cli.hpp"
#include "mtwlab/stability_lab.hpp"

using namespace mtw;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "mtwlab_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out_file(const std::string& name) { return (scratch() / name).string(); }

const std::string kM1 = R"({"points": [[0,0,1],[1,0,0],[0,1,0]], "weights": [0.2, 0.3, 0.5]})";

}  // namespace

TEST_CASE("all subcommands are registered") {
  const std::vector<std::string> expected{"cost-eval",        "cexp-check",     "mtw-verify",     "c-convexity",
                                          "concavity-certify", "ot-solve",       "w1",             "stability-target",
                                          "stability-both",   "gap-check",      "holder-check",   "support-check",
                                          "gauss-run",        "reflector-run"};
  CHECK(subcommand_names() == expected);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"unknown"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"w1", "--bogus", "1"}).code == kExitUsage);
  CHECK(run({"mtw-verify", "--cost", "reflector"}).code == kExitUsage);
  CHECK(run({"mtw-verify", "--cost", "nope", "--seed", "1"}).code == kExitUsage);
  CHECK(run({"w1", "--a", "/nonexistent_dir/a.json", "--b", "/nonexistent_dir/b.json"}).code == kExitUsage);
  CHECK(run({"cexp-check", "--seed", "1", "--threads", "0"}).code == kExitUsage);
  CHECK(run({"stability-target", "--seed", "1", "--perturbations", "0.2,0.1"}).code == kExitUsage);
}

TEST_CASE("seed is required on stochastic subcommands") {
  for (const char* sub : {"cexp-check", "mtw-verify", "c-convexity", "stability-target", "stability-both",
                          "gap-check", "holder-check", "support-check", "gauss-run", "reflector-run"}) {
    const Run r = run({sub});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--seed") != std::string::npos);
  }
}

TEST_CASE("w1 of a measure with itself prints 0.0") {
  const std::string m1 = file("m1.json", kM1);
  const Run r = run({"w1", "--a", m1, "--b", m1, "--out", out_file("w1.json")});
  CHECK(r.code == kExitPass);
  CHECK(r.out.starts_with("config {"));
  CHECK(r.out.ends_with("\n0.0\n"));
  CHECK(nlohmann::json::parse(slurp(out_file("w1.json"))).at("w1") == 0.0);
}

TEST_CASE("mtw-verify writes the weak-MTW constant") {
  const std::string path = out_file("r.json");
  const Run r = run({"mtw-verify", "--cost", "reflector", "--eps", "0.3", "--samples", "40", "--seed", "1", "--out", path});
  CHECK(r.code == kExitPass);
  const auto doc = nlohmann::json::parse(slurp(path));
  REQUIRE(doc.contains("mtw_constant_C"));
  CHECK(doc.at("mtw_constant_C").get<double>() == doctest::Approx(1.5).epsilon(1e-3));
  const Run bounded = run({"mtw-verify", "--samples", "40", "--seed", "1", "--max_C", "1", "--out", path});
  CHECK(bounded.code == kExitBoundViolation);
}

TEST_CASE("ot-solve reports values and infeasibility") {
  const std::string a = file("a.json", kM1);
  const std::string b = file("b.json", R"({"points": [[0,0,-1],[-1,0,0]], "weights": [0.5, 0.5]})");
  const std::string path = out_file("ot.json");
  CHECK(run({"ot-solve", "--a", a, "--b", b, "--out", path}).code == kExitPass);
  const auto doc = nlohmann::json::parse(slurp(path));
  // N -> S and e1 -> -e1 cost -ln 2 each; e2 is orthogonal to both targets.
  CHECK(doc.at("value").get<double>() == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-11));
  const std::string far = file("far.json", R"({"points": [[0,0,1]], "weights": [1]})");
  const std::string south = file("south.json", R"({"points": [[0,0,-1]], "weights": [1]})");
  const Run inf = run({"ot-solve", "--cost", "gauss", "--a", far, "--b", south, "--out", path});
  CHECK(inf.code == kExitBoundViolation);
  CHECK(nlohmann::json::parse(slurp(path)).at("feasible") == false);
}

TEST_CASE("config file keys win with a warning") {
  const std::string cfg = file("cfg.json", R"({"n_source": 30, "n_target": 30, "seed": 4})");
  const std::string path = out_file("cfg.csv");
  const Run r = run({"stability-target", "--config", cfg, "--n_source", "20", "--n_target", "30", "--out", path});
  CHECK(r.code == kExitPass);
  CHECK(r.err.find("warning: config file overrides --n_source") != std::string::npos);
  CHECK(r.err.find("--n_target") == std::string::npos);
  CHECK(r.out.find("\"n_source\":30") != std::string::npos);
  CHECK(run({"w1", "--config", file("bad.json", R"({"nope": 1})")}).code == kExitUsage);
  CHECK(run({"stability-target", "--config", file("badtype.json", R"({"seed": "x"})")}).code == kExitUsage);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch() / "env";
  fs::create_directories(dir);
  ::setenv("MTWLAB_OUT_DIR", dir.c_str(), 1);
  const Run r = run({"cexp-check", "--samples", "20", "--seed", "2"});
  ::unsetenv("MTWLAB_OUT_DIR");
  CHECK(r.code == kExitPass);
  CHECK(fs::exists(dir / "cexp-check.csv"));
}

TEST_CASE("row subcommands match the library exactly") {
  SweepConfig c;
  c.n_source = c.n_target = 40;
  c.seed = 6;
  const std::string p1 = out_file("golden_target.json");
  const Run r = run({"stability-target", "--n_source", "40", "--n_target", "40", "--seed", "6", "--format", "json",
                     "--out", p1});
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("stability-target: rows=7 pass=7") != std::string::npos);
  CHECK(parse_json_report(slurp(p1)) == run_target_stability(c));
  CHECK(slurp(p1) == render_report(run_target_stability(c), ReportFormat::Json));

  c.n_instances = 2;
  c.n_plans = 5;
  const std::string p2 = out_file("golden_gap.csv");
  CHECK(run({"gap-check", "--n_source", "40", "--n_target", "40", "--n_instances", "2", "--n_plans", "5", "--seed",
             "6", "--out", p2})
            .code == kExitPass);
  CHECK(slurp(p2) == render_report(run_gap_bound(c), ReportFormat::Csv));

  const std::string p3 = out_file("golden_reflector.csv");
  CHECK(run({"reflector-run", "--n_grid", "40", "--seed", "3", "--out", p3}).code == kExitPass);
  CHECK(slurp(p3) == render_report(run_reflector_synthesis(40, 3), ReportFormat::Csv));
}

TEST_CASE("identical invocations give byte-identical reports") {
  const std::string a = out_file("det_a.csv"), b = out_file("det_b.csv");
  const std::vector<std::string> base{"stability-both", "--n_source", "30", "--n_target", "30", "--seed", "2"};
  auto with = [&](const std::string& p) {
    auto v = base;
    v.push_back("--out");
    v.push_back(p);
    return v;
  };
  const Run r1 = run(with(a));
  const Run r2 = run(with(b));
  CHECK(r1.code == kExitPass);
  CHECK(r1.out.find("slope=") != std::string::npos);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("cost-eval and concavity-certify") {
  const std::string path = out_file("ce.json");
  CHECK(run({"cost-eval", "--x", "0,0,1", "--y", "1,0,0", "--out", path}).code == kExitPass);
  CHECK(nlohmann::json::parse(slurp(path)).at("cost").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(run({"cost-eval", "--x", "0,0,2", "--y", "1,0,0", "--out", path}).code == kExitUsage);
  const std::string psi = file("psi.json", R"({"points": [[0,0,1],[0,0,-1],[1,0,0],[-1,0,0]], "values": [0,0,0,0]})");
  CHECK(run({"concavity-certify", "--psi", psi, "--n_source", "100", "--out", path}).code == kExitPass);
  CHECK(nlohmann::json::parse(slurp(path)).contains("strong_constant_C"));
}
