#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtwlab/stability_lab.hpp"

using namespace mtw;

namespace {

SweepConfig small_config(int n, std::uint64_t seed) {
  SweepConfig c;
  c.n_source = n;
  c.n_target = n;
  c.seed = seed;
  return c;
}

bool all_pass(const std::vector<BoundRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const BoundRow& r) { return r.pass; });
}

}  // namespace

TEST_CASE("sweep config validation") {
  SweepConfig c;
  CHECK_NOTHROW(c.validate());
  c.perturbations = {0.1, 0.05};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.perturbations = {0.0, 0.1};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SweepConfig{};
  c.eps = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SweepConfig{};
  c.model = CostKind::Gauss;
  c.eps = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("target stability rows") {
  const auto rows = run_target_stability(small_config(60, 3));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].t == 0.0);
  CHECK(rows[0].lhs == 0.0);
  CHECK(rows[0].rhs == 0.0);
  CHECK(all_pass(rows));
  for (const auto& r : rows) CHECK(r.constants.at("C") > 0.0);
  const BoundRow& bin = rows.back();
  CHECK(bin.label == "binning");
  CHECK(bin.constants.at("w1") <= bin.constants.at("h"));
  CHECK(bin.rhs == doctest::Approx((bin.constants.at("lip_psi0") + bin.constants.at("lip_psih")) * bin.t));
}

TEST_CASE("target stability rejects non-square grids") {
  SweepConfig c = small_config(40, 1);
  c.n_target = 30;
  CHECK_THROWS_AS((void)run_target_stability(c), ConfigError);
}

TEST_CASE("gap bound rows") {
  SweepConfig c = small_config(40, 3);
  c.n_instances = 2;
  c.n_plans = 10;
  const auto rows = run_gap_bound(c);
  REQUIRE(rows.size() == 40);
  CHECK(all_pass(rows));
  CHECK(rows[0].constants.at("mixture_weight") == 0.0);
  CHECK(rows[0].lhs == 0.0);
  CHECK(rows[0].rhs == 0.0);
  bool pure = false;
  for (const auto& r : rows)
    if (r.constants.at("mixture_weight") == 1.0) {
      pure = true;
      CHECK(r.constants.at("gap") > 0.0);
    }
  CHECK(pure);
}

TEST_CASE("both-measures rows and slope") {
  const auto rows = run_both_measures(small_config(30, 0));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].lhs == 0.0);
  CHECK(rows[0].rhs == 0.0);
  CHECK(all_pass(rows));
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].constants.at("eps_w1") == doctest::Approx(2.0 * rows[k].t));
  const double slope = loglog_slope(rows, "eps_w1");
  CHECK(std::isfinite(slope));
  CHECK(slope > 0.0);
  CHECK_THROWS_AS((void)run_both_measures(small_config(81, 0)), ConfigError);
}

TEST_CASE("log-log slope of a power law") {
  std::vector<BoundRow> rows;
  for (double e : {0.01, 0.02, 0.05, 0.1}) rows.push_back(make_row("p", e, 3.0 * std::sqrt(e), 1.0, {{"e", e}}));
  rows.push_back(make_row("p", 0.0, 0.0, 0.0, {{"e", 0.0}}));
  CHECK(loglog_slope(rows, "e") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS((void)loglog_slope({rows.back()}, "e"), ConfigError);
}

TEST_CASE("Holder check with the antipodal map") {
  const CostModel model = CostModel::reflector(3).truncated(0.3);
  const PointList P = antipodal_grid(60);
  const auto rows = run_holder_check(model, Potential::zero(P), 1.0, P, 200, 5);
  REQUIRE(rows.size() == 200);
  CHECK(all_pass(rows));
  for (const auto& r : rows) CHECK(r.lhs == doctest::Approx(r.t * r.t));
}

TEST_CASE("Holder experiment on a certified instance") {
  SweepConfig c = small_config(50, 2);
  c.n_pairs = 100;
  const auto rows = run_holder_experiment(c);
  REQUIRE(rows.size() == 100);
  CHECK(all_pass(rows));
}

TEST_CASE("support localization rows") {
  SweepConfig c = small_config(80, 1);
  c.n_instances = 3;
  const auto rows = run_support_localization(c);
  REQUIRE(rows.size() == 9);
  CHECK(all_pass(rows));
  for (const auto& r : rows) {
    CHECK(r.constants.at("M_mu") < 0.125);
    CHECK(r.constants.at("M_nu") < 0.125);
  }
}

TEST_CASE("Gauss experiment") {
  auto [K0, family] = default_gauss_family(1);
  GaussExperimentConfig g;
  g.n_grid = 400;
  const auto same = run_gauss_experiment(K0, {{"same", K0}}, g);
  REQUIRE(same.size() == 1);
  CHECK(same[0].lhs == 0.0);
  CHECK(same[0].pass);
  CHECK(same[0].constants.at("eps") == doctest::Approx(std::numbers::pi / 2 - std::acos(0.9 / 1.1)));
  const auto rows = run_gauss_experiment(K0, family, g);
  CHECK(rows.size() == family.size());
  CHECK(all_pass(rows));
  for (const auto& r : rows) CHECK(r.constants.at("map_mismatches") == 0.0);
  CHECK_THROWS_AS((void)run_gauss_experiment(K0, {{"big", K0.scaled(1.5)}}, g), ConfigError);
}

TEST_CASE("pipeline soundness: brute force dominates the proof modulus") {
  for (CostKind k : {CostKind::Reflector, CostKind::Gauss}) {
    const PipelineResult p = run_pipeline_soundness(k, 0.3, 1, 80);
    CHECK(p.applicable);
    CHECK(p.pass);
    CHECK(p.brute_C >= p.modulus);
    CHECK(p.modulus == doctest::Approx(modulus_constant(p.lambda, p.C1, p.C2, p.mtw_C)));
  }
}

TEST_CASE("reflector synthesis") {
  const auto rows = run_reflector_synthesis(60, 1);
  REQUIRE(rows.size() == 3);
  CHECK(all_pass(rows));
  CHECK(rows[0].constants.at("primal_value") == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("identical configs give byte-identical reports") {
  const SweepConfig c = small_config(40, 9);
  CHECK(render_report(run_target_stability(c), ReportFormat::Csv) ==
        render_report(run_target_stability(c), ReportFormat::Csv));
  SweepConfig d = c;
  d.seed = 10;
  CHECK(render_report(run_target_stability(c), ReportFormat::Csv) !=
        render_report(run_target_stability(d), ReportFormat::Csv));
}
