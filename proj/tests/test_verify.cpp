#include <doctest.h>

#include <cmath>

#include "tscale/drift.hpp"
#include "tscale/error.hpp"
#include "tscale/verify.hpp"

using namespace tscale;

namespace {

const TestReport& find(const std::vector<TestReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  FAIL("no report named " << name);
  return rs.front();
}

PathEnsemble scaled(const PathEnsemble& e, double c) {
  PathEnsemble out{e.grid, {}, e.seed};
  for (const auto& p : e.paths) {
    std::vector<double> v(p.values().begin(), p.values().end());
    for (double& x : v) x *= c;
    out.paths.emplace_back(p.grid_ptr(), std::move(v));
  }
  return out;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("reports") {
  const auto r = make_report("x", 1.5, 3.0, 10, 4);
  CHECK(r.pass);
  CHECK(summary_line(r) == "PASS x statistic=1.5 threshold=3 n=10 seed=4");
  CHECK_FALSE(make_report("x", std::nan(""), 3.0, 10, 4).pass);
  CHECK_FALSE(make_report("x", INFINITY, 3.0, 10, 4).pass);
  CHECK(summary_line(make_report("y", 4.0, 3.0, 1, 0)).rfind("FAIL y ", 0) == 0);
}

TEST_CASE("brownianity on a fresh ensemble and on broken ones") {
  const auto g = build_grid(parse_timescale("uniform:16"), 1.0 / 64.0);
  // max over 16 cells at 3 SE alarms on ~4% of fresh ensembles (seed 20261015 is one)
  const auto ens = sample_ensemble(g, 100000, 1);
  const auto fresh = brownianity_suite(ens);
  CHECK(fresh.size() == 7);
  for (const auto& r : fresh) {
    INFO(summary_line(r));
    CHECK(r.pass);
  }

  const auto doubled = brownianity_suite(scaled(ens, 2.0));
  CHECK_FALSE(find(doubled, "increment_variance").pass);
  CHECK_FALSE(find(doubled, "covariance").pass);

  const auto flat = brownianity_suite(scaled(ens, 0.0));
  CHECK_FALSE(find(flat, "ks_normality").pass);

  CHECK_THROWS_AS(brownianity_suite(sample_ensemble(g, 999, 1)), EnsembleTooSmall);
}

TEST_CASE("brownianity statistics are calibrated") {
  // on many small Brownian ensembles the statistics follow their null laws
  const auto g = build_grid(parse_timescale("uniform:8"), 1.0);
  const int runs = 150;
  double ks = 0.0, cf = 0.0;
  int alarms = 0;
  for (int s = 0; s < runs; ++s) {
    for (const auto& r : brownianity_suite(sample_ensemble(g, 1000, 7000 + s))) {
      if (r.name == "ks_normality") ks += r.statistic * std::sqrt(static_cast<double>(r.sample_size));
      if (r.name == "char_function_lambda_1") cf += r.statistic;
      if (!r.pass) ++alarms;
    }
  }
  // E sqrt(M) D = sqrt(pi/2) ln 2 = 0.8687; E max(|Z1|, |Z2|) = 1.128
  CHECK(ks / runs == doctest::Approx(0.8687).epsilon(0.1));
  CHECK(cf / runs == doctest::Approx(1.128).epsilon(0.1));
  // about 0.16 alarms per run across the seven reports
  CHECK(alarms < 60);
}

TEST_CASE("brownianity reports do not depend on the worker count") {
  const auto g = build_grid(TimeScale::cantor(3), 1.0 / 27.0);
  const auto ens = sample_ensemble(g, 2000, 3);
  const auto a = brownianity_suite(ens, 1);
  const auto b = brownianity_suite(ens, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].statistic == b[i].statistic);
}

TEST_CASE("girsanov mean") {
  const auto g = build_grid(TimeScale::cantor(3), 0.02);
  const auto ens = sample_ensemble(g, 100000, 21);
  const auto zero = girsanov_mean_check(CMPath::zero(g), ens);
  CHECK(zero.statistic == 0.0);
  CHECK(zero.pass);
  const auto h = CMPath::constant(g, 1.0);
  CHECK(girsanov_mean_check(h, ens).pass);
  CHECK_FALSE(girsanov_mean_check(h, ens, GirsanovMode::drop_half_norm).pass);
  for (const auto& r : change_of_variables_check(h, ens)) {
    INFO(summary_line(r));
    CHECK(r.pass);
  }
  CHECK(paley_wiener_variance_check(h, ens).pass);
  CHECK_FALSE(paley_wiener_variance_check(2.0 * h, scaled(ens, 0.5)).pass);
}

TEST_CASE("law equivalence") {
  const auto g = build_grid(TimeScale::cantor(4), 1.0 / 81.0);
  const auto ens = sample_ensemble(g, 100000, 22);

  const auto zero = constant_drift(0.0);
  for (const auto& r : law_equivalence_check(zero, ens, clarke_solve(zero, ens))) {
    INFO(summary_line(r));
    CHECK(r.pass);
  }

  const auto sin = sin_delay_drift(0.5, RhoConvention::mesh_predecessor);
  const auto solved = clarke_solve(sin, ens);
  const auto reports = law_equivalence_check(sin, ens, solved);
  CHECK(reports.size() == 10);
  for (const auto& r : reports) {
    INFO(summary_line(r));
    CHECK(r.pass);
  }

  // a large constant drift shifts the mean of X, which only the weights undo
  const auto push = constant_drift(1.0);
  for (const auto& r : law_equivalence_check(push, ens, clarke_solve(push, ens))) {
    INFO(summary_line(r));
    CHECK(r.pass);
  }

  const auto low = parse_drift("sin-mesh:0.5@0.05");
  const auto low_reports = law_equivalence_check(low, ens, clarke_solve(low, ens));
  CHECK_FALSE(find(low_reports, "drift_bound").pass);

  SolveReport not_done = solved;
  not_done.converged = false;
  CHECK_THROWS_AS(law_equivalence_check(sin, ens, not_done), NotConverged);
}

TEST_CASE("filtration prefix check") {
  const auto g = build_grid(TimeScale::cantor(5), 1.0 / 243.0);
  const auto ens = sample_ensemble(g, 64, 23);

  const auto zero = constant_drift(0.0);
  CHECK(filtration_prefix_check(zero, ens, clarke_solve(zero, ens), 50, 1).pass);

  for (const auto& drift : {sin_delay_drift(0.5), sin_delay_drift(0.5, RhoConvention::mesh_predecessor),
                            tabulated_past_drift({1, 3}, {1.0, 0.5}, 1.0)}) {
    const auto r = filtration_prefix_check(drift, ens, clarke_solve(drift, ens), 200, 2);
    INFO(drift.name() << ": " << summary_line(r));
    CHECK(r.pass);
  }

  const auto ahead = lookahead_drift(0.5);
  const auto solved = clarke_solve(ahead, ens);
  REQUIRE(solved.converged);
  const auto bad = filtration_prefix_check(ahead, ens, solved, 200, 2);
  CHECK_FALSE(bad.pass);
  CHECK(bad.statistic > 1e-6);

  SolveReport not_done = solved;
  not_done.converged = false;
  CHECK_THROWS_AS(filtration_prefix_check(ahead, ens, not_done, 10, 2), NotConverged);
}

}  // TEST_SUITE
