#include <doctest.h>

#include <cmath>

#include "support/random_scales.hpp"
#include "tscale/drift.hpp"
#include "tscale/error.hpp"
#include "tscale/solver.hpp"

using namespace tscale;

namespace {

GridPtr three_grid() { return build_grid(TimeScale::from_points({0.0, 0.5, 1.0}), 1.0); }

PathEnsemble single(const SampledPath& b) { return PathEnsemble{b.grid_ptr(), {b}, 0}; }

double sup_distance(const SampledPath& a, const SampledPath& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.value(k) - b.value(k)));
  return worst;
}

/// X_{k+1} = B_{k+1} + Σ_{j<=k} β_j (t_{j+1} − t_j), written out directly.
std::vector<double> hand_recursion(const DeltaGrid& g, std::span<const double> b,
                                   const std::function<double(std::size_t, const std::vector<double>&)>& beta) {
  std::vector<double> x(b.size(), 0.0);
  double drift = 0.0;
  for (std::size_t n = 1; n < b.size(); ++n) {
    std::vector<double> prefix(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    drift += beta(n - 1, prefix) * (g.time(n) - g.time(n - 1));
    x[n] = b[n] + drift;
  }
  return x;
}

}  // namespace

TEST_SUITE("drift") {

TEST_CASE("adapted drifts only see the prefix") {
  std::vector<std::size_t> seen;
  const DriftFunctional spy("spy", 1.0, [&](std::size_t k, std::span<const double> x, const DeltaGrid&) {
    seen.push_back(x.size() - k);
    return 0.0;
  });
  const auto g = build_grid(TimeScale::cantor(2), 0.05);
  Rng rng(1);
  solve_forward(spy, sample_brownian(g, rng));
  REQUIRE(seen.size() == g->cell_count());
  for (std::size_t s : seen) CHECK(s == 1);

  const auto ahead = lookahead_drift(0.5);
  CHECK_FALSE(ahead.adapted());
  CHECK(sin_delay_drift(0.5).adapted());
}

TEST_CASE("sin drift under both delay conventions") {
  const auto g = build_grid(TimeScale::interval(), 0.25);
  const std::vector<double> x{0.0, 1.0, 3.0, 3.0, 3.0};
  CHECK(sin_delay_drift(0.5)(2, x, *g) == 0.0);
  CHECK(sin_delay_drift(0.5, RhoConvention::mesh_predecessor)(2, x, *g) == 0.5 * std::sin(2.0));
  const auto c = build_grid(TimeScale::cantor(1), 1.0);
  const std::vector<double> y{0.0, 0.4, 1.0, 2.0};
  CHECK(sin_delay_drift(0.5)(2, y, *c) == 0.5 * std::sin(0.6));
}

TEST_CASE("past drift reads its lags") {
  const auto g = build_grid(TimeScale::uniform(8), 1.0);
  const auto d = tabulated_past_drift({1, 2}, {1.0, -1.0}, 2.0);
  const std::vector<double> x{0.0, 1.0, 3.0, 6.0};
  CHECK(d(3, x, *g) == 2.0 * std::tanh(3.0 - 1.0));
  CHECK(d(0, x, *g) == 0.0);
  CHECK_THROWS_AS(tabulated_past_drift({1}, {}, 1.0), InvalidArgument);
}

TEST_CASE("parse drift") {
  CHECK(parse_drift("zero").bound() == 0.0);
  CHECK(parse_drift("constant:-2").bound() == 2.0);
  CHECK(parse_drift("sin:0.5").name() == "sin");
  CHECK(parse_drift("sin-mesh:0.5").name() == "sin-mesh");
  CHECK(parse_drift("markov-sin:0.3").bound() == doctest::Approx(0.3));
  CHECK(parse_drift("past:1").adapted());
  CHECK_FALSE(parse_drift("lookahead:0.5").adapted());
  const auto low = parse_drift("sin:0.5@0.1");
  CHECK(low.bound() == 0.1);
  CHECK_FALSE(low.within_bound(0.2));
  CHECK_THROWS_AS(parse_drift("sin"), ParseError);
  CHECK_THROWS_AS(parse_drift("sin:x"), ParseError);
  CHECK_THROWS_AS(parse_drift("cos:1"), ParseError);
  CHECK_THROWS_AS(parse_drift("sin:1@-1"), InvalidArgument);
}

}  // TEST_SUITE

TEST_SUITE("solver") {

TEST_CASE("forward recursion by hand") {
  const auto g = three_grid();
  const SampledPath b(g, {0.0, 0.3, -0.4});
  CHECK(solve_forward(constant_drift(0.0), b).path.value(2) == -0.4);
  const auto x = solve_forward(constant_drift(1.0), b).path;
  CHECK(x.value(1) == 0.3 + 0.5);
  CHECK(x.value(2) == -0.4 + 1.0);

  const SampledPath ones(g, {0.0, 1.0, 1.0});
  const auto s = solve_forward(sin_delay_drift(0.5), ones).path;
  CHECK(s.value(1) == 1.0);
  CHECK(std::abs(s.value(2) - (1.0 + 0.25 * std::sin(1.0))) < 1e-15);
}

TEST_CASE("kappa") {
  const auto g = three_grid();
  const SampledPath w(g, {0.0, 0.3, -0.4});
  const auto z = kappa(constant_drift(0.0), CMPath::zero(g), w);
  CHECK(z.norm() == 0.0);
  const auto c = kappa(constant_drift(1.5), CMPath::zero(g), w);
  CHECK(c.density()[0] == 1.5);
  CHECK(c.density()[1] == 1.5);

  // the fixed point h^Δ_j = β_j(w + h) has κ = 0
  const auto d = sin_delay_drift(0.7, RhoConvention::mesh_predecessor);
  const auto x = solve_forward(d, w).path;
  std::vector<double> fixed(g->cell_count());
  for (std::size_t j = 0; j < fixed.size(); ++j) fixed[j] = d(j, x.values(), *g);
  CHECK(kappa(d, CMPath(g, fixed), w).norm() < 1e-15);
  CHECK_THROWS_AS(kappa(d, CMPath::zero(build_grid(TimeScale::interval(), 0.25)), w), GridMismatch);
}

TEST_CASE("zero drift converges in one iteration") {
  const auto g = build_grid(TimeScale::cantor(3), 0.02);
  const auto ens = sample_ensemble(g, 16, 5);
  const auto r = clarke_solve(constant_drift(0.0), ens);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.epsilon_history.empty());
  for (const auto& u : r.shifts) CHECK(u.norm() == 0.0);
  const auto F = strong_solution_map(constant_drift(0.0), ens, r);
  for (std::size_t i = 0; i < ens.size(); ++i) CHECK(sup_distance(F[i], ens.paths[i]) == 0.0);
}

TEST_CASE("strong solution on three points matches the hand recursion") {
  const auto g = three_grid();
  const SampledPath ones(g, {0.0, 1.0, 1.0});
  const auto drift = sin_delay_drift(0.5);
  const auto r = clarke_solve(drift, single(ones));
  REQUIRE(r.converged);
  const auto F = strong_solution_map(drift, single(ones), r);
  CHECK(std::abs(F[0].value(1) - 1.0) < 1e-12);
  CHECK(std::abs(F[0].value(2) - (1.0 + 0.25 * std::sin(1.0))) < 1e-12);
}

TEST_CASE("residuals are recorded and non-convergence is reported") {
  const auto g = build_grid(TimeScale::interval(), 1.0 / 32.0);
  const auto ens = sample_ensemble(g, 32, 6);
  SolverOptions opts;
  opts.max_iter = 2;
  const auto drift = sin_delay_drift(0.9, RhoConvention::mesh_predecessor);
  const auto r = clarke_solve(drift, ens, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.residual_history.size() == 2);
  CHECK(r.epsilon_history.size() == 1);
  CHECK_FALSE(r.warnings.empty());
  CHECK_THROWS_AS(strong_solution_map(drift, ens, r), NotConverged);

  opts.tol = 0.0;
  CHECK_THROWS_AS(clarke_solve(drift, ens, opts), InvalidArgument);
}

TEST_CASE("declared bound violations are counted") {
  const auto g = build_grid(TimeScale::interval(), 1.0 / 32.0);
  const auto ens = sample_ensemble(g, 32, 7);
  const auto r = clarke_solve(parse_drift("sin-mesh:0.5@0.01"), ens);
  CHECK(r.bound_violations > 0);
  CHECK_FALSE(r.warnings.empty());
  const auto ok = clarke_solve(parse_drift("sin-mesh:0.5"), ens);
  CHECK(ok.bound_violations == 0);
}

TEST_CASE("clarke solve, forward recursion and inverse maps agree on random scales") {
  testing::Gen gen(31);
  const std::vector<std::string> specs{"sin:0.9", "sin-mesh:0.9", "past:1.5", "markov-sin:2", "constant:1"};
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = testing::random_grid(gen, gen.scale());
    const auto drift = parse_drift(specs[static_cast<std::size_t>(trial) % specs.size()]);
    const auto ens = sample_ensemble(g, 8, static_cast<std::uint64_t>(trial));
    const auto r = clarke_solve(drift, ens);
    REQUIRE(r.converged);
    const auto F = strong_solution_map(drift, ens, r);
    const StrongSolutionMap replay(drift, r);
    for (std::size_t i = 0; i < ens.size(); ++i) {
      const auto x = solve_forward(drift, ens.paths[i]).path;
      CHECK(sup_distance(F[i], x) < 1e-9);
      CHECK(sup_distance(inverse_map(drift, F[i]), ens.paths[i]) < 1e-9);
      CHECK(sup_distance(replay(inverse_map(drift, x)), x) < 1e-9);
      // replay reproduces the stored shift exactly
      const auto u = replay.shift(ens.paths[i]);
      CHECK(std::equal(u.density().begin(), u.density().end(), r.shifts[i].density().begin()));
    }
  }
}

TEST_CASE("countable scale recursion") {
  const auto ts = TimeScale::geometric(0.5, 20);
  const auto g = build_grid(ts, 1.0);
  const auto ens = sample_ensemble(g, 20, 8);
  const double a = 0.5;
  for (const auto& b : ens.paths) {
    const auto x = solve_forward(sin_delay_drift(a), b).path;
    const auto hand = hand_recursion(*g, b.values(), [&](std::size_t k, const std::vector<double>& p) {
      return k == 0 ? 0.0 : a * std::sin(p[k] - p[k - 1]);
    });
    for (std::size_t k = 0; k < hand.size(); ++k) CHECK(std::abs(x.value(k) - hand[k]) < 1e-12);
  }
}

TEST_CASE("perturbing the last value leaves earlier values alone") {
  const auto g = build_grid(TimeScale::cantor(3), 0.02);
  const auto ens = sample_ensemble(g, 4, 9);
  const auto drift = sin_delay_drift(0.5);
  const auto r = clarke_solve(drift, ens);
  const StrongSolutionMap F(drift, r);
  std::vector<double> v(ens.paths[0].values().begin(), ens.paths[0].values().end());
  v.back() += 3.0;
  const auto a = F(ens.paths[0]);
  const auto b = F(SampledPath(g, v));
  for (std::size_t k = 0; k + 1 < v.size(); ++k) CHECK(a.value(k) == b.value(k));
}

TEST_CASE("halving the mesh halves the error for a Lipschitz Markov drift") {
  const auto drift = markov_drift(
      "smooth", [](double t, double x) { return std::sin(x) + std::cos(3.0 * t); }, 2.0);
  const std::size_t paths = 400;
  const std::vector<std::size_t> cells{16, 32, 64, 128, 256};
  Rng rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Brownian bridge refinement keeps the coarse values of each path fixed
  std::vector<std::vector<std::vector<double>>> levels(cells.size());
  for (std::size_t i = 0; i < paths; ++i) {
    std::vector<double> w{0.0};
    for (std::size_t j = 0; j < cells[0]; ++j) w.push_back(w.back() + normal(rng) / 4.0);
    levels[0].push_back(w);
    for (std::size_t l = 1; l < cells.size(); ++l) {
      const double h = 1.0 / static_cast<double>(cells[l - 1]);
      std::vector<double> fine{0.0};
      for (std::size_t j = 0; j + 1 < w.size(); ++j) {
        fine.push_back(0.5 * (w[j] + w[j + 1]) + std::sqrt(h / 4.0) * normal(rng));
        fine.push_back(w[j + 1]);
      }
      w = fine;
      levels[l].push_back(w);
    }
  }

  std::vector<std::vector<SampledPath>> solutions(cells.size());
  for (std::size_t l = 0; l < cells.size(); ++l) {
    const auto g = build_grid(TimeScale::interval(), 1.0 / static_cast<double>(cells[l]));
    for (auto& w : levels[l]) solutions[l].push_back(solve_forward(drift, SampledPath(g, w)).path);
  }
  std::vector<double> err;
  for (std::size_t l = 0; l + 1 < cells.size(); ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i < paths; ++i)
      for (std::size_t k = 0; k <= cells[0]; ++k) {
        const std::size_t c = k * (cells[l] / cells[0]), f = k * (cells[l + 1] / cells[0]);
        acc = std::max(acc, std::abs(solutions[l][i].value(c) - solutions[l + 1][i].value(f)));
      }
    err.push_back(acc);
  }
  for (std::size_t l = 0; l + 1 < err.size(); ++l) {
    const double ratio = err[l + 1] / err[l];
    INFO("refinement " << l << " ratio " << ratio);
    CHECK(ratio > 0.3);
    CHECK(ratio < 0.7);
  }
}

TEST_CASE("contraction estimate") {
  const auto g = build_grid(TimeScale::cantor(4), 1.0 / 81.0);
  const auto ens = sample_ensemble(g, 2000, 10);
  CHECK(estimate_contraction(constant_drift(0.0), ens, 5, 1).k_hat == 0.0);
  for (double a : {0.5, 0.9}) {
    for (auto rho : {RhoConvention::exact, RhoConvention::mesh_predecessor}) {
      const auto est = estimate_contraction(sin_delay_drift(a, rho), ens, 5, 2);
      CHECK(est.trials.size() == 15);
      CHECK(est.k_hat <= a * a + 0.05);
    }
  }
  const DriftFunctional undefined("nan", 1.0, [](std::size_t, std::span<const double>, const DeltaGrid&) {
    return std::nan("");
  });
  CHECK_THROWS_AS(estimate_contraction(undefined, ens, 3, 1), EstimatorUndefined);
  CHECK_THROWS_AS(estimate_contraction(constant_drift(0.0), ens, 0, 1), InvalidArgument);
}

TEST_CASE("solver output does not depend on the worker count") {
  const auto g = build_grid(TimeScale::cantor(3), 0.01);
  const auto ens = sample_ensemble(g, 101, 11);
  SolverOptions one, many;
  one.workers = 1;
  many.workers = 3;
  const auto drift = sin_delay_drift(0.8, RhoConvention::mesh_predecessor);
  const auto a = clarke_solve(drift, ens, one);
  const auto b = clarke_solve(drift, ens, many);
  CHECK(a.residual_history == b.residual_history);
  CHECK(a.epsilon_history == b.epsilon_history);
  const auto ka = estimate_contraction(drift, ens, 3, 4, 1);
  const auto kb = estimate_contraction(drift, ens, 3, 4, 3);
  CHECK(ka.k_hat == kb.k_hat);
}

}  // TEST_SUITE
