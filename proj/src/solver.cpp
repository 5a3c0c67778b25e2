#include "tscale/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tscale/error.hpp"
#include "tscale/parallel.hpp"

namespace tscale {

namespace {

/// y = w + ∫ h^Δ dλ_Δ at the nodes.
void shifted_path(const DeltaGrid& g, std::span<const double> w, std::span<const double> h,
                  std::vector<double>& y) {
  y.resize(w.size());
  double acc = 0.0;
  y[0] = w[0];
  for (std::size_t j = 0; j < h.size(); ++j) {
    acc += h[j] * g.weight(j);
    y[j + 1] = w[j + 1] + acc;
  }
}

/// β_j(y) for every cell, counting declared-bound violations.
std::size_t drift_on_cells(const DriftFunctional& drift, const DeltaGrid& g,
                           std::span<const double> y, std::vector<double>& beta) {
  beta.resize(g.cell_count());
  std::size_t violations = 0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    beta[j] = drift(j, y, g);
    if (!drift.within_bound(beta[j])) ++violations;
  }
  return violations;
}

struct KappaScratch {
  std::vector<double> y;
  std::vector<double> beta;
};

/// Density of κ_X[h](w) into `out`; returns the bound-violation count.
std::size_t kappa_density(const DriftFunctional& drift, const DeltaGrid& g,
                          std::span<const double> w, std::span<const double> h,
                          std::vector<double>& out, KappaScratch& scratch) {
  shifted_path(g, w, h, scratch.y);
  const std::size_t violations = drift_on_cells(drift, g, scratch.y, scratch.beta);
  out.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) out[j] = -h[j] + scratch.beta[j];
  return violations;
}

double weighted_norm_squared(const DeltaGrid& g, std::span<const double> d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) acc += d[j] * d[j] * g.weight(j);
  return acc;
}

void relaxed_step(std::span<const double> h, std::span<const double> k, double eps,
                  std::vector<double>& out) {
  out.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) out[j] = h[j] + eps * k[j];
}

double ordered_mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

ForwardSolution solve_forward(const DriftFunctional& drift, const SampledPath& b) {
  const DeltaGrid& g = b.grid();
  // future entries hold B so that non-adapted drifts read something defined
  std::vector<double> x(b.values().begin(), b.values().end());
  std::size_t violations = 0;
  double acc = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double beta = drift(k - 1, x, g);
    if (!drift.within_bound(beta)) ++violations;
    acc += beta * g.weight(k - 1);
    x[k] = b.value(k) + acc;
  }
  return {SampledPath(b.grid_ptr(), std::move(x)), violations};
}

SampledPath inverse_map(const DriftFunctional& drift, const SampledPath& x) {
  const DeltaGrid& g = x.grid();
  std::vector<double> b(x.size());
  double acc = 0.0;
  b[0] = x.value(0);
  for (std::size_t k = 1; k < b.size(); ++k) {
    acc += drift(k - 1, x.values(), g) * g.weight(k - 1);
    b[k] = x.value(k) - acc;
  }
  return SampledPath(x.grid_ptr(), std::move(b));
}

CMPath kappa(const DriftFunctional& drift, const CMPath& h, const SampledPath& w) {
  if (!same_grid(h.grid(), w.grid())) throw GridMismatch();
  std::vector<double> out;
  KappaScratch scratch;
  kappa_density(drift, w.grid(), w.values(), h.density(), out, scratch);
  return CMPath(h.grid_ptr(), std::move(out));
}

double SolveReport::max_residual_ratio() const {
  double worst = 0.0;
  for (std::size_t i = 1; i < residual_history.size(); ++i) {
    if (residual_history[i - 1] > 0.0)
      worst = std::max(worst, residual_history[i] / residual_history[i - 1]);
  }
  return worst;
}

SolveReport clarke_solve(const DriftFunctional& drift, const PathEnsemble& ensemble,
                         const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (options.max_iter == 0) throw InvalidArgument("solver needs max_iter >= 1");
  if (ensemble.paths.empty()) throw InvalidArgument("solver needs a nonempty ensemble");
  const DeltaGrid& g = *ensemble.grid;
  const std::size_t n = ensemble.size();
  const std::size_t cells = g.cell_count();
  for (const auto& p : ensemble.paths)
    if (!same_grid(p.grid(), g)) throw GridMismatch();

  std::vector<std::vector<double>> h(n, std::vector<double>(cells, 0.0));
  std::vector<std::vector<double>> k(n);
  std::vector<std::vector<double>> h_trial(n);
  std::vector<std::vector<double>> k_trial(n);
  std::vector<double> norms(n);
  std::vector<std::size_t> violations(n, 0);

  // κ at `state` into `kout`; returns the ensemble L² residual
  auto residual = [&](std::vector<std::vector<double>>& state,
                      std::vector<std::vector<double>>& kout) {
    parallel_for(n, options.workers, [&](std::size_t i) {
      KappaScratch scratch;
      violations[i] += kappa_density(drift, g, ensemble.paths[i].values(), state[i], kout[i], scratch);
      norms[i] = weighted_norm_squared(g, kout[i]);
    });
    return std::sqrt(ordered_mean(norms));
  };

  SolveReport report;
  report.tolerance = options.tol;
  report.seed = ensemble.seed;

  double r = residual(h, k);
  report.residual_history.push_back(r);
  while (!(r < options.tol) && report.residual_history.size() < options.max_iter) {
    double eps = 1.0;
    double r_trial = 0.0;
    for (int halving = 0;; ++halving) {
      parallel_for(n, options.workers,
                   [&](std::size_t i) { relaxed_step(h[i], k[i], eps, h_trial[i]); });
      r_trial = residual(h_trial, k_trial);
      if (r_trial <= options.ratio_target * r || halving >= options.max_halvings) break;
      eps *= 0.5;
    }
    if (!(r_trial <= options.ratio_target * r))
      report.warnings.push_back("step " + std::to_string(report.epsilon_history.size() + 1) +
                                ": no step met the decrease target");
    std::swap(h, h_trial);
    std::swap(k, k_trial);
    r = r_trial;
    report.epsilon_history.push_back(eps);
    report.residual_history.push_back(r);
  }

  report.iterations = report.residual_history.size();
  report.converged = r < options.tol;
  for (std::size_t v : violations) report.bound_violations += v;
  if (report.bound_violations > 0)
    report.warnings.push_back("drift exceeded its declared bound " +
                              std::to_string(report.bound_violations) + " times");
  if (!report.converged)
    report.warnings.push_back("not converged after " + std::to_string(report.iterations) +
                              " iterations");
  report.shifts.reserve(n);
  for (auto& density : h) report.shifts.emplace_back(ensemble.grid, std::move(density));
  return report;
}

StrongSolutionMap::StrongSolutionMap(DriftFunctional drift, std::vector<double> steps)
    : drift_(std::move(drift)), steps_(std::move(steps)) {}

StrongSolutionMap::StrongSolutionMap(DriftFunctional drift, const SolveReport& report)
    : StrongSolutionMap(std::move(drift), report.epsilon_history) {}

CMPath StrongSolutionMap::shift(const SampledPath& b) const {
  const DeltaGrid& g = b.grid();
  std::vector<double> h(g.cell_count(), 0.0);
  std::vector<double> k;
  std::vector<double> next;
  KappaScratch scratch;
  for (double eps : steps_) {
    kappa_density(drift_, g, b.values(), h, k, scratch);
    relaxed_step(h, k, eps, next);
    std::swap(h, next);
  }
  return CMPath(b.grid_ptr(), std::move(h));
}

SampledPath StrongSolutionMap::operator()(const SampledPath& b) const {
  return translate(b, shift(b));
}

std::vector<SampledPath> strong_solution_map(const DriftFunctional&, const PathEnsemble& ensemble,
                                             const SolveReport& report) {
  if (!report.converged) throw NotConverged("strong_solution_map needs a converged solve");
  if (report.shifts.size() != ensemble.size())
    throw InvalidArgument("solve report does not match the ensemble");
  std::vector<SampledPath> out;
  out.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i)
    out.push_back(translate(ensemble.paths[i], report.shifts[i]));
  return out;
}

ContractionEstimate estimate_contraction(const DriftFunctional& drift, const PathEnsemble& ensemble,
                                         std::size_t trials, std::uint64_t seed, unsigned workers) {
  if (trials == 0) throw InvalidArgument("estimate_contraction needs trials >= 1");
  if (ensemble.paths.empty()) throw InvalidArgument("estimate_contraction needs paths");
  const DeltaGrid& g = *ensemble.grid;
  const std::size_t n = ensemble.size();
  const std::size_t cells = g.cell_count();
  constexpr std::array<double, 3> kSteps{1.0, 0.5, 0.25};
  const double amplitude = 1.0 + drift.bound();

  ContractionEstimate est;
  bool any = false;
  for (std::size_t t = 0; t < trials; ++t) {
    // h^Δ_j(ω) = a_j + b_j tanh(ω(t_j)) is adapted and bounded
    Rng rng(stream_seed(seed, t));
    std::uniform_real_distribution<double> coef(-amplitude, amplitude);
    std::vector<double> a(cells), b(cells);
    for (std::size_t j = 0; j < cells; ++j) {
      a[j] = coef(rng);
      b[j] = coef(rng);
    }

    std::vector<double> denom(n);
    std::vector<std::array<double, kSteps.size()>> numer(n);
    parallel_for(n, workers, [&](std::size_t i) {
      const auto w = ensemble.paths[i].values();
      std::vector<double> h(cells), y, beta_h, h_eps, y_eps, beta_eps;
      for (std::size_t j = 0; j < cells; ++j) h[j] = a[j] + b[j] * std::tanh(w[j]);
      shifted_path(g, w, h, y);
      drift_on_cells(drift, g, y, beta_h);
      double d = 0.0;
      for (std::size_t j = 0; j < cells; ++j) d += (h[j] - beta_h[j]) * (h[j] - beta_h[j]) * g.weight(j);
      denom[i] = d;
      for (std::size_t e = 0; e < kSteps.size(); ++e) {
        const double eps = kSteps[e];
        h_eps.resize(cells);
        for (std::size_t j = 0; j < cells; ++j) h_eps[j] = (1.0 - eps) * h[j] + eps * beta_h[j];
        shifted_path(g, w, h_eps, y_eps);
        drift_on_cells(drift, g, y_eps, beta_eps);
        double num = 0.0;
        for (std::size_t j = 0; j < cells; ++j)
          num += (beta_eps[j] - beta_h[j]) * (beta_eps[j] - beta_h[j]) * g.weight(j);
        numer[i][e] = num;
      }
    });

    const double mean_denom = ordered_mean(denom);
    for (std::size_t e = 0; e < kSteps.size(); ++e) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += numer[i][e];
      ContractionTrial row;
      row.trial = t;
      row.epsilon = kSteps[e];
      row.numerator = acc / static_cast<double>(n);
      row.denominator = mean_denom;
      row.skipped = !(mean_denom > 0.0);
      if (!row.skipped) {
        row.ratio = row.numerator / (row.epsilon * row.epsilon * row.denominator);
        est.k_hat = std::max(est.k_hat, row.ratio);
        any = true;
      }
      est.trials.push_back(row);
    }
  }
  if (!any) throw EstimatorUndefined("every contraction trial had a zero denominator");
  return est;
}

}  // namespace tscale
