#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tscale/cameron_martin.hpp"
#include "tscale/drift.hpp"
#include "tscale/wiener.hpp"

namespace tscale {

struct ForwardSolution {
  SampledPath path;
  std::size_t bound_violations = 0;
};

/// Explicit recursion X_k = B_k + Σ_{j<k} β_j(X_0..X_j) w_j.
ForwardSolution solve_forward(const DriftFunctional& drift, const SampledPath& b);

/// T(x)_k = x_k − Σ_{j<k} β_j(x) w_j, the inverse of the solution map.
SampledPath inverse_map(const DriftFunctional& drift, const SampledPath& x);

/// κ_X[h](w) = −h − θ∘(w + h): density −h^Δ_j + β_j(w + h).
CMPath kappa(const DriftFunctional& drift, const CMPath& h, const SampledPath& w);

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iter = 200;
  /// A step ε is accepted once the residual shrinks by at least this factor.
  double ratio_target = 0.99;
  /// Backtracking gives up after this many halvings and takes the last step.
  int max_halvings = 10;
  unsigned workers = 0;
};

struct SolveReport {
  /// Per-path shift u with X∘τ_u = Id.
  std::vector<CMPath> shifts;
  /// √(mean over paths of ‖κ_X[h]‖²) for every accepted iterate, starting at h = 0.
  std::vector<double> residual_history;
  /// Step accepted between consecutive residual entries.
  std::vector<double> epsilon_history;
  std::size_t iterations = 0;
  bool converged = false;
  double tolerance = 0.0;
  std::size_t bound_violations = 0;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;

  /// Largest residual[i + 1] / residual[i] over the history.
  double max_residual_ratio() const;
};

/// Relaxed fixed-point iteration h ← h + ε κ_X[h] from h = 0, run pathwise on
/// the ensemble with a shared backtracked step.
SolveReport clarke_solve(const DriftFunctional& drift, const PathEnsemble& ensemble,
                         const SolverOptions& options = {});

/// The map F = Id + u realized by replaying a solve's step sequence on any
/// path. Replaying on an ensemble path reproduces the stored shift bit for bit.
class StrongSolutionMap {
 public:
  StrongSolutionMap(DriftFunctional drift, std::vector<double> steps);
  StrongSolutionMap(DriftFunctional drift, const SolveReport& report);

  CMPath shift(const SampledPath& b) const;
  SampledPath operator()(const SampledPath& b) const;

 private:
  DriftFunctional drift_;
  std::vector<double> steps_;
};

/// F(w) = w + u(w) for every ensemble path; requires a converged report.
std::vector<SampledPath> strong_solution_map(const DriftFunctional& drift,
                                             const PathEnsemble& ensemble,
                                             const SolveReport& report);

struct ContractionTrial {
  std::size_t trial = 0;
  double epsilon = 0.0;
  double numerator = 0.0;    // I(h)
  double denominator = 0.0;  // E ∫ (h^Δ − β(·+h))² dλ_Δ
  double ratio = 0.0;        // I(h) / (ε² · denominator)
  bool skipped = false;      // zero denominator
};

struct ContractionEstimate {
  double k_hat = 0.0;
  std::vector<ContractionTrial> trials;
};

/// Monte Carlo estimate of the constant K of the contraction hypothesis: the
/// largest ratio over `trials` random adapted shifts and ε ∈ {1, 1/2, 1/4}.
ContractionEstimate estimate_contraction(const DriftFunctional& drift, const PathEnsemble& ensemble,
                                         std::size_t trials, std::uint64_t seed,
                                         unsigned workers = 0);

}  // namespace tscale
