#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tscale/cameron_martin.hpp"
#include "tscale/drift.hpp"
#include "tscale/solver.hpp"
#include "tscale/wiener.hpp"

namespace tscale {

/// One statistical or structural check. `pass` is statistic <= threshold.
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t sample_size = 0;
  bool pass = false;
  std::uint64_t seed = 0;
};

TestReport make_report(std::string name, double statistic, double threshold,
                       std::size_t sample_size, std::uint64_t seed);

/// Ensembles below this size are rejected by the Monte Carlo checks.
inline constexpr std::size_t kMinEnsemble = 1000;

/// Increment means and variances per cell, Cov(W_s, W_t) at 5 node pairs,
/// the characteristic function of standardized increments at λ = 0.5, 1, 2,
/// and a pooled KS normality test. z-type statistics use threshold 3.
std::vector<TestReport> brownianity_suite(const PathEnsemble& ensemble, unsigned workers = 0);

/// Self-test switch: drop the −½‖h‖² term so the mean becomes exp(‖h‖²/2).
enum class GirsanovMode { standard, drop_half_norm };

/// |mean(density) − 1| / SE over the ensemble.
TestReport girsanov_mean_check(const CMPath& h, const PathEnsemble& ensemble,
                               GirsanovMode mode = GirsanovMode::standard);

/// E[f(W + h)] against E[f(W)·density(h, W)] for f = W(t) and W(t)² at
/// three nodes, via the paired difference.
std::vector<TestReport> change_of_variables_check(const CMPath& h, const PathEnsemble& ensemble);

/// Sample second moment of paley_wiener(h, ·) against ‖h‖².
TestReport paley_wiener_variance_check(const CMPath& h, const PathEnsemble& ensemble);

/// Positivity of the per-path weight exp(−Σ β ΔX + ½ Σ β² w) along X = F(B),
/// the bound check, and reweighted first/second moments of X at 4 nodes
/// against the driving Brownian ensemble.
std::vector<TestReport> law_equivalence_check(const DriftFunctional& drift,
                                              const PathEnsemble& ensemble,
                                              const SolveReport& report);

/// Perturbs B after a random node k and checks F(B) is unchanged up to k, and
/// the same for X and T(X). The statistic is the largest prefix change seen.
TestReport filtration_prefix_check(const DriftFunctional& drift, const PathEnsemble& ensemble,
                                   const SolveReport& report, std::size_t probes,
                                   std::uint64_t seed);

inline constexpr double kPrefixTolerance = 1e-12;

/// "PASS name statistic=... threshold=... n=... seed=...".
std::string summary_line(const TestReport& report);

bool all_pass(const std::vector<TestReport>& reports);

}  // namespace tscale
