#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tscale/cameron_martin.hpp"
#include "tscale/grid.hpp"

namespace tscale {

/// A path ω ∈ C_T sampled at the grid nodes, ω(0) = 0.
class SampledPath {
 public:
  SampledPath(GridPtr grid, std::vector<double> values);

  const DeltaGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t node) const { return values_[node]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Paths over a shared grid together with the seed that reproduces them.
struct PathEnsemble {
  GridPtr grid;
  std::vector<SampledPath> paths;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return paths.size(); }
};

/// Seed of the independent stream with the given index (splitmix64 mix).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

using Rng = std::mt19937_64;

/// Independent N(0, t_{k+1} − t_k) increments between consecutive nodes.
SampledPath sample_brownian(const GridPtr& grid, Rng& rng);

/// Path i uses the stream stream_seed(seed, i), so the ensemble does not
/// depend on the worker count.
PathEnsemble sample_ensemble(const GridPtr& grid, std::size_t n_paths, std::uint64_t seed,
                             unsigned workers = 0);

/// ∫ h^Δ d_ΔW as the left-point sum Σ_j h^Δ_j (w_{j+1} − w_j).
double paley_wiener(const CMPath& h, const SampledPath& w);

/// τ_h(ω) = ω + h, nodewise.
SampledPath translate(const SampledPath& w, const CMPath& h);

struct GirsanovDensity {
  double log_density = 0.0;
  double density = 1.0;  // exp(log_density); may overflow to +inf
};

/// d(τ_h)_⋆μ_T / dμ_T at w: exp(∫ h^Δ d_ΔW − ½‖h‖²).
GirsanovDensity girsanov_density(const CMPath& h, const SampledPath& w);

}  // namespace tscale
