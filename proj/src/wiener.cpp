#include "tscale/wiener.hpp"

#include <cmath>

#include "tscale/error.hpp"
#include "tscale/parallel.hpp"

namespace tscale {

SampledPath::SampledPath(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("SampledPath needs a grid");
  if (values_.size() != grid_->node_count())
    throw InvalidArgument("SampledPath needs one value per node");
  if (values_[0] != 0.0) throw InvalidArgument("sampled paths start at 0");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("sampled path has a non-finite value");
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<double> brownian_values(const DeltaGrid& grid, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(grid.node_count(), 0.0);
  for (std::size_t j = 0; j < grid.cell_count(); ++j)
    values[j + 1] = values[j] + std::sqrt(grid.weight(j)) * normal(rng);
  return values;
}

}  // namespace

SampledPath sample_brownian(const GridPtr& grid, Rng& rng) {
  return SampledPath(grid, brownian_values(*grid, rng));
}

PathEnsemble sample_ensemble(const GridPtr& grid, std::size_t n_paths, std::uint64_t seed,
                             unsigned workers) {
  std::vector<std::vector<double>> raw(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t i) {
    Rng rng(stream_seed(seed, i));
    raw[i] = brownian_values(*grid, rng);
  });
  PathEnsemble ensemble{grid, {}, seed};
  ensemble.paths.reserve(n_paths);
  for (auto& values : raw) ensemble.paths.emplace_back(grid, std::move(values));
  return ensemble;
}

double paley_wiener(const CMPath& h, const SampledPath& w) {
  if (!same_grid(h.grid(), w.grid())) throw GridMismatch();
  double acc = 0.0;
  const auto d = h.density();
  const auto v = w.values();
  for (std::size_t j = 0; j < d.size(); ++j) acc += d[j] * (v[j + 1] - v[j]);
  return acc;
}

SampledPath translate(const SampledPath& w, const CMPath& h) {
  if (!same_grid(h.grid(), w.grid())) throw GridMismatch();
  std::vector<double> values(w.values().begin(), w.values().end());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += h.value(k);
  return SampledPath(w.grid_ptr(), std::move(values));
}

GirsanovDensity girsanov_density(const CMPath& h, const SampledPath& w) {
  GirsanovDensity g;
  g.log_density = paley_wiener(h, w) - 0.5 * h.norm_squared();
  g.density = std::exp(g.log_density);
  return g;
}

}  // namespace tscale
