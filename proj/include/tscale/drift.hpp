#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tscale/grid.hpp"

namespace tscale {

/// Bounded path functional β_t(ω) evaluated at grid nodes.
///
/// An adapted drift only ever sees the prefix ω(t_0), ..., ω(t_k) when it is
/// evaluated at node k, so reading the future is impossible by construction.
/// Non-adapted drifts exist only to check that the verification harness
/// catches them.
class DriftFunctional {
 public:
  /// node k, prefix of length k + 1 (or the full path for non-adapted drifts).
  using Eval = std::function<double(std::size_t node, std::span<const double> path,
                                    const DeltaGrid& grid)>;

  DriftFunctional(std::string name, double bound, Eval eval);

  /// A drift that receives the whole path. Test use only.
  static DriftFunctional non_adapted(std::string name, double bound, Eval eval);

  /// β at node k of `path`, a buffer holding one value per grid node. Only
  /// entries 0..k are handed to adapted drifts.
  double operator()(std::size_t node, std::span<const double> path, const DeltaGrid& grid) const;

  const std::string& name() const noexcept { return name_; }
  double bound() const noexcept { return bound_; }
  bool adapted() const noexcept { return adapted_; }
  bool within_bound(double value) const noexcept;

 private:
  std::string name_;
  double bound_;
  Eval eval_;
  bool adapted_ = true;
};

/// Choice of ρ(t) at left-dense mesh nodes.
enum class RhoConvention {
  exact,             // ρ(t) = t, so the delay term vanishes there
  mesh_predecessor,  // the preceding grid node
};

/// β_t(ω) = a sin(ω(t) − ω(ρ(t))), bound |a|.
DriftFunctional sin_delay_drift(double a, RhoConvention rho = RhoConvention::exact);

/// β ≡ c.
DriftFunctional constant_drift(double c);

/// β_t(ω) = g(t, ω(t)) with |g| <= bound.
DriftFunctional markov_drift(std::string name, std::function<double(double, double)> g, double bound);

/// β_{t_k}(ω) = amplitude · tanh(Σ_i weights[i] · ω(t_{k − lags[i]})), lags
/// clamped at node 0. Depends on a finite window of the past.
DriftFunctional tabulated_past_drift(std::vector<std::size_t> lags, std::vector<double> weights,
                                     double amplitude);

/// β_{t_k}(ω) = a sin(ω(t_{k+2}) − ω(t_k)): peeks one node beyond the end of
/// the cell it drives. Non-adapted; used by the self-tests.
DriftFunctional lookahead_drift(double a);

/// `zero`, `constant:<c>`, `sin:<a>`, `sin-mesh:<a>`, `markov-sin:<a>`,
/// `past:<a>`, `lookahead:<a>`. An optional `@<bound>` suffix overrides the
/// declared bound.
DriftFunctional parse_drift(std::string_view spec);

}  // namespace tscale
