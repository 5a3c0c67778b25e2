#include "tscale/grid.hpp"

#include <algorithm>
#include <cmath>

#include "tscale/error.hpp"

namespace tscale {

namespace {

std::vector<double> subdivide(const TimeScale& ts, double mesh) {
  if (!(mesh > 0.0) || !std::isfinite(mesh)) throw InvalidArgument("grid mesh must be positive");
  std::vector<double> nodes;
  for (const Segment& s : ts.segments()) {
    if (s.degenerate()) {
      nodes.push_back(s.lo);
      continue;
    }
    const auto pieces =
        static_cast<std::size_t>(std::max(1.0, std::ceil(s.length() / mesh - 1e-9)));
    nodes.push_back(s.lo);
    for (std::size_t k = 1; k < pieces; ++k)
      nodes.push_back(s.lo + s.length() * static_cast<double>(k) / static_cast<double>(pieces));
    nodes.push_back(s.hi);
  }
  return nodes;
}

}  // namespace

DeltaGrid::DeltaGrid(TimeScale ts, double mesh) : DeltaGrid(ts, subdivide(ts, mesh), mesh) {}

DeltaGrid DeltaGrid::from_nodes(TimeScale ts, std::vector<double> nodes) {
  double widest = 0.0;
  for (std::size_t k = 1; k < nodes.size(); ++k) widest = std::max(widest, nodes[k] - nodes[k - 1]);
  return DeltaGrid(std::move(ts), std::move(nodes), widest);
}

DeltaGrid::DeltaGrid(TimeScale ts, std::vector<double> nodes, double mesh)
    : ts_(std::move(ts)), mesh_(mesh), times_(std::move(nodes)) {
  if (times_.size() < 2) throw InvalidArgument("grid needs at least two nodes");
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (!ts_.contains(times_[k])) throw PointNotInTimeScale(times_[k]);
    times_[k] = ts_.snap(times_[k]);
    if (k > 0 && !(times_[k] > times_[k - 1])) throw InvalidArgument("grid nodes must increase");
  }
  for (const Segment& s : ts_.segments()) {
    if (!find_node(s.lo) || !find_node(s.hi))
      throw InvalidArgument("grid must contain every segment endpoint");
  }

  const std::size_t n = times_.size();
  weights_.resize(n - 1);
  atom_cell_.resize(n - 1);
  left_scattered_.assign(n, false);
  rho_.resize(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    weights_[j] = times_[j + 1] - times_[j];
    // a cell is an atom exactly when its left node is a segment's right end
    atom_cell_[j] = ts_.forward_jump(times_[j]) > times_[j];
  }
  rho_[0] = 0;
  for (std::size_t k = 1; k < n; ++k) {
    left_scattered_[k] = ts_.backward_jump(times_[k]) < times_[k];
    rho_[k] = left_scattered_[k] ? k - 1 : k;
  }
}

std::optional<std::size_t> DeltaGrid::find_node(double t, double tol) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
  if (it != times_.end() && std::abs(*it - t) <= tol)
    return static_cast<std::size_t>(std::distance(times_.begin(), it));
  return std::nullopt;
}

double DeltaGrid::total_weight() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

GridPtr build_grid(const TimeScale& ts, double mesh) {
  return std::make_shared<const DeltaGrid>(ts, mesh);
}

bool same_grid(const DeltaGrid& a, const DeltaGrid& b) {
  if (&a == &b) return true;
  return std::equal(a.times().begin(), a.times().end(), b.times().begin(), b.times().end());
}

}  // namespace tscale
