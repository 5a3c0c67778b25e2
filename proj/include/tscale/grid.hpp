#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tscale/timescale.hpp"

namespace tscale {

/// Finite node set refining a TimeScale. Cell j joins node j to node j + 1 and
/// carries λ_Δ-weight t_{j+1} − t_j: the node spacing inside a segment, the
/// gap length when node j is right-scattered.
class DeltaGrid {
 public:
  /// Segment endpoints plus a uniform subdivision of every nondegenerate
  /// segment with step <= mesh.
  DeltaGrid(TimeScale ts, double mesh);

  /// Grid on an explicit node set. Nodes must be members of `ts`, strictly
  /// increasing, and include every segment endpoint.
  static DeltaGrid from_nodes(TimeScale ts, std::vector<double> nodes);

  const TimeScale& timescale() const noexcept { return ts_; }
  double mesh() const noexcept { return mesh_; }

  std::size_t node_count() const noexcept { return times_.size(); }
  std::size_t cell_count() const noexcept { return weights_.size(); }

  double time(std::size_t node) const { return times_[node]; }
  double weight(std::size_t cell) const { return weights_[cell]; }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// True when cell j is the atom of a right-scattered node.
  bool atom_cell(std::size_t cell) const { return atom_cell_[cell]; }
  bool left_scattered(std::size_t node) const { return left_scattered_[node]; }

  /// Node index of ρ(t_k): k itself for left-dense nodes and node 0.
  std::size_t rho_index(std::size_t node) const { return rho_[node]; }
  /// Immediately preceding grid node (0 for node 0).
  std::size_t mesh_predecessor(std::size_t node) const { return node == 0 ? 0 : node - 1; }

  std::optional<std::size_t> find_node(double t, double tol = TimeScale::kMembershipTol) const;

  double total_weight() const;

 private:
  DeltaGrid(TimeScale ts, std::vector<double> nodes, double mesh);

  TimeScale ts_;
  double mesh_;
  std::vector<double> times_;
  std::vector<double> weights_;
  std::vector<bool> atom_cell_;
  std::vector<bool> left_scattered_;
  std::vector<std::size_t> rho_;
};

using GridPtr = std::shared_ptr<const DeltaGrid>;

GridPtr build_grid(const TimeScale& ts, double mesh);

/// Pointer identity or identical node sets.
bool same_grid(const DeltaGrid& a, const DeltaGrid& b);

}  // namespace tscale
