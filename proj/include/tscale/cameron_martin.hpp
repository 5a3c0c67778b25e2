#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tscale/grid.hpp"

namespace tscale {

/// Element of H_T with a piecewise-constant density h^Δ (one value per grid
/// cell) and its primitive h(t_k) = Σ_{j<k} h^Δ_j w_j at the nodes.
class CMPath {
 public:
  CMPath(GridPtr grid, std::vector<double> density);
  static CMPath zero(GridPtr grid);
  static CMPath constant(GridPtr grid, double density);

  const DeltaGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }

  std::span<const double> density() const noexcept { return density_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t node) const { return values_[node]; }

  double norm_squared() const;
  double norm() const;

  CMPath operator-() const;
  CMPath& operator+=(const CMPath& other);
  friend CMPath operator+(CMPath a, const CMPath& b) { return a += b; }
  friend CMPath operator*(double c, const CMPath& h);

 private:
  GridPtr grid_;
  std::vector<double> density_;
  std::vector<double> values_;
};

/// An H¹ element: a CMPath over a grid of T = [0, 1].
struct ExtendedPath {
  CMPath path;

  /// g(t) for any t in [0, 1]; exact because the density is piecewise constant.
  double operator()(double t) const;
  double norm() const { return path.norm(); }
};

double inner_product(const CMPath& h, const CMPath& k);

/// Restriction J(g) of an H¹ function g to the grid's time scale: the density
/// on cell j is (g(t_{j+1}) − g(t_j)) / w_j, which is the difference quotient
/// at right-scattered nodes and the cell average of ġ on dense cells.
CMPath density_from_path(GridPtr grid, const std::function<double(double)>& g);

/// Restriction of an extended path onto `grid`.
CMPath restrict_path(const ExtendedPath& g, GridPtr grid);

/// Adjoint embedding H_T → H¹: density h^Δ on T-cells and the constant
/// h^Δ(t_i) across each gap (t_i, σ(t_i)]. Every cell of h's grid is split
/// into `subdivisions` equal cells of the [0, 1] grid.
ExtendedPath extend_isometric(const CMPath& h, std::size_t subdivisions = 1);

/// h(t) at a grid node; off-node points are an error.
double evaluate(const CMPath& h, double t);

/// Columnar text: node,cell_weight,density,value (one row per node; the last
/// node has no cell and reports weight and density 0).
void write_columns(std::ostream& os, const CMPath& h);
CMPath read_columns(std::istream& is, GridPtr grid);

}  // namespace tscale
