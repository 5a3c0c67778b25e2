#include "tscale/cameron_martin.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tscale/error.hpp"

namespace tscale {

CMPath::CMPath(GridPtr grid, std::vector<double> density)
    : grid_(std::move(grid)), density_(std::move(density)) {
  if (!grid_) throw InvalidArgument("CMPath needs a grid");
  if (density_.size() != grid_->cell_count())
    throw InvalidArgument("CMPath density must have one value per cell");
  values_.resize(grid_->node_count());
  values_[0] = 0.0;
  for (std::size_t j = 0; j < density_.size(); ++j)
    values_[j + 1] = values_[j] + density_[j] * grid_->weight(j);
}

CMPath CMPath::zero(GridPtr grid) { return constant(std::move(grid), 0.0); }

CMPath CMPath::constant(GridPtr grid, double density) {
  const std::size_t cells = grid ? grid->cell_count() : 0;
  return CMPath(std::move(grid), std::vector<double>(cells, density));
}

double CMPath::norm_squared() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < density_.size(); ++j)
    acc += density_[j] * density_[j] * grid_->weight(j);
  return acc;
}

double CMPath::norm() const { return std::sqrt(norm_squared()); }

CMPath CMPath::operator-() const { return -1.0 * *this; }

CMPath& CMPath::operator+=(const CMPath& other) {
  if (!same_grid(*grid_, other.grid())) throw GridMismatch();
  for (std::size_t j = 0; j < density_.size(); ++j) density_[j] += other.density_[j];
  for (std::size_t j = 0; j < density_.size(); ++j)
    values_[j + 1] = values_[j] + density_[j] * grid_->weight(j);
  return *this;
}

CMPath operator*(double c, const CMPath& h) {
  std::vector<double> d(h.density().begin(), h.density().end());
  for (double& x : d) x *= c;
  return CMPath(h.grid_ptr(), std::move(d));
}

double ExtendedPath::operator()(double t) const {
  const DeltaGrid& g = path.grid();
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return path.values().back();
  auto times = g.times();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto j = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
  return path.value(j) + path.density()[j] * (t - g.time(j));
}

double inner_product(const CMPath& h, const CMPath& k) {
  if (!same_grid(h.grid(), k.grid())) throw GridMismatch();
  double acc = 0.0;
  const DeltaGrid& g = h.grid();
  for (std::size_t j = 0; j < g.cell_count(); ++j)
    acc += h.density()[j] * k.density()[j] * g.weight(j);
  return acc;
}

CMPath density_from_path(GridPtr grid, const std::function<double(double)>& g) {
  std::vector<double> density(grid->cell_count());
  double left = g(grid->time(0));
  for (std::size_t j = 0; j < density.size(); ++j) {
    const double right = g(grid->time(j + 1));
    density[j] = (right - left) / grid->weight(j);
    left = right;
  }
  return CMPath(std::move(grid), std::move(density));
}

CMPath restrict_path(const ExtendedPath& g, GridPtr grid) {
  return density_from_path(std::move(grid), [&g](double t) { return g(t); });
}

ExtendedPath extend_isometric(const CMPath& h, std::size_t subdivisions) {
  if (subdivisions == 0) throw InvalidArgument("extend_isometric needs subdivisions >= 1");
  const DeltaGrid& g = h.grid();
  std::vector<double> nodes;
  std::vector<double> density;
  nodes.reserve(g.cell_count() * subdivisions + 1);
  density.reserve(g.cell_count() * subdivisions);
  for (std::size_t j = 0; j < g.cell_count(); ++j) {
    const double a = g.time(j);
    const double w = g.weight(j);
    for (std::size_t s = 0; s < subdivisions; ++s) {
      nodes.push_back(a + w * static_cast<double>(s) / static_cast<double>(subdivisions));
      density.push_back(h.density()[j]);
    }
  }
  nodes.push_back(g.time(g.node_count() - 1));
  auto line = std::make_shared<const DeltaGrid>(
      DeltaGrid::from_nodes(TimeScale::interval(), std::move(nodes)));
  return ExtendedPath{CMPath(std::move(line), std::move(density))};
}

double evaluate(const CMPath& h, double t) {
  const auto node = h.grid().find_node(t);
  if (!node) throw OffNodeEvaluation(t);
  return h.value(*node);
}

void write_columns(std::ostream& os, const CMPath& h) {
  const DeltaGrid& g = h.grid();
  const auto old_precision = os.precision(17);
  os << "node,cell_weight,density,value\n";
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const bool has_cell = k < g.cell_count();
    os << g.time(k) << ',' << (has_cell ? g.weight(k) : 0.0) << ','
       << (has_cell ? h.density()[k] : 0.0) << ',' << h.value(k) << '\n';
  }
  os.precision(old_precision);
}

CMPath read_columns(std::istream& is, GridPtr grid) {
  std::string line;
  if (!std::getline(is, line) || line != "node,cell_weight,density,value")
    throw ParseError("CMPath table: missing header");
  std::vector<double> density;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    double node = 0, weight = 0, dens = 0, value = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> node >> c1 >> weight >> c2 >> dens >> c3 >> value) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw ParseError("CMPath table: malformed row " + std::to_string(row));
    if (row >= grid->node_count() || std::abs(node - grid->time(row)) > TimeScale::kMembershipTol)
      throw GridMismatch();
    if (row < grid->cell_count()) density.push_back(dens);
    ++row;
  }
  if (row != grid->node_count()) throw GridMismatch();
  return CMPath(std::move(grid), std::move(density));
}

}  // namespace tscale
