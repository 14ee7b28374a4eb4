#include "bmgap/grid.hpp"

#include <algorithm>
#include <numeric>

namespace bmgap {

GridSpec GridSpec::covering(Point lo, Point hi, double h) {
  if (!(h > 0)) throw InvalidArgument("grid resolution must be positive");
  if (hi.real() < lo.real() || hi.imag() < lo.imag()) throw InvalidArgument("grid box is inverted");
  GridSpec g;
  g.origin = lo;
  g.h = h;
  g.nx = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((hi.real() - lo.real()) / h)));
  g.ny = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((hi.imag() - lo.imag()) / h)));
  return g;
}

GridSpec GridSpec::for_points(Point lo, Point hi, double h) {
  const double diagonal = std::abs(hi - lo);
  const double margin = std::max(4.0 * h, 0.05 * diagonal);
  return covering(lo - Point(margin, margin), hi + Point(margin, margin), h);
}

std::size_t count_set(const CellMask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.cells.begin(), mask.cells.end(), [](auto c) { return c != 0; }));
}

TiledField::TiledField(const GridSpec& grid)
    : grid_(grid), tiles_x_((grid.nx + kTile - 1) / kTile), tiles_y_((grid.ny + kTile - 1) / kTile) {
  tiles_.resize(static_cast<std::size_t>(tiles_x_ * tiles_y_));
}

std::size_t TiledField::allocated_tiles() const {
  return static_cast<std::size_t>(std::count_if(tiles_.begin(), tiles_.end(), [](const auto& t) { return t != nullptr; }));
}

}  // namespace bmgap
