#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "bmgap/grid.hpp"
#include "bmgap/path.hpp"

namespace bmgap {

/// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher) in cell units:
/// out[i] = min over source cells j of |center_i - center_j|^2 / h^2. Cells with no
/// source anywhere get +infinity.
std::vector<double> squared_distance_transform(std::span<const std::uint8_t> is_source, std::int64_t nx,
                                               std::int64_t ny);

/// Cells crossed by the polyline. A single-vertex path marks its own cell.
CellMask rasterize(const Path& path, const GridSpec& grid);

enum class CellClass : std::uint8_t {
  exterior = 0,
  interior = 1,  // inside the outer boundary, not touching the exterior
  shore = 2,     // visited, 4-adjacent to the exterior and to the interior
  filament = 3,  // visited, 4-adjacent to the exterior, no interior neighbour
};

/// Outer-boundary decomposition of a rasterized trace.
///
/// The exterior is the 4-connected flood fill of unvisited cells from the grid border;
/// the trace itself is 8-connected so the fill cannot slip through diagonal steps.
/// Boundary cells are the visited cells sharing an edge with the exterior. Everything
/// else that is not exterior is interior, including visited cells deep inside the hull.
///
/// Area weights: interior 1, shore 1/2 (the curve splits the cell), filament 0 (a
/// one-cell-thick strand with exterior on both sides encloses nothing).
struct RasterHull {
  GridSpec grid;
  CellMask visited;
  Raster<CellClass> cells;
  /// Distance from each cell center to the outer boundary, positive on interior and
  /// boundary cells, zero on the exterior. Measured as the distance to the nearest
  /// exterior cell center minus h/2, the boundary sitting between the two cells.
  Raster<float> dist_to_boundary;
  std::size_t interior_cells = 0;
  std::size_t shore_cells = 0;
  std::size_t filament_cells = 0;
  double area = 0.0;

  bool in_hull(std::int64_t ix, std::int64_t iy) const { return cells.at(ix, iy) != CellClass::exterior; }
  bool is_boundary(std::int64_t ix, std::int64_t iy) const {
    const auto c = cells.at(ix, iy);
    return c == CellClass::shore || c == CellClass::filament;
  }
  double area_weight(std::int64_t ix, std::int64_t iy) const { return area_weight(cells.at(ix, iy)); }
  static double area_weight(CellClass c) {
    switch (c) {
      case CellClass::interior: return 1.0;
      case CellClass::shore: return 0.5;
      default: return 0.0;
    }
  }
  std::size_t boundary_cells() const { return shore_cells + filament_cells; }
};

RasterHull outer_decompose(const CellMask& visited);

struct Band {
  CellMask mask;
  double area = 0.0;
};

/// Hull cells within eps of the outer boundary, with their area.
/// Throws BandTooThin when eps < 4h.
Band boundary_band(const RasterHull& hull, double eps);

/// Area of { x in A : d(x, K) <= r }, K the visited cells, distances between cell centers.
/// Throws ResolutionError when r < h.
double enlargement_area(const CellMask& visited, const CellMask& region, double r);

/// Same with A = whole grid.
double enlargement_area(const CellMask& visited, double r);

/// Grid sized for the path at resolution h (see GridSpec::for_points).
GridSpec grid_for(const Path& path, double h);

/// One-byte-per-cell portable graymap: 0 exterior, 128 interior, 255 path.
void write_pgm(std::ostream& out, const RasterHull& hull);

}  // namespace bmgap
