#include "bmgap/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bmgap/geometry.hpp"

namespace bmgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas q -> f[p] + (q - p)^2 over the finite sites p.
void envelope_1d(const double* f, std::int64_t n, double* out, std::vector<std::int64_t>& sites,
                 std::vector<double>& bounds) {
  sites.clear();
  bounds.clear();
  for (std::int64_t q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    const double fq = f[q] + static_cast<double>(q) * static_cast<double>(q);
    double s = -kInf;
    while (!sites.empty()) {
      const std::int64_t p = sites.back();
      const double fp = f[p] + static_cast<double>(p) * static_cast<double>(p);
      s = (fq - fp) / (2.0 * static_cast<double>(q - p));
      if (s > bounds.back()) break;
      sites.pop_back();
      bounds.pop_back();
      s = -kInf;
    }
    sites.push_back(q);
    bounds.push_back(sites.size() == 1 ? -kInf : s);
  }
  if (sites.empty()) {
    std::fill(out, out + n, kInf);
    return;
  }
  std::size_t k = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    while (k + 1 < sites.size() && bounds[k + 1] < static_cast<double>(q)) ++k;
    const double d = static_cast<double>(q - sites[k]);
    out[q] = f[sites[k]] + d * d;
  }
}

struct Window {
  std::int64_t x0, y0, x1, y1;  // inclusive-exclusive
};

std::vector<double> transform_window(const CellMask& mask, bool source_value, const Window& w) {
  const std::int64_t nx = w.x1 - w.x0;
  const std::int64_t ny = w.y1 - w.y0;
  std::vector<std::uint8_t> is_source(static_cast<std::size_t>(nx * ny));
  for (std::int64_t y = 0; y < ny; ++y) {
    for (std::int64_t x = 0; x < nx; ++x) {
      is_source[static_cast<std::size_t>(y * nx + x)] = (mask.at(w.x0 + x, w.y0 + y) != 0) == source_value;
    }
  }
  return squared_distance_transform(is_source, nx, ny);
}

}  // namespace

std::vector<double> squared_distance_transform(std::span<const std::uint8_t> is_source, std::int64_t nx,
                                               std::int64_t ny) {
  if (nx <= 0 || ny <= 0 || is_source.size() != static_cast<std::size_t>(nx * ny)) {
    throw InvalidArgument("distance transform: mask size does not match dimensions");
  }
  std::vector<double> out(is_source.size(), kInf);

  // Columns: 1D distance to the nearest source in the same column, two sweeps.
  for (std::int64_t x = 0; x < nx; ++x) {
    double last = -kInf;
    for (std::int64_t y = 0; y < ny; ++y) {
      const auto i = static_cast<std::size_t>(y * nx + x);
      if (is_source[i]) last = static_cast<double>(y);
      const double d = static_cast<double>(y) - last;
      out[i] = std::isfinite(d) ? d * d : kInf;
    }
    last = kInf;
    for (std::int64_t y = ny - 1; y >= 0; --y) {
      const auto i = static_cast<std::size_t>(y * nx + x);
      if (is_source[i]) last = static_cast<double>(y);
      const double d = last - static_cast<double>(y);
      if (std::isfinite(d)) out[i] = std::min(out[i], d * d);
    }
  }

  // Rows: parabola envelope over the column results.
  std::vector<double> row(static_cast<std::size_t>(nx));
  std::vector<std::int64_t> sites;
  std::vector<double> bounds;
  sites.reserve(static_cast<std::size_t>(nx));
  bounds.reserve(static_cast<std::size_t>(nx));
  for (std::int64_t y = 0; y < ny; ++y) {
    double* base = out.data() + y * nx;
    std::copy(base, base + nx, row.begin());
    envelope_1d(row.data(), nx, base, sites, bounds);
  }
  return out;
}

CellMask rasterize(const Path& path, const GridSpec& grid) {
  CellMask mask(grid, 0);
  if (path.size() == 0) return mask;
  if (path.size() == 1) {
    const auto c = grid.cell_of(path.front().z);
    if (!grid.in_range(c.ix, c.iy)) throw OutOfBounds("path vertex outside grid", path.front().z);
    mask.at(c.ix, c.iy) = 1;
    return mask;
  }
  const auto vertices = path.vertices();
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    traverse_segment(grid, vertices[i].z, vertices[i + 1].z,
                     [&](std::int64_t ix, std::int64_t iy, double, double) { mask.at(ix, iy) = 1; });
  }
  return mask;
}

RasterHull outer_decompose(const CellMask& visited) {
  const GridSpec& g = visited.grid;
  if (count_set(visited) == 0) throw InvalidArgument("outer_decompose: empty mask");

  RasterHull hull;
  hull.grid = g;
  hull.visited = visited;
  hull.cells = Raster<CellClass>(g, CellClass::interior);

  // Exterior: 4-connected fill of unvisited cells seeded from the whole grid border.
  std::vector<std::size_t> stack;
  auto seed = [&](std::int64_t ix, std::int64_t iy) {
    const std::size_t i = g.linear(ix, iy);
    if (visited.cells[i] == 0 && hull.cells.cells[i] != CellClass::exterior) {
      hull.cells.cells[i] = CellClass::exterior;
      stack.push_back(i);
    }
  };
  for (std::int64_t ix = 0; ix < g.nx; ++ix) {
    seed(ix, 0);
    seed(ix, g.ny - 1);
  }
  for (std::int64_t iy = 0; iy < g.ny; ++iy) {
    seed(0, iy);
    seed(g.nx - 1, iy);
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const auto ix = static_cast<std::int64_t>(i % static_cast<std::size_t>(g.nx));
    const auto iy = static_cast<std::int64_t>(i / static_cast<std::size_t>(g.nx));
    if (ix > 0) seed(ix - 1, iy);
    if (ix + 1 < g.nx) seed(ix + 1, iy);
    if (iy > 0) seed(ix, iy - 1);
    if (iy + 1 < g.ny) seed(ix, iy + 1);
  }

  // Boundary cells and the hull's bounding window.
  auto cls = [&](std::int64_t ix, std::int64_t iy) {
    return g.in_range(ix, iy) ? hull.cells.at(ix, iy) : CellClass::exterior;
  };
  Window w{g.nx, g.ny, -1, -1};
  std::vector<std::size_t> boundary;
  for (std::int64_t iy = 0; iy < g.ny; ++iy) {
    for (std::int64_t ix = 0; ix < g.nx; ++ix) {
      if (hull.cells.at(ix, iy) == CellClass::exterior) continue;
      w.x0 = std::min(w.x0, ix);
      w.y0 = std::min(w.y0, iy);
      w.x1 = std::max(w.x1, ix);
      w.y1 = std::max(w.y1, iy);
      if (visited.at(ix, iy) == 0) continue;
      if (cls(ix - 1, iy) == CellClass::exterior || cls(ix + 1, iy) == CellClass::exterior ||
          cls(ix, iy - 1) == CellClass::exterior || cls(ix, iy + 1) == CellClass::exterior) {
        boundary.push_back(g.linear(ix, iy));
      }
    }
  }
  // Mark boundary only after scanning, so the interior-neighbour test below sees final classes.
  for (const auto i : boundary) hull.cells.cells[i] = CellClass::filament;
  for (const auto i : boundary) {
    const auto ix = static_cast<std::int64_t>(i % static_cast<std::size_t>(g.nx));
    const auto iy = static_cast<std::int64_t>(i / static_cast<std::size_t>(g.nx));
    if (cls(ix - 1, iy) == CellClass::interior || cls(ix + 1, iy) == CellClass::interior ||
        cls(ix, iy - 1) == CellClass::interior || cls(ix, iy + 1) == CellClass::interior) {
      hull.cells.cells[i] = CellClass::shore;
    }
  }
  for (const auto c : hull.cells.cells) {
    if (c == CellClass::interior) ++hull.interior_cells;
    if (c == CellClass::shore) ++hull.shore_cells;
    if (c == CellClass::filament) ++hull.filament_cells;
  }
  hull.area = (static_cast<double>(hull.interior_cells) + 0.5 * static_cast<double>(hull.shore_cells)) * g.h * g.h;

  // Distance to the exterior over the hull window grown by one cell; the grown ring is
  // exterior (or off-grid), so no nearer exterior cell can lie outside the window.
  hull.dist_to_boundary = Raster<float>(g, 0.0f);
  Window win{std::max<std::int64_t>(0, w.x0 - 1), std::max<std::int64_t>(0, w.y0 - 1),
             std::min<std::int64_t>(g.nx, w.x1 + 2), std::min<std::int64_t>(g.ny, w.y1 + 2)};
  CellMask exterior(g, 0);
  for (std::size_t i = 0; i < exterior.cells.size(); ++i) {
    exterior.cells[i] = hull.cells.cells[i] == CellClass::exterior ? 1 : 0;
  }
  const auto d2 = transform_window(exterior, true, win);
  const std::int64_t wnx = win.x1 - win.x0;
  for (std::int64_t iy = win.y0; iy < win.y1; ++iy) {
    for (std::int64_t ix = win.x0; ix < win.x1; ++ix) {
      if (hull.cells.at(ix, iy) == CellClass::exterior) continue;
      double d = d2[static_cast<std::size_t>((iy - win.y0) * wnx + (ix - win.x0))];
      if (!std::isfinite(d)) {
        // The hull touches the grid border on every side; fall back to the border distance.
        const double border = static_cast<double>(std::min({ix + 1, iy + 1, g.nx - ix, g.ny - iy}));
        d = border * border;
      }
      hull.dist_to_boundary.at(ix, iy) = static_cast<float>(g.h * (std::sqrt(d) - 0.5));
    }
  }
  return hull;
}

Band boundary_band(const RasterHull& hull, double eps) {
  if (eps < 4.0 * hull.grid.h) {
    throw BandTooThin("band width " + std::to_string(eps) + " is below four cells (h = " +
                          std::to_string(hull.grid.h) + ")",
                      eps);
  }
  Band band;
  band.mask = CellMask(hull.grid, 0);
  double weight = 0.0;
  for (std::size_t i = 0; i < band.mask.cells.size(); ++i) {
    const CellClass c = hull.cells.cells[i];
    if (c == CellClass::exterior) continue;
    if (hull.dist_to_boundary.cells[i] < eps) {
      band.mask.cells[i] = 1;
      weight += RasterHull::area_weight(c);
    }
  }
  band.area = weight * hull.grid.h * hull.grid.h;
  return band;
}

namespace {

double enlargement_impl(const CellMask& visited, const CellMask* region, double r) {
  const GridSpec& g = visited.grid;
  if (r < g.h) throw ResolutionError("enlargement radius below the grid resolution");
  if (region && (region->grid.nx != g.nx || region->grid.ny != g.ny)) {
    throw InvalidArgument("enlargement: region mask is on a different grid");
  }
  const double radius = r / g.h;
  const auto reach = static_cast<std::int64_t>(std::floor(radius));
  // Half-widths of the disc stencil per row offset.
  std::vector<std::int64_t> half(static_cast<std::size_t>(reach + 1));
  for (std::int64_t dy = 0; dy <= reach; ++dy) {
    half[static_cast<std::size_t>(dy)] =
        static_cast<std::int64_t>(std::floor(std::sqrt(radius * radius - static_cast<double>(dy * dy))));
  }
  // Visited columns per row, so each output row only scans nearby rows.
  std::vector<std::vector<std::int64_t>> columns(static_cast<std::size_t>(g.ny));
  for (std::int64_t iy = 0; iy < g.ny; ++iy) {
    for (std::int64_t ix = 0; ix < g.nx; ++ix) {
      if (visited.at(ix, iy)) columns[static_cast<std::size_t>(iy)].push_back(ix);
    }
  }
  std::vector<std::uint8_t> row(static_cast<std::size_t>(g.nx));
  std::size_t count = 0;
  for (std::int64_t iy = 0; iy < g.ny; ++iy) {
    bool any = false;
    for (std::int64_t dy = -reach; dy <= reach; ++dy) {
      const std::int64_t sy = iy + dy;
      if (sy < 0 || sy >= g.ny || columns[static_cast<std::size_t>(sy)].empty()) continue;
      if (!any) {
        std::fill(row.begin(), row.end(), 0);
        any = true;
      }
      const std::int64_t w = half[static_cast<std::size_t>(dy < 0 ? -dy : dy)];
      for (const auto cx : columns[static_cast<std::size_t>(sy)]) {
        const std::int64_t a = std::max<std::int64_t>(0, cx - w);
        const std::int64_t b = std::min<std::int64_t>(g.nx - 1, cx + w);
        std::fill(row.begin() + a, row.begin() + b + 1, 1);
      }
    }
    if (!any) continue;
    for (std::int64_t ix = 0; ix < g.nx; ++ix) {
      if (row[static_cast<std::size_t>(ix)] && (!region || region->at(ix, iy))) ++count;
    }
  }
  return static_cast<double>(count) * g.h * g.h;
}

}  // namespace

double enlargement_area(const CellMask& visited, const CellMask& region, double r) {
  return enlargement_impl(visited, &region, r);
}

double enlargement_area(const CellMask& visited, double r) { return enlargement_impl(visited, nullptr, r); }

GridSpec grid_for(const Path& path, double h) {
  const Box box = bounding_box(path);
  return GridSpec::for_points(box.lo, box.hi, h);
}

void write_pgm(std::ostream& out, const RasterHull& hull) {
  out << "P5\n" << hull.grid.nx << ' ' << hull.grid.ny << "\n255\n";
  // Image rows run top to bottom, grid rows bottom to top.
  std::vector<char> line(static_cast<std::size_t>(hull.grid.nx));
  for (std::int64_t iy = hull.grid.ny - 1; iy >= 0; --iy) {
    for (std::int64_t ix = 0; ix < hull.grid.nx; ++ix) {
      std::uint8_t v = 0;
      if (hull.visited.at(ix, iy)) {
        v = 255;
      } else if (hull.in_hull(ix, iy)) {
        v = 128;
      }
      line[static_cast<std::size_t>(ix)] = static_cast<char>(v);
    }
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

}  // namespace bmgap
