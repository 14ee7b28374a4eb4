#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "bmgap/errors.hpp"

namespace bmgap {

struct CellIndex {
  std::int64_t ix;
  std::int64_t iy;
};

/// Uniform square grid over [origin, origin + (nx, ny) * h]. Cell (ix, iy) covers
/// [origin.x + ix h, origin.x + (ix+1) h) x [origin.y + iy h, origin.y + (iy+1) h).
struct GridSpec {
  Point origin{0.0, 0.0};
  double h = 1.0;
  std::int64_t nx = 0;
  std::int64_t ny = 0;

  /// Grid covering [lo, hi] with cells of side h; dims = ceil(side / h).
  static GridSpec covering(Point lo, Point hi, double h);

  /// Bounding box of the path inflated by max(4h, 0.05 * bbox diagonal) on every side.
  static GridSpec for_points(Point lo, Point hi, double h);

  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t linear(std::int64_t ix, std::int64_t iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  bool in_range(std::int64_t ix, std::int64_t iy) const { return ix >= 0 && iy >= 0 && ix < nx && iy < ny; }

  CellIndex cell_of(Point z) const {
    return {static_cast<std::int64_t>(std::floor((z.real() - origin.real()) / h)),
            static_cast<std::int64_t>(std::floor((z.imag() - origin.imag()) / h))};
  }
  Point center(std::int64_t ix, std::int64_t iy) const {
    return origin + Point((static_cast<double>(ix) + 0.5) * h, (static_cast<double>(iy) + 0.5) * h);
  }
  Point hi() const { return origin + Point(static_cast<double>(nx) * h, static_cast<double>(ny) * h); }
  double area() const { return static_cast<double>(nx) * static_cast<double>(ny) * h * h; }
};

/// Dense per-cell values on a grid.
template <class T>
struct Raster {
  GridSpec grid;
  std::vector<T> cells;

  Raster() = default;
  explicit Raster(const GridSpec& g, T fill = T{}) : grid(g), cells(g.cell_count(), fill) {}

  T& at(std::int64_t ix, std::int64_t iy) { return cells[grid.linear(ix, iy)]; }
  const T& at(std::int64_t ix, std::int64_t iy) const { return cells[grid.linear(ix, iy)]; }
};

using CellMask = Raster<std::uint8_t>;

std::size_t count_set(const CellMask& mask);

/// Sparse per-cell accumulator: 64x64 tiles allocated on first write.
class TiledField {
 public:
  static constexpr std::int64_t kTile = 64;

  TiledField() = default;
  explicit TiledField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  void add(std::int64_t ix, std::int64_t iy, double value) {
    auto& tile = tiles_[tile_id(ix, iy)];
    if (!tile) tile = std::make_unique<double[]>(kTile * kTile);
    tile[(iy % kTile) * kTile + (ix % kTile)] += value;
  }

  double at(std::int64_t ix, std::int64_t iy) const {
    const auto& tile = tiles_[tile_id(ix, iy)];
    return tile ? tile[(iy % kTile) * kTile + (ix % kTile)] : 0.0;
  }

  /// Visits every cell of every allocated tile in a fixed order (tile-major, then row-major).
  template <class F>
  void for_each_allocated(F&& visit) const {
    for (std::int64_t ty = 0; ty < tiles_y_; ++ty) {
      for (std::int64_t tx = 0; tx < tiles_x_; ++tx) {
        const auto& tile = tiles_[static_cast<std::size_t>(ty * tiles_x_ + tx)];
        if (!tile) continue;
        for (std::int64_t ly = 0; ly < kTile; ++ly) {
          const std::int64_t iy = ty * kTile + ly;
          if (iy >= grid_.ny) break;
          for (std::int64_t lx = 0; lx < kTile; ++lx) {
            const std::int64_t ix = tx * kTile + lx;
            if (ix >= grid_.nx) break;
            visit(ix, iy, tile[ly * kTile + lx]);
          }
        }
      }
    }
  }

  std::size_t allocated_tiles() const;

 private:
  std::size_t tile_id(std::int64_t ix, std::int64_t iy) const {
    return static_cast<std::size_t>((iy / kTile) * tiles_x_ + ix / kTile);
  }

  GridSpec grid_;
  std::int64_t tiles_x_ = 0;
  std::int64_t tiles_y_ = 0;
  std::vector<std::unique_ptr<double[]>> tiles_;
};

/// Walks the cells crossed by the segment a -> b in order, calling
/// visit(ix, iy, s0, s1) with the parameter interval [s0, s1] of the segment
/// spent in that cell. The intervals tile [0, 1]; cells touched only at a
/// corner or an endpoint on a cell wall are reported with s0 == s1.
/// Throws OutOfBounds if either endpoint lies outside the grid.
template <class Visit>
void traverse_segment(const GridSpec& grid, Point a, Point b, Visit&& visit) {
  const double u0 = (a.real() - grid.origin.real()) / grid.h;
  const double v0 = (a.imag() - grid.origin.imag()) / grid.h;
  const double u1 = (b.real() - grid.origin.real()) / grid.h;
  const double v1 = (b.imag() - grid.origin.imag()) / grid.h;
  std::int64_t ix = static_cast<std::int64_t>(std::floor(u0));
  std::int64_t iy = static_cast<std::int64_t>(std::floor(v0));
  const auto ix_end = static_cast<std::int64_t>(std::floor(u1));
  const auto iy_end = static_cast<std::int64_t>(std::floor(v1));
  if (!grid.in_range(ix, iy)) throw OutOfBounds("path vertex outside grid", a);
  if (!grid.in_range(ix_end, iy_end)) throw OutOfBounds("path vertex outside grid", b);

  std::int64_t remaining_x = ix_end > ix ? ix_end - ix : ix - ix_end;
  std::int64_t remaining_y = iy_end > iy ? iy_end - iy : iy - iy_end;
  const std::int64_t step_x = ix_end > ix ? 1 : -1;
  const std::int64_t step_y = iy_end > iy ? 1 : -1;
  const double du = u1 - u0;
  const double dv = v1 - v0;
  constexpr double kInf = 1e300;
  double next_x = kInf;
  double delta_x = kInf;
  if (remaining_x > 0) {
    next_x = (step_x > 0 ? (static_cast<double>(ix) + 1.0 - u0) : (static_cast<double>(ix) - u0)) / du;
    delta_x = 1.0 / std::abs(du);
  }
  double next_y = kInf;
  double delta_y = kInf;
  if (remaining_y > 0) {
    next_y = (step_y > 0 ? (static_cast<double>(iy) + 1.0 - v0) : (static_cast<double>(iy) - v0)) / dv;
    delta_y = 1.0 / std::abs(dv);
  }

  double s_prev = 0.0;
  while (remaining_x > 0 || remaining_y > 0) {
    const bool take_x = remaining_y == 0 || (remaining_x > 0 && next_x <= next_y);
    double s = take_x ? next_x : next_y;
    if (s < s_prev) s = s_prev;
    if (s > 1.0) s = 1.0;
    visit(ix, iy, s_prev, s);
    s_prev = s;
    if (take_x) {
      ix += step_x;
      next_x += delta_x;
      --remaining_x;
    } else {
      iy += step_y;
      next_y += delta_y;
      --remaining_y;
    }
  }
  visit(ix, iy, s_prev, 1.0);
}

}  // namespace bmgap
