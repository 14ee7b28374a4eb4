#pragma once

#include <span>
#include <vector>

#include "bmgap/errors.hpp"
#include "bmgap/path.hpp"

namespace bmgap {

struct Box {
  Point lo;
  Point hi;
  double width() const { return hi.real() - lo.real(); }
  double height() const { return hi.imag() - lo.imag(); }
};

Box bounding_box(std::span<const Point> points);
Box bounding_box(const Path& path);

/// Convex hull (counter-clockwise, no collinear points) by Andrew's monotone chain.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Maximum pairwise distance, via rotating calipers on the convex hull.
double diameter(std::span<const Point> points);
double diameter(const Path& path);

}  // namespace bmgap
