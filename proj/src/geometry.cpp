#include "bmgap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmgap {

Box bounding_box(std::span<const Point> points) {
  if (points.empty()) throw InvalidArgument("bounding box of an empty point set");
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  for (const auto& p : points) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  }
  return {{x0, y0}, {x1, y1}};
}

Box bounding_box(const Path& path) {
  if (path.size() == 0) throw InvalidArgument("bounding box of an empty path");
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  for (const auto& v : path.vertices()) {
    x0 = std::min(x0, v.z.real());
    x1 = std::max(x1, v.z.real());
    y0 = std::min(y0, v.z.imag());
    y1 = std::max(y1, v.z.imag());
  }
  return {{x0, y0}, {x1, y1}};
}

namespace {

double cross(Point o, Point a, Point b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(), [](Point a, Point b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;

  std::vector<Point> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

double diameter(std::span<const Point> points) {
  if (points.size() < 2) return 0.0;
  const auto hull = convex_hull(std::vector<Point>(points.begin(), points.end()));
  const std::size_t n = hull.size();
  if (n == 1) return 0.0;
  if (n == 2) return std::abs(hull[0] - hull[1]);

  // Rotating calipers over antipodal pairs; squared distances keep the comparisons exact.
  auto dist2 = [](Point a, Point b) { return std::norm(a - b); };
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = hull[i];
    const Point b = hull[(i + 1) % n];
    while (std::abs(cross(a, b, hull[(j + 1) % n])) > std::abs(cross(a, b, hull[j]))) j = (j + 1) % n;
    best = std::max({best, dist2(a, hull[j]), dist2(b, hull[j])});
  }
  return std::sqrt(best);
}

double diameter(const Path& path) {
  std::vector<Point> points;
  points.reserve(path.size());
  for (const auto& v : path.vertices()) points.push_back(v.z);
  return diameter(points);
}

}  // namespace bmgap
