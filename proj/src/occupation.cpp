#include "bmgap/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>


namespace bmgap {

double OccupationField::total() const {
  double sum = 0.0;
  cell_time.for_each_allocated([&](std::int64_t, std::int64_t, double v) { sum += v; });
  return sum;
}

OccupationField occupation_grid(const Path& path, const GridSpec& grid) {
  OccupationField field{TiledField(grid), path.duration()};
  if (path.size() == 0) return field;
  if (path.size() == 1) {
    const auto c = grid.cell_of(path.front().z);
    if (!grid.in_range(c.ix, c.iy)) throw OutOfBounds("path vertex outside grid", path.front().z);
    field.cell_time.add(c.ix, c.iy, 0.0);
    return field;
  }
  const auto vertices = path.vertices();
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const double step = vertices[i + 1].t - vertices[i].t;
    traverse_segment(grid, vertices[i].z, vertices[i + 1].z, [&](std::int64_t ix, std::int64_t iy, double s0, double s1) {
      if (s1 > s0) field.cell_time.add(ix, iy, step * (s1 - s0));
    });
  }
  return field;
}

TestFunctionSpec TestFunctionSpec::uniform(double eps) {
  TestFunctionSpec spec;
  spec.kind = Kind::uniform_band;
  spec.eps = eps;
  spec.profile_name = "uniform";
  return spec;
}

TestFunctionSpec TestFunctionSpec::whole_interior() {
  return uniform(std::numeric_limits<double>::infinity());
}

TestFunctionSpec TestFunctionSpec::sine_bump(double eps) {
  TestFunctionSpec spec;
  spec.kind = Kind::radial_profile;
  spec.eps = eps;
  spec.profile = [](double s) {
    const double v = std::sin(std::numbers::pi * s);
    return v * v;
  };
  spec.profile_name = "sine_bump";
  return spec;
}

DiscreteTestFunction discretize(const TestFunctionSpec& spec, const RasterHull& hull) {
  const double h = hull.grid.h;
  if (!(spec.eps > 0)) throw InvalidArgument("test function width must be positive");
  if (std::isfinite(spec.eps) && spec.eps < 4.0 * h) {
    throw BandTooThin("test function width " + std::to_string(spec.eps) + " is below four cells", spec.eps);
  }
  if (spec.kind == TestFunctionSpec::Kind::radial_profile && !spec.profile) {
    throw InvalidArgument("radial_profile test function needs a profile");
  }

  DiscreteTestFunction f;
  f.grid = hull.grid;
  double mass = 0.0;
  for (std::size_t i = 0; i < hull.cells.cells.size(); ++i) {
    const CellClass c = hull.cells.cells[i];
    if (c == CellClass::exterior) continue;
    const double d = hull.dist_to_boundary.cells[i];
    if (!(d < spec.eps)) continue;
    double raw = 1.0;
    if (spec.kind == TestFunctionSpec::Kind::radial_profile) raw = spec.profile(d / spec.eps) / spec.eps;
    if (raw == 0.0) continue;
    const double w = RasterHull::area_weight(c);
    f.support.push_back(i);
    f.value.push_back(raw);
    f.weight.push_back(w);
    mass += raw * w * h * h;
  }
  if (!(mass > 0)) return f;
  f.normalization = 1.0 / mass;
  for (auto& v : f.value) v *= f.normalization;
  return f;
}

double integrate_test_function(const OccupationField& field, const DiscreteTestFunction& f) {
  const auto nx = static_cast<std::size_t>(f.grid.nx);
  double sum = 0.0;
  for (std::size_t k = 0; k < f.support.size(); ++k) {
    const auto i = f.support[k];
    sum += f.value[k] * field.cell_time.at(static_cast<std::int64_t>(i % nx), static_cast<std::int64_t>(i / nx));
  }
  return sum;
}

double integrate_test_function(const OccupationField& field, const RasterHull& hull, const TestFunctionSpec& spec) {
  return integrate_test_function(field, discretize(spec, hull));
}

BandOccupation band_occupation(const OccupationField& field, const RasterHull& hull, double eps) {
  const Band band = boundary_band(hull, eps);
  BandOccupation out;
  out.band_area = band.area;
  field.cell_time.for_each_allocated([&](std::int64_t ix, std::int64_t iy, double v) {
    if (band.mask.at(ix, iy)) out.band_time += v;
  });
  out.estimate = out.band_area > 0 ? out.band_time / out.band_area : 0.0;
  return out;
}

namespace {

// Mean of log|X - Y| for X, Y independent uniform on the unit square.
const double kMeanLogDistanceUnitSquare = std::numbers::pi / 3.0 + std::numbers::ln2 / 3.0 - 25.0 / 12.0;

double log_kernel(double distance) { return std::max(1.0, -std::log(distance)); }

}  // namespace

AssumptionIntegral assumption_integral(const DiscreteTestFunction& f, double delta) {
  if (f.support.empty()) throw InvalidArgument("assumption_integral: test function has empty support");
  const double h = f.grid.h;
  const auto nx = static_cast<std::size_t>(f.grid.nx);
  const std::size_t n = f.support.size();

  std::vector<double> mass(n);
  std::vector<Point> center(n);
  for (std::size_t k = 0; k < n; ++k) {
    mass[k] = f.value[k] * f.weight[k] * h * h;
    const auto i = f.support[k];
    center[k] = f.grid.center(static_cast<std::int64_t>(i % nx), static_cast<std::int64_t>(i / nx));
  }

  AssumptionIntegral out;
  // Same-cell pairs: kernel at the mean log distance of two points in one cell.
  const double self_kernel = std::max(1.0, -(std::log(h) + kMeanLogDistanceUnitSquare));
  double diagonal = 0.0;
  for (const double m : mass) diagonal += self_kernel * m * m;
  out.full = diagonal;
  if (delta > 0) out.near_diagonal = diagonal;

  constexpr std::size_t kDirectLimit = 10000;
  if (n <= kDirectLimit) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double dist = std::abs(center[a] - center[b]);
        const double term = 2.0 * log_kernel(dist) * mass[a] * mass[b];
        out.full += term;
        if (dist < delta) out.near_diagonal += term;
      }
    }
    return out;
  }

  // Off-diagonal sum over a fixed-seed subsample; each unordered pair of distinct
  // subsampled cells stands for n(n-1)/(m(m-1)) pairs of the full support.
  out.subsampled = true;
  RngStream rng(0x5EEDA55ULL, n);
  std::vector<std::size_t> pick(n);
  for (std::size_t k = 0; k < n; ++k) pick[k] = k;
  const std::size_t m = kDirectLimit;
  for (std::size_t k = 0; k < m; ++k) {
    const auto j = k + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - k));
    std::swap(pick[k], pick[std::min(j, n - 1)]);
  }
  const double scale = (static_cast<double>(n) * static_cast<double>(n - 1)) /
                       (static_cast<double>(m) * static_cast<double>(m - 1));
  double full = 0.0;
  double near = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto pa = pick[a];
      const auto pb = pick[b];
      const double dist = std::abs(center[pa] - center[pb]);
      const double term = 2.0 * log_kernel(dist) * mass[pa] * mass[pb];
      full += term;
      if (dist < delta) near += term;
    }
  }
  out.full += scale * full;
  out.near_diagonal += scale * near;
  return out;
}

AssumptionIntegral assumption_integral(const TestFunctionSpec& spec, const RasterHull& hull, double delta) {
  return assumption_integral(discretize(spec, hull), delta);
}

std::vector<std::pair<double, double>> minkowski_estimate(const CellMask& visited, const CellMask& region,
                                                          const std::vector<double>& radii) {
  for (const double r : radii) {
    if (r < visited.grid.h) throw ResolutionError("Minkowski radius below the grid resolution");
  }
  std::vector<std::pair<double, double>> out;
  for (const double r : radii) {
    out.emplace_back(r, std::abs(std::log(r)) * enlargement_area(visited, region, r) / std::numbers::pi);
  }
  return out;
}

std::vector<std::pair<double, double>> minkowski_estimate(const CellMask& visited, const std::vector<double>& radii) {
  for (const double r : radii) {
    if (r < visited.grid.h) throw ResolutionError("Minkowski radius below the grid resolution");
  }
  std::vector<std::pair<double, double>> out;
  for (const double r : radii) {
    out.emplace_back(r, std::abs(std::log(r)) * enlargement_area(visited, r) / std::numbers::pi);
  }
  return out;
}

namespace {

// Minimum distance from c to the segment [a, b].
double segment_distance(Point a, Point b, Point c) {
  const Point ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(c - a);
  const double s = std::clamp(((c - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(a + s * ab - c);
}

}  // namespace

HittingEstimate green_hitting_estimate(Point x, Point y, double r, std::size_t n, double dt, RngStream& rng) {
  if (!(r > 0) || !(r < std::abs(x - y) / 4.0)) throw InvalidArgument("green_hitting: need 0 < r < |x - y| / 4");
  if (!(std::abs(x) < 1.0 - 2.0 * r) || !(std::abs(y) < 1.0 - 2.0 * r)) {
    throw InvalidArgument("green_hitting: x and y must lie farther than 2r inside the unit disc");
  }
  if (n == 0) throw InvalidArgument("green_hitting: need at least one path");
  if (!(dt > 0)) throw InvalidArgument("green_hitting: dt must be positive");

  constexpr double kappa = 0.3;
  constexpr double circle_floor = 1e-3;
  const double ball_floor = 0.05 * r;

  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    Point w = x;
    bool hit = false;
    for (;;) {
      const double d_circle = 1.0 - std::abs(w);
      const double d_ball = std::abs(w - y) - r;
      const double scale = std::min(std::max(d_circle, circle_floor), std::max(d_ball, ball_floor));
      const double var = std::min(dt, kappa * kappa * scale * scale);
      const double sd = std::sqrt(var);
      const double gx = rng.normal();
      const double gy = rng.normal();
      const Point next = w + Point(sd * gx, sd * gy);

      if (segment_distance(w, next, y) <= r) {
        hit = true;
        break;
      }
      const double d_circle_next = 1.0 - std::abs(next);
      if (d_circle_next <= 0.0) break;
      if (rng.uniform() < std::exp(-2.0 * d_circle * d_circle_next / var)) break;
      const double d_ball_next = std::abs(next - y) - r;
      // Tangent-line crossing only where the sphere is locally flat at the step scale.
      if (d_ball < r && rng.uniform() < std::exp(-2.0 * d_ball * d_ball_next / var)) {
        hit = true;
        break;
      }
      w = next;
    }
    if (hit) ++hits;
  }

  HittingEstimate out;
  out.n = n;
  out.hit_fraction = static_cast<double>(hits) / static_cast<double>(n);
  const double log_r = std::abs(std::log(r));
  out.value = log_r * out.hit_fraction;
  out.std_error = n > 1 ? log_r * std::sqrt(out.hit_fraction * (1.0 - out.hit_fraction) / static_cast<double>(n - 1)) : 0.0;
  return out;
}

}  // namespace bmgap
