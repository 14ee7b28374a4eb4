#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bmgap/grid.hpp"
#include "bmgap/hull.hpp"
#include "bmgap/path.hpp"
#include "bmgap/rng.hpp"

namespace bmgap {

/// Time the path spends in each cell.
struct OccupationField {
  TiledField cell_time;
  double duration = 0.0;

  const GridSpec& grid() const { return cell_time.grid(); }
  double total() const;
};

/// Apportions each step's duration to the cells it crosses in proportion to the
/// length of the step inside each cell (constant speed along the step).
OccupationField occupation_grid(const Path& path, const GridSpec& grid);

/// Boundary-band test function f_eps, discretized on a hull's grid.
struct TestFunctionSpec {
  enum class Kind { uniform_band, radial_profile };
  Kind kind = Kind::uniform_band;
  /// Band width; +infinity selects the whole interior (diagnostic).
  double eps = 0.0;
  /// Shape on [0, 1] evaluated at d(x, boundary)/eps for radial_profile.
  std::function<double(double)> profile;
  std::string profile_name;

  static TestFunctionSpec uniform(double eps);
  static TestFunctionSpec whole_interior();
  /// Smooth bump sin^2(pi s) on [0, 1].
  static TestFunctionSpec sine_bump(double eps);
};

/// Values of f_eps on the cells of a hull, normalized so that sum f * weight * h^2 = 1.
struct DiscreteTestFunction {
  GridSpec grid;
  std::vector<std::size_t> support;  // linear cell indices, increasing
  std::vector<double> value;         // f at each support cell
  std::vector<double> weight;        // area weight of each support cell
  double normalization = 0.0;        // constant the raw profile was multiplied by
};

/// Throws BandTooThin when a finite eps is below 4h.
DiscreteTestFunction discretize(const TestFunctionSpec& spec, const RasterHull& hull);

/// sum over cells of f_eps(cell) * cell_time.
double integrate_test_function(const OccupationField& field, const RasterHull& hull, const TestFunctionSpec& spec);
double integrate_test_function(const OccupationField& field, const DiscreteTestFunction& f);

struct BandOccupation {
  double band_area = 0.0;
  double band_time = 0.0;
  double estimate = 0.0;  // band_time / band_area
};

/// Time spent in the eps-band and its area; the uniform-band test function integral.
BandOccupation band_occupation(const OccupationField& field, const RasterHull& hull, double eps);

struct AssumptionIntegral {
  double full = 0.0;
  double near_diagonal = 0.0;
  bool subsampled = false;
};

/// Double sum of max(1, -log|x - y|) f(x) f(y) dx dy over support cell pairs, and the same
/// restricted to |x - y| < delta. Same-cell pairs use the mean log distance inside a cell.
/// Above 10^4 support cells the off-diagonal part is estimated from a fixed-seed subsample.
AssumptionIntegral assumption_integral(const TestFunctionSpec& spec, const RasterHull& hull, double delta);
AssumptionIntegral assumption_integral(const DiscreteTestFunction& f, double delta);

/// (r, (1/pi) |log r| |A cap K^r|) for each r.
std::vector<std::pair<double, double>> minkowski_estimate(const CellMask& visited, const CellMask& region,
                                                          const std::vector<double>& radii);
std::vector<std::pair<double, double>> minkowski_estimate(const CellMask& visited, const std::vector<double>& radii);

struct HittingEstimate {
  double value = 0.0;   // |log r| * hit fraction
  double std_error = 0.0;
  double hit_fraction = 0.0;
  std::size_t n = 0;
};

/// |log r| times the fraction of n Brownian motions from x that reach B(y, r) before
/// leaving the unit disc; estimates pi * G_disc(x, y).
///
/// Steps are adaptive: variance min(dt, (kappa d)^2) where d is the distance to the
/// nearer of the two targets. Crossings between steps are detected with the exact
/// half-plane bridge probability exp(-2 d1 d2 / step) for the tangent line at the
/// nearest boundary point (circle or ball).
HittingEstimate green_hitting_estimate(Point x, Point y, double r, std::size_t n, double dt, RngStream& rng);

}  // namespace bmgap
