#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bmgap/errors.hpp"
#include "bmgap/rng.hpp"

namespace bmgap {

/// Unit disc, upper half-plane, or the horizontal strip R + i(0, pi h).
struct Domain {
  enum class Kind { unit_disc, upper_half_plane, strip };
  Kind kind = Kind::unit_disc;
  double strip_h = 1.0;

  static Domain disc() { return {Kind::unit_disc, 1.0}; }
  static Domain half_plane() { return {Kind::upper_half_plane, 1.0}; }
  static Domain strip(double h);

  bool contains(Point z) const;
  /// Within `tol` of the boundary (the strip counts both edges).
  bool on_boundary(Point z, double tol = 1e-9) const;
  std::string name() const;
};

enum class StripSide { bottom, top };

/// Green's function normalized so that G_disc(x, y) = (1/pi) log(|1 - x conj(y)| / |x - y|).
/// The strip value is pulled back from the half-plane through z -> exp(z / h).
double green(const Domain& domain, Point x, Point y);

/// Poisson kernel H_D(x, z): density of harmonic measure from x at boundary point z.
double poisson(const Domain& domain, Point x, Point z);

/// Boundary Poisson kernel H_D(z, w) for distinct boundary points.
double boundary_poisson(const Domain& domain, Point z, Point w);

/// Strip Poisson kernel towards x0 on the bottom edge or x0 + i pi h on the top edge.
double strip_poisson(double h, Point x, double x0, StripSide side);

/// Strip boundary Poisson kernel between x1 and x2 on the given edges.
double strip_boundary_poisson(double h, double x1, StripSide side1, double x2, StripSide side2);

/// z -> (a z + b) / (c z + d).
struct MobiusMap {
  Point a{1.0, 0.0};
  Point b{0.0, 0.0};
  Point c{0.0, 0.0};
  Point d{1.0, 0.0};

  static MobiusMap identity() { return {}; }
  /// e^{i theta} (z - a) / (1 - conj(a) z), |a| < 1.
  static MobiusMap disc_automorphism(double theta, Point a);
  /// (z - i) / (z + i): half-plane onto disc.
  static MobiusMap cayley();
  /// i (1 + z) / (1 - z): disc onto half-plane.
  static MobiusMap inverse_cayley();
  /// Real coefficients with ad - bc > 0.
  static MobiusMap half_plane_automorphism(double a, double b, double c, double d);

  Point determinant() const { return a * d - b * c; }
  Point operator()(Point z) const { return (a * z + b) / (c * z + d); }
  Point derivative(Point z) const {
    const Point den = c * z + d;
    return determinant() / (den * den);
  }
  /// True iff the 16 fixed probe points of `from` land in `to` (within 1e-12).
  bool maps_into(const Domain& from, const Domain& to) const;
};

struct CovarianceResidual {
  double green = 0.0;
  double poisson = 0.0;
  double boundary_poisson = 0.0;
  double max() const;
};

/// Largest residuals of G_{D'}(f x, f y) = G_D(x, y), H_{D'}(f x, f z) = |f'(z)|^{-1} H_D(x, z)
/// and H_{D'}(f z, f w) = |f'(z)|^{-1} |f'(w)|^{-1} H_D(z, w) over n_pairs random points.
/// `green_fault` is added to every G_{D'} evaluation (used to check the check).
CovarianceResidual conformal_covariance_check(const MobiusMap& map, const Domain& from, const Domain& to,
                                              std::size_t n_pairs, RngStream& rng, double green_fault = 0.0);

/// Hydrodynamically normalized map removing a vertical slit [x0, x0 + i height] from H:
/// g(z) = x0 + sqrt((z - x0)^2 + height^2), branch with Im g > 0.
///
/// tilted_segment(delta) is the slit [-1, -1 + i delta], g(z) = sqrt((z + 1)^2 + delta^2) - 1.
struct SlitHullMap {
  enum class Kind { tilted_segment, vertical_slit };
  Kind kind = Kind::vertical_slit;
  double x0 = 0.0;
  double height = 1.0;

  static SlitHullMap tilted_segment(double delta);
  static SlitHullMap vertical_slit(double x0, double height);

  /// True for points of the slit itself (closed at the tip).
  bool in_hull(Point z) const;
  double distance_to_hull(Point z) const;
  /// Throws InvalidArgument for points on the slit or outside the open half-plane.
  Point operator()(Point z) const;
  std::string name() const;
};

/// Principal branch adjusted to Im >= 0; the branch of the slit maps.
Point upper_sqrt(Point w);

struct ImaginaryIdentityResult {
  double mean_exit_height = 0.0;  // estimate of E_z[Im B_tau]
  double std_error = 0.0;
  double analytic = 0.0;  // Im z - Im g(z)
  double residual = 0.0;  // Im z - Im g(z) - E_z[Im B_tau]
  std::size_t n = 0;
};

/// Monte Carlo check of Im z - Im g_A(z) = E_z[Im B_tau], tau the hitting time of R cup A.
/// Steps have variance min(dt, (kappa d)^2), d the distance to the slit (floored at
/// 1e-3 * height); crossings of the real line and of the slit's supporting line between
/// steps are sampled with the half-plane bridge probability exp(-2 d1 d2 / step).
ImaginaryIdentityResult imaginary_identity_check(const SlitHullMap& map, Point z, std::size_t n, double dt,
                                                 RngStream& rng);

/// Probe points just outside R2 = [-1 - eps, 2 eps] x [0, 2 eps] plus a far field up to |z| = 10.
std::vector<Point> scaling_probe_set(double eps);

struct ScalingRow {
  double eps = 0.0;
  double sup_displacement = 0.0;  // sup |g(z) - z| over hulls and probes
  double ratio = 0.0;             // sup_displacement / (eps |log eps|)
  double worst_slit_x0 = 0.0;
  Point worst_probe{0.0, 0.0};
};

/// For each eps, vertical slits of height eps at positions in [-1, eps] (inside R1),
/// sup over probes outside R2 of |g(z) - z| / (eps |log eps|). Throws for eps > 1/10.
std::vector<ScalingRow> hull_map_scaling_check(const std::vector<double>& eps_list);

}  // namespace bmgap
