#include "bmgap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bmgap {

namespace {

constexpr double kPi = std::numbers::pi;

void require_inside(const Domain& domain, Point z, const char* what) {
  if (!domain.contains(z)) throw InvalidArgument(std::string(what) + " is not inside the " + domain.name());
}

void require_boundary(const Domain& domain, Point z, const char* what) {
  if (!domain.on_boundary(z)) throw InvalidArgument(std::string(what) + " is not on the boundary of the " + domain.name());
}

StripSide strip_side(const Domain& domain, Point z) {
  return std::abs(z.imag()) <= std::abs(z.imag() - kPi * domain.strip_h) ? StripSide::bottom : StripSide::top;
}

}  // namespace

Domain Domain::strip(double h) {
  if (!(h > 0)) throw InvalidArgument("strip height parameter must be positive");
  return {Kind::strip, h};
}

bool Domain::contains(Point z) const {
  switch (kind) {
    case Kind::unit_disc: return std::abs(z) < 1.0;
    case Kind::upper_half_plane: return z.imag() > 0.0;
    case Kind::strip: return z.imag() > 0.0 && z.imag() < kPi * strip_h;
  }
  return false;
}

bool Domain::on_boundary(Point z, double tol) const {
  switch (kind) {
    case Kind::unit_disc: return std::abs(std::abs(z) - 1.0) <= tol;
    case Kind::upper_half_plane: return std::abs(z.imag()) <= tol;
    case Kind::strip: return std::abs(z.imag()) <= tol || std::abs(z.imag() - kPi * strip_h) <= tol;
  }
  return false;
}

std::string Domain::name() const {
  switch (kind) {
    case Kind::unit_disc: return "unit disc";
    case Kind::upper_half_plane: return "upper half-plane";
    case Kind::strip: return "strip";
  }
  return "domain";
}

double green(const Domain& domain, Point x, Point y) {
  require_inside(domain, x, "x");
  require_inside(domain, y, "y");
  if (x == y) throw SingularityError("Green's function is singular at x = y");
  switch (domain.kind) {
    case Domain::Kind::unit_disc: return std::log(std::abs(1.0 - x * std::conj(y)) / std::abs(x - y)) / kPi;
    case Domain::Kind::upper_half_plane: return std::log(std::abs(x - std::conj(y)) / std::abs(x - y)) / kPi;
    case Domain::Kind::strip: {
      const Point fx = std::exp(x / domain.strip_h);
      const Point fy = std::exp(y / domain.strip_h);
      return std::log(std::abs(fx - std::conj(fy)) / std::abs(fx - fy)) / kPi;
    }
  }
  return 0.0;
}

double strip_poisson(double h, Point x, double x0, StripSide side) {
  if (!(h > 0)) throw InvalidArgument("strip height parameter must be positive");
  if (!(x.imag() > 0.0 && x.imag() < kPi * h)) throw InvalidArgument("x is not inside the strip");
  const double c = std::cosh((x.real() - x0) / h);
  const double s = std::sin(x.imag() / h);
  const double k = std::cos(x.imag() / h);
  return s / (2.0 * kPi * h * (side == StripSide::bottom ? c - k : c + k));
}

double strip_boundary_poisson(double h, double x1, StripSide side1, double x2, StripSide side2) {
  if (!(h > 0)) throw InvalidArgument("strip height parameter must be positive");
  const double c = std::cosh((x1 - x2) / h);
  if (side1 == side2) {
    if (x1 == x2) throw SingularityError("boundary Poisson kernel is singular at z = w");
    return 1.0 / (2.0 * kPi * h * h * (c - 1.0));
  }
  return 1.0 / (2.0 * kPi * h * h * (c + 1.0));
}

double poisson(const Domain& domain, Point x, Point z) {
  require_inside(domain, x, "x");
  require_boundary(domain, z, "z");
  switch (domain.kind) {
    case Domain::Kind::unit_disc: return (1.0 - std::norm(x)) / (2.0 * kPi * std::norm(x - z));
    case Domain::Kind::upper_half_plane: return x.imag() / (kPi * std::norm(x - z));
    case Domain::Kind::strip: return strip_poisson(domain.strip_h, x, z.real(), strip_side(domain, z));
  }
  return 0.0;
}

double boundary_poisson(const Domain& domain, Point z, Point w) {
  require_boundary(domain, z, "z");
  require_boundary(domain, w, "w");
  switch (domain.kind) {
    case Domain::Kind::unit_disc:
      if (z == w) throw SingularityError("boundary Poisson kernel is singular at z = w");
      return 1.0 / (kPi * std::norm(z - w));
    case Domain::Kind::upper_half_plane: {
      if (z.real() == w.real()) throw SingularityError("boundary Poisson kernel is singular at z = w");
      const double d = z.real() - w.real();
      return 1.0 / (kPi * d * d);
    }
    case Domain::Kind::strip:
      return strip_boundary_poisson(domain.strip_h, z.real(), strip_side(domain, z), w.real(), strip_side(domain, w));
  }
  return 0.0;
}

MobiusMap MobiusMap::disc_automorphism(double theta, Point a) {
  if (!(std::abs(a) < 1.0)) throw InvalidArgument("disc automorphism needs |a| < 1");
  const Point rot = std::polar(1.0, theta);
  return {rot, -rot * a, -std::conj(a), Point(1.0, 0.0)};
}

MobiusMap MobiusMap::cayley() { return {Point(1, 0), Point(0, -1), Point(1, 0), Point(0, 1)}; }

MobiusMap MobiusMap::inverse_cayley() { return {Point(0, 1), Point(0, 1), Point(-1, 0), Point(1, 0)}; }

MobiusMap MobiusMap::half_plane_automorphism(double a, double b, double c, double d) {
  if (!(a * d - b * c > 0)) throw InvalidArgument("half-plane automorphism needs ad - bc > 0");
  return {Point(a, 0), Point(b, 0), Point(c, 0), Point(d, 0)};
}

namespace {

std::vector<Point> probe_points(const Domain& domain) {
  std::vector<Point> out;
  for (int k = 0; k < 16; ++k) {
    const double angle = 2.0 * kPi * (k + 0.37) / 16.0;
    const double radius = 0.05 + 0.9 * ((k * 7) % 16) / 16.0;
    switch (domain.kind) {
      case Domain::Kind::unit_disc: out.push_back(std::polar(radius, angle)); break;
      case Domain::Kind::upper_half_plane:
        out.push_back(Point(4.0 * std::cos(angle), 0.05 + 3.0 * radius));
        break;
      case Domain::Kind::strip:
        out.push_back(Point(4.0 * std::cos(angle), kPi * domain.strip_h * (0.02 + 0.96 * radius)));
        break;
    }
  }
  return out;
}

Point sample_interior(const Domain& domain, RngStream& rng) {
  switch (domain.kind) {
    case Domain::Kind::unit_disc: return std::polar(0.9 * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform());
    case Domain::Kind::upper_half_plane: return Point(rng.uniform(-2.0, 2.0), rng.uniform(0.1, 2.0));
    case Domain::Kind::strip:
      return Point(rng.uniform(-2.0, 2.0), kPi * domain.strip_h * rng.uniform(0.05, 0.95));
  }
  return {};
}

Point sample_boundary(const Domain& domain, RngStream& rng) {
  switch (domain.kind) {
    case Domain::Kind::unit_disc: return std::polar(1.0, 2.0 * kPi * rng.uniform());
    case Domain::Kind::upper_half_plane: return Point(rng.uniform(-2.0, 2.0), 0.0);
    case Domain::Kind::strip:
      return Point(rng.uniform(-2.0, 2.0), rng.uniform() < 0.5 ? 0.0 : kPi * domain.strip_h);
  }
  return {};
}

// Maps of circles to lines land boundary points only approximately on the real axis.
Point snap_to_boundary(const Domain& domain, Point z) {
  switch (domain.kind) {
    case Domain::Kind::unit_disc: return z / std::abs(z);
    case Domain::Kind::upper_half_plane: return Point(z.real(), 0.0);
    case Domain::Kind::strip: return z;
  }
  return z;
}

}  // namespace

bool MobiusMap::maps_into(const Domain& from, const Domain& to) const {
  if (std::abs(determinant()) == 0.0) return false;
  for (const Point z : probe_points(from)) {
    const Point w = (*this)(z);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    switch (to.kind) {
      case Domain::Kind::unit_disc:
        if (std::abs(w) >= 1.0 + 1e-12) return false;
        break;
      case Domain::Kind::upper_half_plane:
        if (w.imag() <= -1e-12) return false;
        break;
      case Domain::Kind::strip:
        if (w.imag() <= -1e-12 || w.imag() >= kPi * to.strip_h + 1e-12) return false;
        break;
    }
  }
  return true;
}

double CovarianceResidual::max() const { return std::max({green, poisson, boundary_poisson}); }

CovarianceResidual conformal_covariance_check(const MobiusMap& map, const Domain& from, const Domain& to,
                                              std::size_t n_pairs, RngStream& rng, double green_fault) {
  if (from.kind == Domain::Kind::strip || to.kind == Domain::Kind::strip) {
    throw InvalidArgument("covariance check supports the disc and the half-plane");
  }
  if (!map.maps_into(from, to)) throw InvalidArgument("map does not send the source domain into the target");

  // Keep images away from the pole so boundary values stay O(1).
  auto tame = [&](Point z) {
    const Point den = map.c * z + map.d;
    return std::abs(den) > 0.2 * std::max(std::abs(map.c), std::abs(map.d)) && std::abs(map(z)) < 20.0;
  };

  CovarianceResidual res;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    Point x;
    Point y;
    do {
      x = sample_interior(from, rng);
      y = sample_interior(from, rng);
    } while (std::abs(x - y) < 0.05 || !tame(x) || !tame(y));
    const double g_from = green(from, x, y);
    const double g_to = green(to, map(x), map(y)) + green_fault;
    res.green = std::max(res.green, std::abs(g_to - g_from));

    Point z;
    Point w;
    do {
      z = sample_boundary(from, rng);
      w = sample_boundary(from, rng);
    } while (std::abs(z - w) < 0.1 || !tame(z) || !tame(w));
    const Point fz = snap_to_boundary(to, map(z));
    const Point fw = snap_to_boundary(to, map(w));
    const double dz = std::abs(map.derivative(z));
    const double dw = std::abs(map.derivative(w));

    const double h_from = poisson(from, x, z);
    const double h_to = poisson(to, map(x), fz);
    res.poisson = std::max(res.poisson, std::abs(h_to - h_from / dz));

    const double hb_from = boundary_poisson(from, z, w);
    const double hb_to = boundary_poisson(to, fz, fw);
    res.boundary_poisson = std::max(res.boundary_poisson, std::abs(hb_to - hb_from / (dz * dw)));
  }
  return res;
}

SlitHullMap SlitHullMap::tilted_segment(double delta) {
  if (!(delta >= 0)) throw InvalidArgument("segment height must be nonnegative");
  return {Kind::tilted_segment, -1.0, delta};
}

SlitHullMap SlitHullMap::vertical_slit(double x0, double height) {
  if (!(height >= 0)) throw InvalidArgument("slit height must be nonnegative");
  return {Kind::vertical_slit, x0, height};
}

bool SlitHullMap::in_hull(Point z) const {
  return height > 0 && z.real() == x0 && z.imag() > 0 && z.imag() <= height;
}

double SlitHullMap::distance_to_hull(Point z) const {
  if (z.imag() <= height) return std::abs(z.real() - x0);
  return std::abs(z - Point(x0, height));
}

Point upper_sqrt(Point w) {
  Point s = std::sqrt(w);
  if (s.imag() < 0.0) s = -s;
  return s;
}

Point SlitHullMap::operator()(Point z) const {
  if (!(z.imag() > 0)) throw InvalidArgument("slit map is defined on the open upper half-plane");
  if (in_hull(z)) throw InvalidArgument("point lies on the slit");
  const Point u = z - x0;
  return x0 + upper_sqrt(u * u + height * height);
}

std::string SlitHullMap::name() const {
  return kind == Kind::tilted_segment ? "tilted_segment" : "vertical_slit";
}

ImaginaryIdentityResult imaginary_identity_check(const SlitHullMap& map, Point z, std::size_t n, double dt,
                                                 RngStream& rng) {
  if (!(z.imag() > 0) || map.in_hull(z)) throw InvalidArgument("start point must lie in H minus the hull");
  if (n < 2) throw InvalidArgument("imaginary_identity_check needs at least two paths");
  if (!(dt > 0)) throw InvalidArgument("dt must be positive");

  constexpr double kappa = 0.1;
  const double floor_scale = 1e-3 * std::max(map.height, 1e-3);
  const double kill_radius = 1e4 * std::max(1.0, std::abs(z));
  const double x0 = map.x0;
  const double top = map.height;

  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Point w = z;
    double exit_height = 0.0;
    for (;;) {
      if (std::abs(w) > kill_radius) break;
      const double scale = std::max(map.distance_to_hull(w), floor_scale);
      const double var = std::min(dt, kappa * kappa * scale * scale);
      const double sd = std::sqrt(var);
      const double gx = rng.normal();
      const double gy = rng.normal();
      const Point next = w + Point(sd * gx, sd * gy);

      const double s1 = w.real() - x0;
      const double s2 = next.real() - x0;
      if (top > 0 && s1 * s2 <= 0.0 && s1 != s2) {
        const double y = w.imag() + (next.imag() - w.imag()) * (s1 / (s1 - s2));
        if (y > 0.0 && y <= top) {
          exit_height = y;
          break;
        }
      }
      if (next.imag() <= 0.0) break;
      if (rng.uniform() < std::exp(-2.0 * w.imag() * next.imag() / var)) break;
      if (top > 0) {
        const double a1 = std::abs(s1);
        const double a2 = std::abs(s2);
        if (rng.uniform() < std::exp(-2.0 * a1 * a2 / var)) {
          const double y = a1 + a2 > 0 ? w.imag() + (next.imag() - w.imag()) * a1 / (a1 + a2) : w.imag();
          if (y > 0.0 && y <= top) {
            exit_height = y;
            break;
          }
        }
      }
      w = next;
    }
    sum += exit_height;
    sum2 += exit_height * exit_height;
  }

  ImaginaryIdentityResult out;
  out.n = n;
  const double nn = static_cast<double>(n);
  out.mean_exit_height = sum / nn;
  const double var = std::max(0.0, (sum2 - nn * out.mean_exit_height * out.mean_exit_height) / (nn - 1.0));
  out.std_error = std::sqrt(var / nn);
  out.analytic = z.imag() - map(z).imag();
  out.residual = out.analytic - out.mean_exit_height;
  return out;
}

std::vector<Point> scaling_probe_set(double eps) {
  constexpr double kOut = 1e-9;
  std::vector<Point> probes;
  const double left = -1.0 - eps - kOut;
  const double right = 2.0 * eps + kOut;
  const double ceiling = 2.0 * eps + kOut;
  for (int k = 0; k <= 400; ++k) {
    probes.emplace_back(-1.5 - eps + (2.0 + 3.0 * eps) * k / 400.0, ceiling);
  }
  for (int k = 0; k <= 60; ++k) {
    const double y = 2.0 * eps * std::pow(1e-6, 1.0 - k / 60.0);
    probes.emplace_back(left, y);
    probes.emplace_back(right, y);
  }
  for (int k = 0; k <= 100; ++k) {
    const double y = 1e-6 * eps;
    probes.emplace_back(-3.0 + (2.0 - eps) * k / 100.0 - eps - kOut, y);
    probes.emplace_back(right + 2.0 * k / 100.0, y);
  }
  for (const double radius : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    for (int k = 1; k < 64; ++k) probes.push_back(std::polar(radius, kPi * k / 64.0) + Point(-0.5, 0.0));
  }
  std::vector<Point> outside;
  for (const Point p : probes) {
    const bool in_r2 = p.real() >= -1.0 - eps && p.real() <= 2.0 * eps && p.imag() <= 2.0 * eps;
    if (!in_r2 && p.imag() > 0) outside.push_back(p);
  }
  return outside;
}

std::vector<ScalingRow> hull_map_scaling_check(const std::vector<double>& eps_list) {
  std::vector<ScalingRow> rows;
  for (const double eps : eps_list) {
    if (!(eps > 0) || eps > 0.1) throw InvalidArgument("hull_map_scaling_check needs 0 < eps <= 1/10");
    ScalingRow row;
    row.eps = eps;
    const auto probes = scaling_probe_set(eps);
    for (const double x0 : {-1.0, -0.5, 0.0, eps}) {
      const auto map = SlitHullMap::vertical_slit(x0, eps);
      for (const Point z : probes) {
        const double disp = std::abs(map(z) - z);
        if (disp > row.sup_displacement) {
          row.sup_displacement = disp;
          row.worst_slit_x0 = x0;
          row.worst_probe = z;
        }
      }
    }
    row.ratio = row.sup_displacement / (eps * std::abs(std::log(eps)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bmgap
