#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "bmgap/kernels.hpp"

using namespace bmgap;

namespace {

constexpr double kPi = std::numbers::pi;
const Point I(0.0, 1.0);

}  // namespace

TEST_CASE("Green's function closed forms") {
  CHECK(green(Domain::disc(), 0.0, 0.5) == doctest::Approx(std::log(2.0) / kPi).epsilon(1e-14));
  CHECK(green(Domain::half_plane(), I, 2.0 * I) == doctest::Approx(std::log(3.0) / kPi).epsilon(1e-14));

  // Strip of height pi: G = (1/pi) log |(e^x - conj(e^y)) / (e^x - e^y)|.
  const Point x(0.2, 1.0);
  const Point y(-0.7, 2.5);
  const double oracle = std::log(std::abs((std::exp(x) - std::conj(std::exp(y))) / (std::exp(x) - std::exp(y)))) / kPi;
  CHECK(green(Domain::strip(1.0), x, y) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("Green's function is symmetric and positive") {
  RngStream rng(41, 0);
  for (int k = 0; k < 200; ++k) {
    const Point x = std::polar(std::sqrt(rng.uniform()) * 0.99, 2 * kPi * rng.uniform());
    const Point y = std::polar(std::sqrt(rng.uniform()) * 0.99, 2 * kPi * rng.uniform());
    const double a = green(Domain::disc(), x, y);
    CHECK(a > 0.0);
    CHECK(std::abs(a - green(Domain::disc(), y, x)) <= 1e-12 * std::max(1.0, a));
    const Point u(rng.normal(), 0.01 + rng.uniform() * 3.0);
    const Point v(rng.normal(), 0.01 + rng.uniform() * 3.0);
    const double b = green(Domain::half_plane(), u, v);
    CHECK(b > 0.0);
    CHECK(std::abs(b - green(Domain::half_plane(), v, u)) <= 1e-12 * std::max(1.0, b));
  }
}

TEST_CASE("kernel argument errors") {
  CHECK_THROWS_AS(green(Domain::disc(), 0.5, 0.5), SingularityError);
  CHECK_THROWS_AS(green(Domain::disc(), 0.0, 1.5), InvalidArgument);
  CHECK_THROWS_AS(green(Domain::half_plane(), I, Point(0.0, -1.0)), InvalidArgument);
  CHECK_THROWS_AS(poisson(Domain::disc(), 0.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(boundary_poisson(Domain::half_plane(), 1.0, 1.0), SingularityError);
  CHECK_THROWS_AS(Domain::strip(0.0), InvalidArgument);
  CHECK_THROWS_AS(strip_poisson(1.0, Point(0.0, 4.0), 0.0, StripSide::bottom), InvalidArgument);
  CHECK_THROWS_AS(MobiusMap::disc_automorphism(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(MobiusMap::half_plane_automorphism(1.0, 0.0, 0.0, -1.0), InvalidArgument);
}

TEST_CASE("Poisson kernel closed forms") {
  CHECK(poisson(Domain::disc(), 0.0, std::polar(1.0, 0.7)) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
  CHECK(poisson(Domain::half_plane(), I, 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(poisson(Domain::half_plane(), Point(1.0, 2.0), 3.0) == doctest::Approx(2.0 / (kPi * 8.0)).epsilon(1e-14));
}

TEST_CASE("boundary Poisson kernel is the normal derivative of the Poisson kernel") {
  const double h = 1e-6;
  const Point z = std::polar(1.0, 0.3);
  const Point w = std::polar(1.0, 2.1);
  const double disc_oracle = poisson(Domain::disc(), z * (1.0 - h), w) / h;
  CHECK(boundary_poisson(Domain::disc(), z, w) == doctest::Approx(disc_oracle).epsilon(1e-5));
  const double plane_oracle = poisson(Domain::half_plane(), Point(0.4, h), -1.1) / h;
  CHECK(boundary_poisson(Domain::half_plane(), 0.4, -1.1) == doctest::Approx(plane_oracle).epsilon(1e-5));
  CHECK(boundary_poisson(Domain::half_plane(), 0.4, -1.1) == boundary_poisson(Domain::half_plane(), -1.1, 0.4));
}

TEST_CASE("strip Poisson kernel has unit mass over both edges") {
  const double h = 0.8;
  const Point x(0.3, 0.7);
  double mass = 0.0;
  const double step = 1e-3;
  for (double s = -60.0; s <= 60.0; s += step) {
    mass += step * (strip_poisson(h, x, s, StripSide::bottom) + strip_poisson(h, x, s, StripSide::top));
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  // Mirror symmetry across the centre line swaps the edges.
  const Point mirrored(0.3, kPi * h - 0.7);
  CHECK(strip_poisson(h, x, 1.2, StripSide::bottom) ==
        doctest::Approx(strip_poisson(h, mirrored, 1.2, StripSide::top)).epsilon(1e-12));
}

TEST_CASE("Moebius maps") {
  const auto c = MobiusMap::cayley();
  CHECK(std::abs(c(I)) <= 1e-15);
  CHECK(c.maps_into(Domain::half_plane(), Domain::disc()));
  CHECK(!c.maps_into(Domain::disc(), Domain::disc()));
  const auto ci = MobiusMap::inverse_cayley();
  CHECK(std::abs(ci(0.0) - I) <= 1e-15);
  CHECK(ci.maps_into(Domain::disc(), Domain::half_plane()));
  for (const Point z : {Point(0.3, 0.2), Point(-2.0, 0.1), Point(5.0, 7.0)}) CHECK(std::abs(ci(c(z)) - z) <= 1e-12 * std::abs(z));
  const auto m = MobiusMap::disc_automorphism(0.4, Point(0.3, -0.2));
  CHECK(std::abs(m(Point(0.3, -0.2))) <= 1e-15);
  CHECK(m.maps_into(Domain::disc(), Domain::disc()));
  // Derivative against a centred difference.
  const Point z(0.1, 0.2);
  const double d = 1e-6;
  CHECK(std::abs(m.derivative(z) - (m(z + d) - m(z - d)) / (2.0 * d)) <= 1e-8);
}

TEST_CASE("conformal covariance holds and detects a faulty kernel") {
  RngStream rng(42, 0);
  const auto m = MobiusMap::disc_automorphism(1.1, Point(-0.5, 0.3));
  CHECK(conformal_covariance_check(m, Domain::disc(), Domain::disc(), 200, rng).max() <= 1e-10);
  CHECK(conformal_covariance_check(MobiusMap::cayley(), Domain::half_plane(), Domain::disc(), 200, rng).max() <= 1e-10);
  const auto faulty = conformal_covariance_check(m, Domain::disc(), Domain::disc(), 50, rng, 1e-6);
  CHECK(faulty.green >= 1e-7);
  CHECK_THROWS_AS(conformal_covariance_check(MobiusMap::cayley(), Domain::disc(), Domain::disc(), 10, rng),
                  InvalidArgument);
}

TEST_CASE("slit maps") {
  const auto slit = SlitHullMap::vertical_slit(0.0, 1.0);
  const Point g = slit(2.0 * I);
  CHECK(std::abs(g - Point(0.0, std::sqrt(3.0))) <= 1e-14);

  const auto empty = SlitHullMap::tilted_segment(0.0);
  for (const Point z : {Point(0.5, 0.5), Point(-3.0, 0.01), Point(10.0, 2.0)}) CHECK(std::abs(empty(z) - z) <= 1e-13 * std::abs(z));

  // Near the tip the image approaches the real point x0.
  const auto tall = SlitHullMap::vertical_slit(0.7, 2.0);
  CHECK(std::abs(tall(Point(0.7 + 1e-9, 2.0 + 1e-9)) - 0.7) <= 1e-4);
  CHECK(tall.in_hull(Point(0.7, 1.0)));
  CHECK(tall.in_hull(Point(0.7, 2.0)));
  CHECK(!tall.in_hull(Point(0.7, 2.001)));
  CHECK_THROWS_AS(tall(Point(0.7, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(tall(Point(0.3, -1.0)), InvalidArgument);

  // Hydrodynamic normalization: g(z) - z -> 0 at infinity.
  CHECK(std::abs(tall(Point(1e4, 1e4)) - Point(1e4, 1e4)) <= 1e-3);

  RngStream rng(43, 0);
  for (int k = 0; k < 200; ++k) {
    const Point z(rng.normal() * 3.0, 0.01 + rng.uniform() * 3.0);
    if (tall.in_hull(z)) continue;
    CHECK(tall(z).imag() > 0.0);
    CHECK(tall(z).imag() <= z.imag() + 1e-12);
  }
}

TEST_CASE("principal square root on the upper branch") {
  CHECK(std::abs(upper_sqrt(-4.0) - Point(0.0, 2.0)) <= 1e-15);
  CHECK(upper_sqrt(Point(-1.0, -1e-12)).imag() > 0.0);
  const Point w(0.3, -2.0);
  CHECK(std::abs(upper_sqrt(w) * upper_sqrt(w) - w) <= 1e-14);
}

TEST_CASE("imaginary part identity by Monte Carlo") {
  RngStream rng(44, 0);
  const auto slit = SlitHullMap::vertical_slit(0.0, 1.0);
  const auto r = imaginary_identity_check(slit, Point(0.5, 1.0), 20000, 1e300, rng);
  CHECK(r.n == 20000);
  CHECK(r.analytic == doctest::Approx(1.0 - slit(Point(0.5, 1.0)).imag()).epsilon(1e-14));
  CHECK(std::abs(r.residual) <= 4.0 * r.std_error);

  const auto empty = imaginary_identity_check(SlitHullMap::tilted_segment(0.0), Point(0.2, 0.8), 2000, 1e300, rng);
  CHECK(empty.analytic == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(empty.residual) <= 4.0 * empty.std_error + 1e-12);

  CHECK_THROWS_AS(imaginary_identity_check(slit, Point(0.0, 0.5), 10, 1.0, rng), InvalidArgument);
  CHECK_THROWS_AS(imaginary_identity_check(slit, Point(1.0, 1.0), 1, 1.0, rng), InvalidArgument);
}

TEST_CASE("hull map displacement scales like eps log eps") {
  const auto rows = hull_map_scaling_check({0.1, 0.05, 0.02, 0.01});
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.ratio > 0.0);
    CHECK(row.ratio <= 2.0 * rows.front().ratio);
    CHECK(row.sup_displacement == doctest::Approx(row.ratio * row.eps * std::abs(std::log(row.eps))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hull_map_scaling_check({0.2}), InvalidArgument);

  for (const double eps : {0.1, 0.01}) {
    for (const Point z : scaling_probe_set(eps)) {
      CHECK(z.imag() >= 0.0);
      const bool inside_r2 = z.real() > -1.0 - eps && z.real() < 2.0 * eps && z.imag() < 2.0 * eps;
      CHECK(!inside_r2);
    }
  }
}
