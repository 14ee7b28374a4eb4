#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bmgap/experiments.hpp"
#include "bmgap/kernels.hpp"

namespace bmgap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &error);
}

KernelCheck make(std::string name, std::size_t n, double residual, double tolerance) {
  return {std::move(name), n, residual, tolerance, std::isfinite(residual) && residual <= tolerance};
}

Point random_disc_point(RngStream& rng, double radius) {
  return std::polar(radius * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform());
}

Point random_half_plane_point(RngStream& rng) { return Point(rng.uniform(-3.0, 3.0), rng.uniform(0.05, 3.0)); }

Point random_strip_point(RngStream& rng, double h) {
  return Point(rng.uniform(-3.0, 3.0), kPi * h * rng.uniform(0.02, 0.98));
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

KernelCheck green_symmetry(const Domain& domain, const std::string& name, RngStream rng) {
  constexpr std::size_t n = 1000;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Point x;
    Point y;
    do {
      switch (domain.kind) {
        case Domain::Kind::unit_disc:
          x = random_disc_point(rng, 0.99);
          y = random_disc_point(rng, 0.99);
          break;
        case Domain::Kind::upper_half_plane:
          x = random_half_plane_point(rng);
          y = random_half_plane_point(rng);
          break;
        case Domain::Kind::strip:
          x = random_strip_point(rng, domain.strip_h);
          y = random_strip_point(rng, domain.strip_h);
          break;
      }
    } while (x == y);
    const double gxy = green(domain, x, y);
    const double gyx = green(domain, y, x);
    if (!(gxy > 0) || !(gyx > 0)) return make(name, n, kInf, 1e-12);
    worst = std::max(worst, relative_gap(gxy, gyx));
  }
  return make(name, n, worst, 1e-12);
}

KernelCheck covariance(const std::string& name, const std::vector<MobiusMap>& maps, const Domain& from,
                       const Domain& to, double fault, RngStream rng) {
  constexpr std::size_t pairs = 100;
  double worst = 0.0;
  for (const auto& map : maps) {
    worst = std::max(worst, conformal_covariance_check(map, from, to, pairs, rng, fault).max());
  }
  return make(name, pairs * maps.size(), worst, 1e-10);
}

KernelCheck identity_check(const std::string& name, const SlitHullMap& map, Point z, std::size_t n, RngStream rng) {
  const auto r = imaginary_identity_check(map, z, n, 1e300, rng);
  return {name, n, std::abs(r.residual), 3.0 * r.std_error, std::abs(r.residual) <= 3.0 * r.std_error};
}

}  // namespace

std::vector<KernelCheck> kernel_checks(const KernelSuiteOptions& options) {
  const RngStream root(options.seed, 0x6B65726E656CULL);
  std::uint64_t stream = 0;
  auto next_rng = [&] { return root.derive(stream++); };
  std::vector<KernelCheck> out;

  const Domain disc = Domain::disc();
  const Domain half = Domain::half_plane();
  const Domain strip = Domain::strip(0.7);

  out.push_back(green_symmetry(disc, "green_symmetry_disc", next_rng()));
  out.push_back(green_symmetry(half, "green_symmetry_half_plane", next_rng()));
  out.push_back(green_symmetry(strip, "green_symmetry_strip", next_rng()));

  out.push_back(make("green_closed_form", 2,
                     std::max(std::abs(green(disc, 0.0, 0.5) - std::log(2.0) / kPi),
                              std::abs(green(half, Point(0, 1), Point(0, 2)) - std::log(3.0) / kPi)),
                     1e-14));

  {
    double worst = std::abs(poisson(half, Point(0, 1), 0.0) - 1.0 / kPi);
    RngStream rng = next_rng();
    for (int k = 0; k < 10; ++k) {
      worst = std::max(worst, std::abs(poisson(disc, 0.0, std::polar(1.0, 2.0 * kPi * rng.uniform())) - 0.5 / kPi));
    }
    out.push_back(make("poisson_closed_form", 11, worst, 1e-14));
  }

  {
    RngStream rng = next_rng();
    double worst = 0.0;
    constexpr std::size_t n = 20;
    for (std::size_t k = 0; k < n; ++k) {
      const Point x = random_disc_point(rng, 0.95);
      const double phase = std::arg(x);
      auto f = [&](double theta) { return poisson(disc, x, std::polar(1.0, theta)); };
      const double total = integrate(f, phase, phase + kPi) + integrate(f, phase + kPi, phase + 2.0 * kPi);
      worst = std::max(worst, std::abs(total - 1.0));
    }
    out.push_back(make("poisson_normalization_disc", n, worst, 1e-8));
  }

  {
    RngStream rng = next_rng();
    double worst = 0.0;
    constexpr std::size_t n = 20;
    for (std::size_t k = 0; k < n; ++k) {
      const Point x = random_half_plane_point(rng);
      auto f = [&](double t) { return poisson(half, x, Point(t, 0.0)); };
      const double total = integrate(f, -kInf, x.real()) + integrate(f, x.real(), kInf);
      worst = std::max(worst, std::abs(total - 1.0));
    }
    out.push_back(make("poisson_normalization_half_plane", n, worst, 1e-8));
  }

  {
    RngStream rng = next_rng();
    double worst_bottom = 0.0;
    double worst_total = 0.0;
    constexpr std::size_t n = 20;
    for (std::size_t k = 0; k < n; ++k) {
      const double h = rng.uniform(0.5, 2.0);
      const Point x = random_strip_point(rng, h);
      // Kernels decay like exp(-|x0 - Re x| / h); 60 h on each side leaves < 1e-26.
      auto integral = [&](StripSide side) {
        auto f = [&](double s) { return h * strip_poisson(h, x, x.real() + h * s, side); };
        return integrate(f, -60.0, 0.0) + integrate(f, 0.0, 60.0);
      };
      const double bottom = integral(StripSide::bottom);
      const double top = integral(StripSide::top);
      worst_bottom = std::max(worst_bottom, std::abs(bottom - (1.0 - x.imag() / (kPi * h))));
      worst_total = std::max(worst_total, std::abs(bottom + top - 1.0));
    }
    out.push_back(make("strip_poisson_integral", n, worst_bottom, 1e-8));
    out.push_back(make("strip_poisson_total_mass", n, worst_total, 1e-8));
  }

  {
    RngStream rng = next_rng();
    double worst = 0.0;
    constexpr std::size_t n = 100;
    for (std::size_t k = 0; k < n; ++k) {
      const double h = rng.uniform(0.5, 2.0);
      const Point x = random_strip_point(rng, h);
      const Point mirrored(x.real(), kPi * h - x.imag());
      const double x0 = rng.uniform(-3.0, 3.0);
      worst = std::max(worst, relative_gap(strip_poisson(h, x, x0, StripSide::bottom),
                                           strip_poisson(h, mirrored, x0, StripSide::top)));
      const Point mid(x.real(), 0.5 * kPi * h);
      worst = std::max(worst, relative_gap(strip_poisson(h, mid, x0, StripSide::bottom),
                                           strip_poisson(h, mid, x0, StripSide::top)));
    }
    out.push_back(make("strip_poisson_mirror", n, worst, 1e-12));
  }

  {
    const double h = 0.8;
    double worst = std::abs(boundary_poisson(disc, 1.0, -1.0) - 0.25 / kPi);
    worst = std::max(worst, std::abs(boundary_poisson(half, 0.0, 1.0) - 1.0 / kPi));
    worst = std::max(worst, std::abs(strip_boundary_poisson(h, h, StripSide::bottom, 0.0, StripSide::bottom) -
                                     1.0 / (2.0 * kPi * h * h * (std::cosh(1.0) - 1.0))));
    out.push_back(make("boundary_poisson_closed_form", 3, worst, 1e-14));
  }

  {
    RngStream rng = next_rng();
    double worst = 0.0;
    constexpr std::size_t n = 100;
    for (std::size_t k = 0; k < n; ++k) {
      const Point z = std::polar(1.0, 2.0 * kPi * rng.uniform());
      const Point w = std::polar(1.0, 2.0 * kPi * rng.uniform());
      worst = std::max(worst, relative_gap(boundary_poisson(disc, z, w), boundary_poisson(disc, w, z)));
      const Point a(rng.uniform(-3.0, 3.0), 0.0);
      const Point b(rng.uniform(-3.0, 3.0), 0.0);
      worst = std::max(worst, relative_gap(boundary_poisson(half, a, b), boundary_poisson(half, b, a)));
    }
    out.push_back(make("boundary_poisson_symmetry", 2 * n, worst, 1e-12));
  }

  const double fault = options.green_fault;
  out.push_back(covariance("conformal_identity", {MobiusMap::identity()}, disc, disc, fault, next_rng()));
  out.push_back(covariance("conformal_cayley", {MobiusMap::cayley()}, half, disc, fault, next_rng()));
  out.push_back(covariance("conformal_inverse_cayley", {MobiusMap::inverse_cayley()}, disc, half, fault, next_rng()));
  {
    RngStream rng = next_rng();
    std::vector<MobiusMap> maps;
    for (int k = 0; k < 5; ++k) {
      maps.push_back(MobiusMap::disc_automorphism(2.0 * kPi * rng.uniform(), random_disc_point(rng, 0.8)));
    }
    out.push_back(covariance("conformal_disc_automorphism", maps, disc, disc, fault, next_rng()));
  }
  {
    RngStream rng = next_rng();
    std::vector<MobiusMap> maps;
    while (maps.size() < 5) {
      const double a = rng.uniform(-2.0, 2.0);
      const double b = rng.uniform(-2.0, 2.0);
      const double c = rng.uniform(-1.0, 1.0);
      const double d = rng.uniform(-2.0, 2.0);
      if (a * d - b * c > 0.2) maps.push_back(MobiusMap::half_plane_automorphism(a, b, c, d));
    }
    out.push_back(covariance("conformal_half_plane_automorphism", maps, half, half, fault, next_rng()));
  }

  {
    double worst = std::abs(SlitHullMap::vertical_slit(0.0, 1.0)(Point(0, 2)) - Point(0.0, std::sqrt(3.0)));
    RngStream rng = next_rng();
    const auto flat = SlitHullMap::tilted_segment(0.0);
    for (int k = 0; k < 100; ++k) {
      const Point z = random_half_plane_point(rng);
      worst = std::max(worst, std::abs(flat(z) - z));
    }
    out.push_back(make("slit_closed_form", 101, worst, 1e-14));

    const double delta = 0.5;
    const double eta = 1e-14;
    const Point near_tip(-1.0, delta + eta);
    // |g + 1| = sqrt(2 delta eta + eta^2) along the approach from above.
    const double tip = std::abs(SlitHullMap::tilted_segment(delta)(near_tip) + 1.0);
    out.push_back(make("slit_tip_limit", 1, tip, 2.0 * std::sqrt(2.0 * delta * eta)));
  }

  {
    const std::vector<SlitHullMap> maps{SlitHullMap::tilted_segment(0.5), SlitHullMap::vertical_slit(0.0, 1.0),
                                        SlitHullMap::vertical_slit(0.3, 2.0)};
    double worst = 0.0;
    for (const auto& map : maps) {
      double previous = kInf;
      for (const double height : {1e1, 1e2, 1e4, 1e6}) {
        const Point z(0.0, height);
        const double disp = std::abs(map(z) - z);
        if (!(disp < previous)) worst = kInf;
        previous = disp;
      }
      worst = std::max(worst, previous);
    }
    out.push_back(make("slit_hydrodynamic_normalization", 4 * maps.size(), worst, 1e-4));
  }

  {
    RngStream rng = next_rng();
    const std::vector<SlitHullMap> maps{SlitHullMap::tilted_segment(0.5), SlitHullMap::vertical_slit(0.0, 1.0)};
    double worst = 0.0;
    constexpr std::size_t n = 1000;
    for (const auto& map : maps) {
      for (std::size_t k = 0; k < n; ++k) {
        const Point z = random_half_plane_point(rng);
        if (map.in_hull(z)) continue;
        const Point g = map(z);
        worst = std::max({worst, -g.imag(), g.imag() - z.imag()});
      }
    }
    out.push_back(make("slit_image_in_half_plane", n * maps.size(), std::max(0.0, worst), 1e-12));
  }

  {
    const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    const auto rows = hull_map_scaling_check(eps);
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, row.ratio / rows.front().ratio);
    out.push_back(make("hull_map_scaling_bounded", rows.size(), worst, 2.0));

    double far = 0.0;
    for (const double e : eps) {
      for (const double x0 : {-1.0, -0.5, 0.0, e}) {
        const auto map = SlitHullMap::vertical_slit(x0, e);
        for (const double re : {-5.0, 0.0, 5.0}) {
          const Point z(re, 1e3);
          far = std::max(far, std::abs(map(z) - z));
        }
      }
    }
    out.push_back(make("hull_map_far_field", eps.size() * 12, far, 1e-3));
  }

  if (options.monte_carlo) {
    const std::size_t n = options.identity_samples;
    out.push_back(identity_check("imaginary_identity_empty_hull", SlitHullMap::tilted_segment(0.0), Point(0.0, 1.0),
                                 n, next_rng()));
    out.push_back(identity_check("imaginary_identity_vertical_slit", SlitHullMap::vertical_slit(0.0, 1.0),
                                 Point(0.0, 2.0), n, next_rng()));
    out.push_back(identity_check("imaginary_identity_tilted_segment", SlitHullMap::tilted_segment(0.5),
                                 Point(-1.0, 2.0), n, next_rng()));
  } else {
    stream += 3;
  }
  return out;
}

}  // namespace bmgap
