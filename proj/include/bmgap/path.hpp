#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "bmgap/errors.hpp"
#include "bmgap/rng.hpp"

namespace bmgap {

struct Vertex {
  double t;
  Point z;
};

/// Time-stamped planar polyline. Times start at 0 and increase strictly; the
/// last time is the duration. A single vertex is a zero-duration path.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<Vertex> vertices);

  std::span<const Vertex> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vertex& operator[](std::size_t i) const { return vertices_[i]; }
  const Vertex& front() const { return vertices_.front(); }
  const Vertex& back() const { return vertices_.back(); }
  double duration() const { return vertices_.empty() ? 0.0 : vertices_.back().t; }

  /// Image under z -> origin + scale * rotation * (z - pivot), with times scaled by time_scale.
  Path transformed(Point pivot, Point rotation, double scale, Point origin, double time_scale) const;

  /// CSV rows `t,x,y` with 17 significant digits, header included.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<Vertex> vertices_;
};

/// Axis-aligned square [lo.x, lo.x + side] x [lo.y, lo.y + side].
struct Square {
  Point lo{0.0, 0.0};
  double side = 1.0;

  bool contains(Point z) const {
    return z.real() >= lo.real() && z.real() <= lo.real() + side && z.imag() >= lo.imag() &&
           z.imag() <= lo.imag() + side;
  }
  double area() const { return side * side; }
};

/// How finely a loop of duration t is discretized.
struct DtRule {
  enum class Kind { fixed_steps, absolute };
  Kind kind = Kind::fixed_steps;
  /// Steps per loop for fixed_steps; the time step for absolute (capped at t/2).
  double value = 4096;

  double dt_for(double duration) const;
};

struct WeightedLoopSample {
  Path path;
  double weight = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  Square domain;
};

/// Planar Brownian motion (generator Laplacian/2) on the grid k*dt, ending exactly at duration.
Path sample_bm(double duration, double dt, Point start, RngStream& rng);

/// Brownian bridge from anchor back to anchor; the endpoint is pinned exactly.
Path sample_bridge(double duration, Point anchor, double dt, RngStream& rng);

/// Inserts factor-1 Brownian-bridge points inside every step. Original vertices are kept bit-for-bit.
Path refine_path(const Path& path, std::size_t factor, RngStream& rng);

/// Lower truncation of the duration proposal: eps^2 / |log eps|^2.
double loop_duration_floor(double eps);

/// Upper bound, per unit root area, on the duration-weighted loop measure of {diam > eps}
/// carried by loops shorter than t_min, from P(diam > eps) <= 4 exp(-eps^2/(4t)).
double neglected_short_loop_mass(double eps, double t_min);

/// One importance sample of the Brownian loop measure restricted to loops inside `domain`
/// with diameter above eps and duration at most t_max. Duration is log-uniform on
/// [loop_duration_floor(eps), t_max], root uniform in the domain.
WeightedLoopSample sample_loop_measure(double eps, const Square& domain, double t_max, const DtRule& dt_rule,
                                       RngStream& rng);

/// Importance weight (loop-measure density over proposal density) before the indicator.
double loop_proposal_weight(double t, const Square& domain, double t_min, double t_max);

}  // namespace bmgap
