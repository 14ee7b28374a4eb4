#include "bmgap/path.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "bmgap/geometry.hpp"

namespace bmgap {

Path::Path(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw InvalidArgument("path needs at least one vertex");
  if (vertices_.front().t != 0.0) throw InvalidArgument("path must start at time 0");
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if (!(vertices_[i].t > vertices_[i - 1].t)) throw InvalidArgument("path times must increase strictly");
  }
}

Path Path::transformed(Point pivot, Point rotation, double scale, Point origin, double time_scale) const {
  std::vector<Vertex> out;
  out.reserve(vertices_.size());
  const Point factor = scale * rotation;
  for (const auto& v : vertices_) out.push_back({v.t * time_scale, origin + factor * (v.z - pivot)});
  return Path(std::move(out));
}

void Path::write_csv(std::ostream& out) const {
  out << "t,x,y\n";
  char buf[96];
  for (const auto& v : vertices_) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", v.t, v.z.real(), v.z.imag());
    out << buf;
  }
}

double DtRule::dt_for(double duration) const {
  if (kind == Kind::fixed_steps) {
    if (!(value >= 2)) throw InvalidArgument("fixed_steps rule needs at least 2 steps");
    return duration / std::floor(value);
  }
  if (!(value > 0)) throw InvalidArgument("absolute dt must be positive");
  return std::min(value, duration / 2);
}

namespace {

std::vector<Vertex> bm_vertices(double duration, double dt, Point start, RngStream& rng) {
  if (!(duration > 0)) throw InvalidArgument("duration must be positive");
  if (!(dt > 0) || dt > duration) throw InvalidArgument("dt must lie in (0, duration]");
  auto steps = static_cast<std::size_t>(std::ceil(duration / dt));
  // Guard against ceil landing one step high when duration/dt is an integer up to rounding.
  if (steps > 1 && static_cast<double>(steps - 1) * dt >= duration) --steps;

  std::vector<Vertex> out;
  out.reserve(steps + 1);
  out.push_back({0.0, start});
  Point z = start;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = (k == steps) ? duration : static_cast<double>(k) * dt;
    const double sd = std::sqrt(t - out.back().t);
    const double dx = rng.normal();
    const double dy = rng.normal();
    z += Point(sd * dx, sd * dy);
    out.push_back({t, z});
  }
  return out;
}

}  // namespace

Path sample_bm(double duration, double dt, Point start, RngStream& rng) {
  return Path(bm_vertices(duration, dt, start, rng));
}

Path sample_bridge(double duration, Point anchor, double dt, RngStream& rng) {
  if (!(duration > 0)) throw InvalidArgument("duration must be positive");
  if (!(dt > 0) || dt > duration / 2) throw InvalidArgument("bridge dt must lie in (0, duration/2]");
  auto vertices = bm_vertices(duration, dt, anchor, rng);
  const Point drift = vertices.back().z - anchor;
  for (auto& v : vertices) v.z -= (v.t / duration) * drift;
  vertices.front().z = anchor;
  vertices.back().z = anchor;
  return Path(std::move(vertices));
}

Path refine_path(const Path& path, std::size_t factor, RngStream& rng) {
  if (factor == 0) throw InvalidArgument("refinement factor must be positive");
  if (factor == 1 || path.size() < 2) return path;

  std::vector<Vertex> out;
  out.reserve((path.size() - 1) * factor + 1);
  out.push_back(path.front());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vertex& a = path[i];
    const Vertex& b = path[i + 1];
    const double sub = (b.t - a.t) / static_cast<double>(factor);
    Point z = a.z;
    double t = a.t;
    for (std::size_t j = 1; j < factor; ++j) {
      // Conditional law of B(t + sub) given B(t) = z and B(b.t) = b.z.
      const double remaining = b.t - t;
      const double next_t = a.t + static_cast<double>(j) * sub;
      const double step = next_t - t;
      const Point mean = z + (step / remaining) * (b.z - z);
      const double sd = std::sqrt(step * (remaining - step) / remaining);
      const double dx = rng.normal();
      const double dy = rng.normal();
      z = mean + Point(sd * dx, sd * dy);
      t = next_t;
      out.push_back({t, z});
    }
    out.push_back(b);
  }
  return Path(std::move(out));
}

double loop_duration_floor(double eps) {
  const double log_eps = std::abs(std::log(eps));
  return eps * eps / (log_eps * log_eps);
}

double neglected_short_loop_mass(double eps, double t_min) {
  // int_0^{t_min} t * 4 exp(-eps^2/(4t)) dt / (2 pi t^2) = (2/pi) E1(eps^2 / (4 t_min)), with E1(a) = -Ei(-a).
  return -(2.0 / std::numbers::pi) * std::expint(-eps * eps / (4.0 * t_min));
}

double loop_proposal_weight(double t, const Square& domain, double t_min, double t_max) {
  // target density 1/(2 pi t^2) dz dt; proposal 1/(t log(t_max/t_min)) * 1/|Q|
  return domain.area() * std::log(t_max / t_min) / (2.0 * std::numbers::pi * t);
}

WeightedLoopSample sample_loop_measure(double eps, const Square& domain, double t_max, const DtRule& dt_rule,
                                       RngStream& rng) {
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
  if (eps >= domain.side) throw InvalidArgument("eps must be smaller than the side of the domain");
  if (!(eps < 1)) throw InvalidArgument("eps must be below 1 for the log-scale duration floor");
  if (t_max < eps * eps) throw InvalidArgument("t_max must be at least eps^2");

  WeightedLoopSample sample;
  sample.domain = domain;
  sample.t_min = loop_duration_floor(eps);
  sample.t_max = t_max;

  const double t = sample.t_min * std::exp(rng.uniform() * std::log(t_max / sample.t_min));
  const Point root = domain.lo + Point(domain.side * rng.uniform(), domain.side * rng.uniform());
  sample.path = sample_bridge(t, root, dt_rule.dt_for(t), rng);
  sample.weight = loop_proposal_weight(t, domain, sample.t_min, t_max);

  bool inside = true;
  for (const auto& v : sample.path.vertices()) {
    if (!domain.contains(v.z)) {
      inside = false;
      break;
    }
  }
  if (!inside || diameter(sample.path) <= eps) sample.weight = 0.0;
  return sample;
}

}  // namespace bmgap
