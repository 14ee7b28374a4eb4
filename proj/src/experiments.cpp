#include "bmgap/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bmgap/geometry.hpp"
#include "bmgap/hull.hpp"
#include "bmgap/kernels.hpp"
#include "bmgap/occupation.hpp"
#include "bmgap/path.hpp"

namespace bmgap {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHullAreaTarget = kPi / 5.0;
constexpr double kHeightGapTarget = 5.0 / kPi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<ExperimentKind, std::string>>& experiment_table() {
  static const std::vector<std::pair<ExperimentKind, std::string>> table{
      {ExperimentKind::hull_area, "hull_area"},
      {ExperimentKind::height_gap, "height_gap"},
      {ExperimentKind::lambda0_ratio, "lambda0_ratio"},
      {ExperimentKind::loop_functionals, "loop_functionals"},
      {ExperimentKind::reflection_check, "reflection_check"},
      {ExperimentKind::green_hitting, "green_hitting"},
      {ExperimentKind::kernel_suite, "kernel_suite"},
  };
  return table;
}

std::size_t default_samples(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::hull_area: return 500;
    case ExperimentKind::height_gap: return 500;
    case ExperimentKind::lambda0_ratio: return 20000;
    case ExperimentKind::loop_functionals: return 20000;
    case ExperimentKind::reflection_check: return 100000;
    case ExperimentKind::green_hitting: return 200000;
    case ExperimentKind::kernel_suite: return 100000;
  }
  return 500;
}

std::string format_number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::size_t batches_for(const ExperimentConfig& config, std::size_t n) {
  const std::size_t b = config.batches > 0 ? config.batches : default_batches(n);
  return std::min(b, n);
}

Gate gate(std::string name, double value, double tolerance, bool pass, std::string detail = {}) {
  return {std::move(name), value, tolerance, pass, std::move(detail)};
}

Gate relative_gate(const std::string& name, const ResultRow& row, double tolerance) {
  const double err = std::abs(row.rel_err());
  return gate(name, err, tolerance, err <= tolerance,
              "mean " + format_number(row.estimate.mean) + " vs target " + format_number(row.target));
}

// ---- config parsing -------------------------------------------------------------------

class Reader {
 public:
  Reader(const json& doc, std::vector<std::string>& violations) : doc_(doc), violations_(violations) {}

  bool has(const char* key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

  void count(const char* key, std::size_t& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::size_t>();
      return;
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0 && d < 9007199254740992.0 && std::floor(d) == d) {
        out = static_cast<std::size_t>(d);
        return;
      }
    }
    violations_.push_back(std::string(key) + " must be a nonnegative integer (got " + v.dump() + ")");
  }

  void u64(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::uint64_t>();
      return;
    }
    violations_.push_back(std::string(key) + " must be a nonnegative 64-bit integer (got " + v.dump() + ")");
  }

  void real(const char* key, double& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (v.is_number() && std::isfinite(v.get<double>())) {
      out = v.get<double>();
      return;
    }
    violations_.push_back(std::string(key) + " must be a finite number (got " + v.dump() + ")");
  }

  void optional_real(const char* key, std::optional<double>& out) {
    if (!has(key)) return;
    double value = 0.0;
    const auto before = violations_.size();
    real(key, value);
    if (violations_.size() == before) out = value;
  }

  void real_list(const char* key, std::vector<double>& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (!v.is_array()) {
      violations_.push_back(std::string(key) + " must be an array of numbers (got " + v.dump() + ")");
      return;
    }
    std::vector<double> values;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        violations_.push_back(std::string(key) + " entries must be finite numbers (got " + e.dump() + ")");
        return;
      }
      values.push_back(e.get<double>());
    }
    out = std::move(values);
  }

  void boolean(const char* key, bool& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (v.is_boolean()) {
      out = v.get<bool>();
      return;
    }
    violations_.push_back(std::string(key) + " must be true or false (got " + v.dump() + ")");
  }

  void string(const char* key, std::string& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (v.is_string()) {
      out = v.get<std::string>();
      return;
    }
    violations_.push_back(std::string(key) + " must be a string (got " + v.dump() + ")");
  }

  void pairs(const char* key, std::vector<GreenPair>& out) {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    const std::string shape = std::string(key) + " must be an array of [x_re, x_im, y_re, y_im] arrays";
    if (!v.is_array()) {
      violations_.push_back(shape);
      return;
    }
    std::vector<GreenPair> values;
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 4 ||
          !std::all_of(e.begin(), e.end(), [](const json& c) { return c.is_number(); })) {
        violations_.push_back(shape + " (got " + e.dump() + ")");
        return;
      }
      values.push_back({Point(e[0].get<double>(), e[1].get<double>()), Point(e[2].get<double>(), e[3].get<double>())});
    }
    out = std::move(values);
  }

 private:
  const json& doc_;
  std::vector<std::string>& violations_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "experiment", "samples", "dt", "grid_h", "eps_list", "seed", "workers", "output_path", "batches",
      "random_rotation", "synthetic_density", "loop_eps", "t_max", "loop_steps", "t_max_list", "reflection_a",
      "reflection_t", "reflection_steps", "green_pairs", "green_r", "hitting_dt", "kernel_fault",
      "kernel_monte_carlo"};
  return keys;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : experiment_table()) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : experiment_table()) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& entry : experiment_table()) names.push_back(entry.second);
  return names;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed config document: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config document must be a JSON object"});

  std::vector<std::string> violations;
  for (const auto& item : doc.items()) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      violations.push_back("unknown key '" + item.key() + "'");
    }
  }

  ExperimentConfig c;
  Reader read(doc, violations);
  std::string name;
  std::string valid;
  for (const auto& n : experiment_names()) valid += (valid.empty() ? "" : ", ") + n;
  if (!read.has("experiment")) {
    violations.push_back("experiment is required (one of: " + valid + ")");
  } else {
    read.string("experiment", name);
    if (doc.at("experiment").is_string()) {
      if (const auto kind = experiment_from_string(name)) {
        c.experiment = *kind;
      } else {
        violations.push_back("unknown experiment '" + name + "'; valid experiments: " + valid);
      }
    }
  }

  c.samples = default_samples(c.experiment);
  read.count("samples", c.samples);
  read.real("grid_h", c.grid_h);
  c.dt = c.grid_h * c.grid_h;
  read.real("dt", c.dt);
  read.real_list("eps_list", c.eps_list);
  read.u64("seed", c.seed);
  read.count("workers", c.workers);
  read.string("output_path", c.output_path);
  read.count("batches", c.batches);
  read.boolean("random_rotation", c.random_rotation);
  read.optional_real("synthetic_density", c.synthetic_density);
  read.real("loop_eps", c.loop_eps);
  read.real("t_max", c.t_max);
  read.count("loop_steps", c.loop_steps);
  read.real_list("t_max_list", c.t_max_list);
  read.real_list("reflection_a", c.reflection_a);
  read.real_list("reflection_t", c.reflection_t);
  read.count("reflection_steps", c.reflection_steps);
  read.pairs("green_pairs", c.green_pairs);
  read.real("green_r", c.green_r);
  read.real("hitting_dt", c.hitting_dt);
  read.real("kernel_fault", c.kernel_fault);
  read.boolean("kernel_monte_carlo", c.kernel_monte_carlo);

  for (auto& v : validate(c)) violations.push_back(std::move(v));
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return c;
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  const auto num = [](double x) { return format_number(x); };

  if (c.samples == 0) {
    v.push_back("samples must be positive (got 0)");
  } else if (c.samples < 8) {
    v.push_back("samples must be at least 8 so that batch means has 8 batches (got " + std::to_string(c.samples) + ")");
  }
  if (c.batches != 0 && (c.batches < 8 || c.batches > c.samples)) {
    v.push_back("batches must be 0 (automatic) or between 8 and samples (got " + std::to_string(c.batches) + ")");
  }
  if (!(c.grid_h > 0)) v.push_back("grid_h must be positive (got " + num(c.grid_h) + ")");
  if (!(c.dt > 0)) v.push_back("dt must be positive (got " + num(c.dt) + ")");
  if (c.grid_h > 0 && c.dt > 0 && c.dt > c.grid_h * c.grid_h * (1.0 + 1e-12)) {
    v.push_back("dt = " + num(c.dt) + " exceeds grid_h^2 = " + num(c.grid_h * c.grid_h) + " (grid_h = " +
                num(c.grid_h) + "); steps must not be longer than a cell");
  }
  if (c.eps_list.empty()) v.push_back("eps_list must not be empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    const double e = c.eps_list[i];
    if (!(e > 0)) v.push_back("eps_list entry " + num(e) + " must be positive");
    if (i > 0 && !(e < c.eps_list[i - 1])) {
      v.push_back("eps_list must be strictly decreasing (" + num(c.eps_list[i - 1]) + " is followed by " + num(e) + ")");
    }
    if (c.grid_h > 0 && e < 4.0 * c.grid_h) {
      v.push_back("eps " + num(e) + " is below 4*grid_h = " + num(4.0 * c.grid_h) + " (band too thin)");
    }
  }
  if (c.workers == 0) v.push_back("workers must be at least 1");
  if (c.synthetic_density && !(*c.synthetic_density > 0)) v.push_back("synthetic_density must be positive");

  if (!(c.loop_eps > 0 && c.loop_eps < 1)) v.push_back("loop_eps must lie in (0, 1) (got " + num(c.loop_eps) + ")");
  if (!(c.t_max >= c.loop_eps * c.loop_eps)) v.push_back("t_max must be at least loop_eps^2 (got " + num(c.t_max) + ")");
  if (c.loop_steps < 2) v.push_back("loop_steps must be at least 2");
  if (c.t_max_list.empty()) v.push_back("t_max_list must not be empty");
  for (const double t : c.t_max_list) {
    if (!(t >= c.loop_eps * c.loop_eps)) v.push_back("t_max_list entry " + num(t) + " is below loop_eps^2");
  }

  if (c.reflection_a.empty() || c.reflection_t.empty()) v.push_back("reflection_a and reflection_t must not be empty");
  for (const double a : c.reflection_a) {
    if (!(a >= 0)) v.push_back("reflection_a entry " + num(a) + " must be nonnegative");
  }
  for (const double t : c.reflection_t) {
    if (!(t > 0)) v.push_back("reflection_t entry " + num(t) + " must be positive");
  }
  if (c.reflection_steps < 2) v.push_back("reflection_steps must be at least 2");

  if (!(c.green_r > 0)) v.push_back("green_r must be positive (got " + num(c.green_r) + ")");
  if (!(c.hitting_dt > 0)) v.push_back("hitting_dt must be positive (got " + num(c.hitting_dt) + ")");
  if (c.green_pairs.empty()) v.push_back("green_pairs must not be empty");
  for (const auto& p : c.green_pairs) {
    const std::string label = "green pair (" + num(p.x.real()) + "," + num(p.x.imag()) + ") -> (" + num(p.y.real()) +
                              "," + num(p.y.imag()) + ")";
    if (!(c.green_r < std::abs(p.x - p.y) / 4.0)) v.push_back(label + " needs green_r < |x - y| / 4");
    if (!(std::abs(p.x) < 1.0 - 2.0 * c.green_r) || !(std::abs(p.y) < 1.0 - 2.0 * c.green_r)) {
      v.push_back(label + " must lie farther than 2*green_r inside the unit disc");
    }
  }
  return v;
}

json to_json(const ExperimentConfig& c) {
  json pairs = json::array();
  for (const auto& p : c.green_pairs) pairs.push_back({p.x.real(), p.x.imag(), p.y.real(), p.y.imag()});
  json doc{
      {"experiment", to_string(c.experiment)},
      {"samples", c.samples},
      {"dt", c.dt},
      {"grid_h", c.grid_h},
      {"eps_list", c.eps_list},
      {"seed", c.seed},
      {"workers", c.workers},
      {"output_path", c.output_path},
      {"batches", c.batches},
      {"random_rotation", c.random_rotation},
      {"loop_eps", c.loop_eps},
      {"t_max", c.t_max},
      {"loop_steps", c.loop_steps},
      {"t_max_list", c.t_max_list},
      {"reflection_a", c.reflection_a},
      {"reflection_t", c.reflection_t},
      {"reflection_steps", c.reflection_steps},
      {"green_pairs", pairs},
      {"green_r", c.green_r},
      {"hitting_dt", c.hitting_dt},
      {"kernel_fault", c.kernel_fault},
      {"kernel_monte_carlo", c.kernel_monte_carlo},
  };
  doc["synthetic_density"] = c.synthetic_density ? json(*c.synthetic_density) : json(nullptr);
  return doc;
}

double ResultRow::rel_err() const { return target != 0.0 ? (estimate.mean - target) / std::abs(target) : kNaN; }

bool ExperimentReport::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

// ---- bridge hulls ------------------------------------------------------------------------

namespace {

Path hull_sample_path(const ExperimentConfig& c, std::size_t i) {
  RngStream rng(c.seed, i);
  Path path = sample_bridge(1.0, Point(0.0, 0.0), c.dt, rng);
  if (c.random_rotation) {
    const Point rotation = std::polar(1.0, 2.0 * kPi * rng.uniform());
    path = path.transformed(Point(0.0, 0.0), rotation, 1.0, Point(0.0, 0.0), 1.0);
  }
  return path;
}

struct HullSample {
  double area = 0.0;
  double diameter = 0.0;
  std::vector<double> band_area;
};

// Occupation field holding density * (hull area weight) * h^2 in every hull cell.
OccupationField synthetic_field(const RasterHull& hull, double density) {
  OccupationField field{TiledField(hull.grid), 0.0};
  const double cell = hull.grid.h * hull.grid.h;
  for (std::int64_t iy = 0; iy < hull.grid.ny; ++iy) {
    for (std::int64_t ix = 0; ix < hull.grid.nx; ++ix) {
      const double w = hull.area_weight(ix, iy);
      if (w > 0) field.cell_time.add(ix, iy, density * w * cell);
    }
  }
  field.duration = field.total();
  return field;
}

json base_params(const ExperimentConfig& c) {
  return {{"duration", 1.0}, {"grid_h", c.grid_h}, {"dt", c.dt}, {"random_rotation", c.random_rotation}};
}

}  // namespace

ExperimentReport run_hull_area(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::hull_area) throw InvalidArgument("run_hull_area needs experiment = hull_area");
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  const std::function<HullSample(std::size_t)> task = [&](std::size_t i) {
    const Path path = hull_sample_path(c, i);
    const RasterHull hull = outer_decompose(rasterize(path, grid_for(path, c.grid_h)));
    HullSample s;
    s.area = hull.area;
    s.diameter = diameter(path);
    for (const double e : c.eps_list) s.band_area.push_back(boundary_band(hull, e).area);
    return s;
  };
  const auto samples = parallel_samples(c.samples, c.workers, task, progress);

  ExperimentReport report;
  report.experiment = c.experiment;
  std::vector<double> areas;
  report.sample_table.push_back("sample_id,area,diameter,band_eps,band_area");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    areas.push_back(samples[i].area);
    for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
      report.sample_table.push_back(std::to_string(i) + "," + format_number(samples[i].area) + "," +
                                    format_number(samples[i].diameter) + "," + format_number(c.eps_list[k]) + "," +
                                    format_number(samples[i].band_area[k]));
    }
  }
  ResultRow row;
  row.params = base_params(c);
  row.params["quantity"] = "hull_area";
  row.estimate = batch_means(areas, batches_for(c, areas.size()));
  row.target = kHullAreaTarget;
  report.rows.push_back(row);
  report.gates.push_back(relative_gate("hull_area_within_3pct", row, 0.03));
  return report;
}

ExperimentReport run_height_gap(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::height_gap) throw InvalidArgument("run_height_gap needs experiment = height_gap");
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  const std::function<std::vector<BandOccupation>(std::size_t)> task = [&](std::size_t i) {
    const Path path = hull_sample_path(c, i);
    const GridSpec grid = grid_for(path, c.grid_h);
    const RasterHull hull = outer_decompose(rasterize(path, grid));
    const OccupationField field =
        c.synthetic_density ? synthetic_field(hull, *c.synthetic_density) : occupation_grid(path, grid);
    std::vector<BandOccupation> out;
    for (const double e : c.eps_list) out.push_back(band_occupation(field, hull, e));
    return out;
  };
  const auto samples = parallel_samples(c.samples, c.workers, task, progress);

  ExperimentReport report;
  report.experiment = c.experiment;
  report.sample_table.push_back("sample_id,eps,band_area,band_time,estimate");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
      const auto& b = samples[i][k];
      report.sample_table.push_back(std::to_string(i) + "," + format_number(c.eps_list[k]) + "," +
                                    format_number(b.band_area) + "," + format_number(b.band_time) + "," +
                                    format_number(b.estimate));
    }
  }

  const double target = c.synthetic_density ? *c.synthetic_density : kHeightGapTarget;
  std::vector<std::size_t> degenerate;
  for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
    std::vector<double> values;
    for (const auto& s : samples) {
      if (s[k].band_area > 0) values.push_back(s[k].estimate);
    }
    degenerate.push_back(samples.size() - values.size());
    if (values.size() < 8) throw DegenerateSample("fewer than 8 samples with a nonempty band at eps " + format_number(c.eps_list[k]));
    ResultRow row;
    row.params = base_params(c);
    row.params["quantity"] = "band_occupation_ratio";
    row.params["eps"] = c.eps_list[k];
    row.estimate = batch_means(values, batches_for(c, values.size()));
    row.target = target;
    report.rows.push_back(row);
  }
  report.extra["degenerate_samples"] = degenerate;
  const std::size_t levels = report.rows.size();

  if (c.synthetic_density) {
    double worst = 0.0;
    for (const auto& row : report.rows) worst = std::max(worst, std::abs(row.estimate.mean - target));
    report.gates.push_back(gate("synthetic_identity", worst, 1e-9, worst <= 1e-9));
    return report;
  }

  if (levels >= 2) {
    // Affine fit in 1/|log eps| over the three largest levels; intercept = value at eps -> 0.
    const std::size_t m = std::min<std::size_t>(3, levels);
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k < m; ++k) {
      x.push_back(1.0 / std::abs(std::log(c.eps_list[k])));
      y.push_back(report.rows[k].estimate.mean);
    }
    const LinearFit fit = fit_line(x, y);
    double mean_x = 0.0;
    for (const double v : x) mean_x += v;
    mean_x /= static_cast<double>(m);
    double sxx = 0.0;
    for (const double v : x) sxx += (v - mean_x) * (v - mean_x);
    double var = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double coef = 1.0 / static_cast<double>(m) - mean_x * (x[k] - mean_x) / sxx;
      var += coef * coef * report.rows[k].estimate.std_error * report.rows[k].estimate.std_error;
    }
    ResultRow row;
    row.params = base_params(c);
    row.params["quantity"] = "band_occupation_ratio_extrapolated";
    row.params["model"] = "affine in 1/|log eps|";
    row.params["levels"] = std::vector<double>(c.eps_list.begin(), c.eps_list.begin() + static_cast<std::ptrdiff_t>(m));
    row.estimate = {fit.intercept, std::sqrt(var), report.rows.back().estimate.n, report.rows.back().estimate.batches};
    row.target = target;
    report.extra["extrapolation"] = {{"model", "affine in 1/|log eps|"},
                                     {"intercept", fit.intercept},
                                     {"slope", fit.slope},
                                     {"stderr_note", "levels treated as independent"}};

    bool monotone = true;
    double previous = std::numeric_limits<double>::infinity();
    std::string trail;
    for (std::size_t k = 0; k < levels; ++k) {
      const double dev = std::abs(report.rows[k].estimate.mean - target);
      if (!(dev < previous)) monotone = false;
      previous = dev;
      trail += (k ? " > " : "") + format_number(dev);
    }
    report.gates.push_back(gate("deviation_shrinks_monotonically", monotone ? 1.0 : 0.0, 1.0, monotone, trail));
    report.gates.push_back(relative_gate("smallest_eps_within_10pct", report.rows[levels - 1], 0.10));
    report.rows.push_back(row);
    report.gates.push_back(relative_gate("extrapolated_within_5pct", row, 0.05));
  } else {
    report.gates.push_back(relative_gate("smallest_eps_within_10pct", report.rows.back(), 0.10));
  }
  return report;
}

// ---- loop measure -------------------------------------------------------------------------

namespace {

struct LoopSample {
  double t = 0.0;
  double weight = 0.0;
  double area = 0.0;
};

LoopSample loop_sample(const ExperimentConfig& c, double t_max, std::size_t i) {
  RngStream rng(c.seed, i);
  DtRule rule;
  rule.kind = DtRule::Kind::fixed_steps;
  rule.value = static_cast<double>(c.loop_steps);
  const Square unit{Point(0.0, 0.0), 1.0};
  const WeightedLoopSample s = sample_loop_measure(c.loop_eps, unit, t_max, rule, rng);
  LoopSample out;
  out.t = s.path.duration();
  out.weight = s.weight;
  if (s.weight > 0) {
    const Point root = s.path.front().z;
    const double h = std::sqrt(rule.dt_for(out.t));
    Path raster_path = s.path;
    if (c.random_rotation) {
      raster_path = s.path.transformed(root, std::polar(1.0, 2.0 * kPi * rng.uniform()), 1.0, root, 1.0);
    }
    out.area = outer_decompose(rasterize(raster_path, grid_for(raster_path, h))).area;
  }
  return out;
}

json loop_params(const ExperimentConfig& c, double t_max) {
  return {{"eps", c.loop_eps}, {"t_max", t_max}, {"loop_steps", c.loop_steps}, {"domain", "unit square"}};
}

struct LoopRows {
  ResultRow numerator;
  ResultRow denominator;
  ResultRow ratio;
};

LoopRows loop_rows(const ExperimentConfig& c, const std::vector<LoopSample>& samples, double t_cut, double log_eps) {
  std::vector<double> num;
  std::vector<double> den;
  for (const auto& s : samples) {
    const bool keep = s.t <= t_cut;
    num.push_back(keep ? s.weight * s.t / log_eps : 0.0);
    den.push_back(keep ? s.weight * s.area / log_eps : 0.0);
  }
  const std::size_t b = batches_for(c, samples.size());
  LoopRows rows;
  rows.numerator.params = loop_params(c, t_cut);
  rows.numerator.params["quantity"] = "duration_integral_over_abs_log_eps";
  rows.numerator.estimate = batch_means(num, b);
  rows.numerator.target = 1.0 / kPi;
  rows.denominator.params = loop_params(c, t_cut);
  rows.denominator.params["quantity"] = "area_integral_over_abs_log_eps";
  rows.denominator.estimate = batch_means(den, b);
  rows.denominator.target = 0.2;
  rows.ratio.params = loop_params(c, t_cut);
  rows.ratio.params["quantity"] = "duration_to_area_ratio";
  rows.ratio.estimate = ratio_estimate(num, den, b);
  rows.ratio.target = kHeightGapTarget;
  return rows;
}

json loop_metadata(const ExperimentConfig& c, const std::vector<LoopSample>& samples, double t_max) {
  const double t_min = loop_duration_floor(c.loop_eps);
  std::size_t accepted = 0;
  for (const auto& s : samples) accepted += s.weight > 0 ? 1 : 0;
  return {{"t_min", t_min},
          {"t_max", t_max},
          {"accepted", accepted},
          {"proposals", samples.size()},
          {"neglected_short_loop_mass_bound", neglected_short_loop_mass(c.loop_eps, t_min)},
          {"grid", "h = sqrt(t / loop_steps) per loop"}};
}

}  // namespace

ExperimentReport run_lambda0_ratio(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::lambda0_ratio) throw InvalidArgument("run_lambda0_ratio needs experiment = lambda0_ratio");
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  const std::function<LoopSample(std::size_t)> task = [&](std::size_t i) { return loop_sample(c, c.t_max, i); };
  const auto samples = parallel_samples(c.samples, c.workers, task, progress);

  ExperimentReport report;
  report.experiment = c.experiment;
  const double log_eps = std::abs(std::log(c.loop_eps));
  const LoopRows rows = loop_rows(c, samples, c.t_max, log_eps);
  report.rows = {rows.ratio, rows.numerator, rows.denominator};
  report.gates.push_back(relative_gate("ratio_within_5pct", rows.ratio, 0.05));
  report.gates.push_back(relative_gate("numerator_within_5pct", rows.numerator, 0.05));
  report.gates.push_back(relative_gate("denominator_within_5pct", rows.denominator, 0.05));
  report.extra["loop_measure"] = loop_metadata(c, samples, c.t_max);

  report.sample_table.push_back("sample_id,duration,weight,area");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    report.sample_table.push_back(std::to_string(i) + "," + format_number(samples[i].t) + "," +
                                  format_number(samples[i].weight) + "," + format_number(samples[i].area));
  }
  return report;
}

ExperimentReport run_loop_functionals(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::loop_functionals) {
    throw InvalidArgument("run_loop_functionals needs experiment = loop_functionals");
  }
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  // One proposal on the widest duration range; narrower truncations reuse it with an indicator.
  const double t_big = *std::max_element(c.t_max_list.begin(), c.t_max_list.end());
  const std::function<LoopSample(std::size_t)> task = [&](std::size_t i) { return loop_sample(c, t_big, i); };
  const auto samples = parallel_samples(c.samples, c.workers, task, progress);

  ExperimentReport report;
  report.experiment = c.experiment;
  const double log_eps = std::abs(std::log(c.loop_eps));
  json table = json::array();
  for (const double t_cut : c.t_max_list) {
    const LoopRows rows = loop_rows(c, samples, t_cut, log_eps);
    report.rows.push_back(rows.numerator);
    report.rows.push_back(rows.denominator);
    report.rows.push_back(rows.ratio);
    table.push_back({{"t_max", t_cut},
                     {"numerator", rows.numerator.estimate.mean},
                     {"denominator", rows.denominator.estimate.mean},
                     {"ratio", rows.ratio.estimate.mean},
                     {"ratio_stderr", rows.ratio.estimate.std_error}});
  }
  report.extra["loop_measure"] = loop_metadata(c, samples, t_big);
  report.extra["truncation_sensitivity"] = table;
  return report;
}

// ---- reflection principle -------------------------------------------------------------

std::vector<double> bridge_max_exceedance(double a, double t, std::size_t n, std::size_t steps, std::uint64_t seed,
                                          std::uint64_t stream_base) {
  if (steps < 2) throw InvalidArgument("bridge_max_exceedance needs at least 2 steps");
  std::vector<double> out;
  out.reserve(n);
  const double dt = t / static_cast<double>(steps);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, stream_base + i);
    const Path path = sample_bridge(t, Point(0.0, 0.0), dt, rng);
    const auto v = path.vertices();
    double stay_below = 1.0;
    for (std::size_t k = 0; k + 1 < v.size() && stay_below > 0.0; ++k) {
      const double y1 = v[k].z.real();
      const double y2 = v[k + 1].z.real();
      if (y1 >= a || y2 >= a) {
        stay_below = 0.0;
      } else {
        stay_below *= 1.0 - std::exp(-2.0 * (a - y1) * (a - y2) / (v[k + 1].t - v[k].t));
      }
    }
    out.push_back(1.0 - stay_below);
  }
  return out;
}

ExperimentReport run_reflection_check(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::reflection_check) {
    throw InvalidArgument("run_reflection_check needs experiment = reflection_check");
  }
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  ExperimentReport report;
  report.experiment = c.experiment;
  const std::size_t points = c.reflection_a.size() * c.reflection_t.size();
  // Chunks of 1000 paths keep task overhead low while staying worker-count independent.
  constexpr std::size_t chunk = 1000;
  const std::size_t chunks = (c.samples + chunk - 1) / chunk;
  std::size_t point = 0;
  double worst_z = 0.0;
  for (const double t : c.reflection_t) {
    for (const double a : c.reflection_a) {
      const std::uint64_t base = static_cast<std::uint64_t>(point + 1) << 40;
      const ProgressFn scaled = progress ? ProgressFn([&, point](const Progress& p) {
        progress({point * chunks + p.done, points * chunks});
      })
                                         : ProgressFn{};
      const std::function<std::vector<double>(std::size_t)> task = [&](std::size_t j) {
        const std::size_t begin = j * chunk;
        const std::size_t count = std::min(chunk, c.samples - begin);
        return bridge_max_exceedance(a, t, count, c.reflection_steps, c.seed, base + begin);
      };
      const auto parts = parallel_samples(chunks, c.workers, task, scaled);
      std::vector<double> values;
      values.reserve(c.samples);
      for (const auto& part : parts) values.insert(values.end(), part.begin(), part.end());

      ResultRow row;
      row.params = {{"quantity", "bridge_max_exceedance"}, {"a", a}, {"t", t}, {"steps", c.reflection_steps}};
      row.estimate = batch_means(values, batches_for(c, values.size()));
      row.target = std::exp(-2.0 * a * a / t);
      double z = 0.0;
      if (row.estimate.std_error > 0) {
        z = (row.estimate.mean - row.target) / row.estimate.std_error;
      } else if (row.estimate.mean != row.target) {
        z = std::numeric_limits<double>::infinity();
      }
      row.params["z_score"] = z;
      worst_z = std::max(worst_z, std::abs(z));
      report.rows.push_back(row);
      ++point;
    }
  }
  report.gates.push_back(gate("max_abs_z_below_3.5", worst_z, 3.5, worst_z < 3.5));
  return report;
}

// ---- Green's function hitting ------------------------------------------------------------

ExperimentReport run_green_hitting(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::green_hitting) throw InvalidArgument("run_green_hitting needs experiment = green_hitting");
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  ExperimentReport report;
  report.experiment = c.experiment;
  constexpr std::size_t chunk = 1000;
  const std::size_t chunks = (c.samples + chunk - 1) / chunk;
  const Domain disc = Domain::disc();
  for (std::size_t p = 0; p < c.green_pairs.size(); ++p) {
    const auto& pair = c.green_pairs[p];
    const std::uint64_t base = static_cast<std::uint64_t>(p + 1) << 40;
    const ProgressFn scaled = progress ? ProgressFn([&, p](const Progress& pr) {
      progress({p * chunks + pr.done, c.green_pairs.size() * chunks});
    })
                                       : ProgressFn{};
    const std::function<std::vector<double>(std::size_t)> task = [&](std::size_t j) {
      const std::size_t begin = j * chunk;
      const std::size_t count = std::min(chunk, c.samples - begin);
      std::vector<double> values;
      for (std::size_t i = 0; i < count; ++i) {
        RngStream rng(c.seed, base + begin + i);
        values.push_back(green_hitting_estimate(pair.x, pair.y, c.green_r, 1, c.hitting_dt, rng).value);
      }
      return values;
    };
    const auto parts = parallel_samples(chunks, c.workers, task, scaled);
    std::vector<double> values;
    for (const auto& part : parts) values.insert(values.end(), part.begin(), part.end());

    ResultRow row;
    row.params = {{"quantity", "log_r_times_hit_probability"},
                  {"x", {pair.x.real(), pair.x.imag()}},
                  {"y", {pair.y.real(), pair.y.imag()}},
                  {"r", c.green_r},
                  {"hitting_dt", c.hitting_dt}};
    row.estimate = batch_means(values, batches_for(c, values.size()));
    row.target = kPi * green(disc, pair.x, pair.y);
    report.rows.push_back(row);
    report.gates.push_back(relative_gate("pair_" + std::to_string(p) + "_within_10pct", row, 0.10));
  }
  return report;
}

// ---- kernel identities ---------------------------------------------------------------------

ExperimentReport run_kernel_suite(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.experiment != ExperimentKind::kernel_suite) throw InvalidArgument("run_kernel_suite needs experiment = kernel_suite");
  if (auto v = validate(c); !v.empty()) throw ConfigError(std::move(v));

  KernelSuiteOptions options;
  options.seed = c.seed;
  options.green_fault = c.kernel_fault;
  options.monte_carlo = c.kernel_monte_carlo;
  options.identity_samples = c.samples;
  const auto checks = kernel_checks(options);
  if (progress) progress({checks.size(), checks.size()});

  ExperimentReport report;
  report.experiment = c.experiment;
  json records = json::array();
  for (const auto& check : checks) {
    records.push_back({{"check", check.check},
                       {"n", check.n},
                       {"max_residual", check.max_residual},
                       {"tolerance", check.tolerance},
                       {"pass", check.pass}});
    ResultRow row;
    row.params = {{"check", check.check}, {"tolerance", check.tolerance}};
    row.estimate = {check.max_residual, 0.0, check.n, 0};
    row.target = 0.0;
    report.rows.push_back(row);
    report.gates.push_back(gate(check.check, check.max_residual, check.tolerance, check.pass));
  }
  report.extra["records"] = records;
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& c, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  switch (c.experiment) {
    case ExperimentKind::hull_area: report = run_hull_area(c, progress); break;
    case ExperimentKind::height_gap: report = run_height_gap(c, progress); break;
    case ExperimentKind::lambda0_ratio: report = run_lambda0_ratio(c, progress); break;
    case ExperimentKind::loop_functionals: report = run_loop_functionals(c, progress); break;
    case ExperimentKind::reflection_check: report = run_reflection_check(c, progress); break;
    case ExperimentKind::green_hitting: report = run_green_hitting(c, progress); break;
    case ExperimentKind::kernel_suite: report = run_kernel_suite(c, progress); break;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---- output --------------------------------------------------------------------------------

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "experiment,param_json,n,mean,stderr,target,rel_err\n";
  const std::string name = to_string(report.experiment);
  for (const auto& row : report.rows) {
    out << name << ',' << csv_quote(row.params.dump()) << ',' << row.estimate.n << ','
        << format_number(row.estimate.mean) << ',' << format_number(row.estimate.std_error) << ','
        << format_number(row.target) << ',' << format_number(row.rel_err()) << '\n';
  }
}

json summary_json(const ExperimentConfig& config, const ExperimentReport& report) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"params", row.params},
                    {"n", row.estimate.n},
                    {"batches", row.estimate.batches},
                    {"mean", finite_or_null(row.estimate.mean)},
                    {"stderr", finite_or_null(row.estimate.std_error)},
                    {"target", row.target},
                    {"rel_err", finite_or_null(row.rel_err())}});
  }
  json gates = json::array();
  for (const auto& g : report.gates) {
    gates.push_back({{"name", g.name},
                     {"value", finite_or_null(g.value)},
                     {"tolerance", g.tolerance},
                     {"pass", g.pass},
                     {"detail", g.detail}});
  }
  return {{"experiment", to_string(report.experiment)},
          {"config", to_json(config)},
          {"rows", rows},
          {"gates", gates},
          {"passed", report.passed()},
          {"extra", report.extra},
          {"seconds", report.seconds}};
}

}  // namespace bmgap
