#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bmgap/experiments.hpp"
#include "bmgap/hull.hpp"
#include "bmgap/kernels.hpp"
#include "bmgap/occupation.hpp"
#include "bmgap/path.hpp"

using namespace bmgap;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kHullAreaLo = 0.609;
constexpr double kHullAreaHi = 0.648;
constexpr double kGapSmallestTol = 0.10;
constexpr double kGapExtrapolatedTol = 0.05;
constexpr double kSyntheticTol = 1e-9;
constexpr double kLambdaTol = 0.05;
constexpr double kIdentitySigmas = 3.0;
constexpr double kScalingFactor = 2.0;
constexpr double kReflectionMaxZ = 3.5;
constexpr double kGreenTol = 0.10;
constexpr double kConservationTol = 1e-12;
constexpr double kMinkowskiTol = 0.15;
constexpr double kAssumptionFactor = 2.0;
constexpr double kRefinementSigmas = 2.0;

// Runtime budgets in seconds.
constexpr double kBudgetHullArea = 600;
constexpr double kBudgetHeightGap = 1800;
constexpr double kBudgetLambda = 1200;
constexpr double kBudgetKernels = 60;
constexpr double kBudgetIdentity = 120;
constexpr double kBudgetScaling = 60;
constexpr double kBudgetReflection = 120;
constexpr double kBudgetGreen = 300;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(double v, int digits = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, v);
  return buffer;
}

ExperimentConfig config(const std::string& json) { return parse_config(json); }

const Gate& find_gate(const ExperimentReport& report, const std::string& name) {
  for (const auto& g : report.gates) {
    if (g.name == name) return g;
  }
  throw std::runtime_error("missing gate " + name);
}

std::string csv_of(const ExperimentReport& report) {
  std::ostringstream out;
  write_csv(out, report);
  return out.str();
}

// Results shared between criteria.
struct Shared {
  std::optional<ExperimentReport> hull_area;
  std::optional<ExperimentReport> height_gap;
};
Shared shared;

std::vector<KernelCheck> kernel_results(bool monte_carlo) {
  KernelSuiteOptions options;
  options.monte_carlo = monte_carlo;
  options.identity_samples = 100000;
  return kernel_checks(options);
}

Outcome criterion_hull_area() {
  Outcome out;
  shared.hull_area = run_hull_area(config(R"({"experiment": "hull_area"})"));
  const auto& row = shared.hull_area->rows.at(0);
  out.require(row.estimate.mean >= kHullAreaLo && row.estimate.mean <= kHullAreaHi,
              "mean area " + fmt(row.estimate.mean) + " +- " + fmt(row.estimate.std_error, 2) + " in [" +
                  fmt(kHullAreaLo) + ", " + fmt(kHullAreaHi) + "]");
  return out;
}

Outcome criterion_height_gap() {
  Outcome out;
  shared.height_gap = run_height_gap(config(R"({"experiment": "height_gap", "samples": 1000,
                                                "grid_h": 0.0009765625, "eps_list": [0.04, 0.02, 0.01]})"));
  const auto& report = *shared.height_gap;
  std::string levels;
  for (const auto& row : report.rows) {
    levels += (levels.empty() ? "" : ", ") + (row.params.contains("eps") ? "eps " + fmt(row.params["eps"].get<double>()) : std::string("extrapolated")) +
              ": " + fmt(row.estimate.mean, 5) + " +- " + fmt(row.estimate.std_error, 2);
  }
  out.detail = levels;
  const auto& monotone = find_gate(report, "deviation_shrinks_monotonically");
  out.require(monotone.pass, "deviation from 5/pi shrinks monotonically (" + monotone.detail + ")");
  const auto& smallest = find_gate(report, "smallest_eps_within_10pct");
  out.require(smallest.value <= kGapSmallestTol, "smallest eps rel err " + fmt(smallest.value, 3) + " <= " + fmt(kGapSmallestTol));
  const auto& extrapolated = find_gate(report, "extrapolated_within_5pct");
  out.require(extrapolated.value <= kGapExtrapolatedTol,
              "extrapolated rel err " + fmt(extrapolated.value, 3) + " <= " + fmt(kGapExtrapolatedTol));

  const auto synthetic = run_height_gap(config(R"({"experiment": "height_gap", "samples": 16,
                                                    "synthetic_density": 1.5915494309189535})"));
  double worst = 0.0;
  for (const auto& row : synthetic.rows) worst = std::max(worst, std::abs(row.estimate.mean - 5.0 / kPi));
  out.require(worst <= kSyntheticTol, "synthetic injection error " + fmt(worst, 2) + " <= " + fmt(kSyntheticTol));
  return out;
}

Outcome criterion_lambda0() {
  Outcome out;
  const auto report = run_lambda0_ratio(config(R"({"experiment": "lambda0_ratio", "samples": 20000, "loop_eps": 0.001})"));
  for (const auto& [gate_name, label] : std::vector<std::pair<std::string, std::string>>{
           {"ratio_within_5pct", "ratio vs 5/pi"},
           {"numerator_within_5pct", "numerator/|log eps| vs 1/pi"},
           {"denominator_within_5pct", "denominator/|log eps| vs 1/5"}}) {
    const auto& g = find_gate(report, gate_name);
    out.require(g.value <= kLambdaTol, label + " rel err " + fmt(g.value, 3) + " (" + g.detail + ")");
  }
  return out;
}

Outcome criterion_kernels() {
  Outcome out;
  std::size_t checked = 0;
  for (const auto& c : kernel_results(false)) {
    if (c.check.rfind("hull_map_scaling", 0) == 0) continue;
    ++checked;
    if (!c.pass) out.require(false, c.check + " residual " + fmt(c.max_residual, 3) + " > " + fmt(c.tolerance, 3));
  }
  out.require(checked > 0, std::to_string(checked) + " analytic identities checked");
  return out;
}

Outcome criterion_identity() {
  Outcome out;
  std::size_t checked = 0;
  for (const auto& c : kernel_results(true)) {
    if (c.check.rfind("imaginary_identity", 0) != 0 || c.check == "imaginary_identity_empty_hull") continue;
    ++checked;
    // The suite's tolerance is 3 standard errors of the exit-height mean.
    out.require(c.pass && c.n >= 100000, c.check + " |residual| " + fmt(c.max_residual, 3) + " vs " +
                                             fmt(kIdentitySigmas) + " se = " + fmt(c.tolerance, 3) + ", n " +
                                             std::to_string(c.n));
  }
  out.require(checked == 2, std::to_string(checked) + " slit kinds");
  return out;
}

Outcome criterion_scaling() {
  Outcome out;
  const auto rows = hull_map_scaling_check({0.1, 0.05, 0.025, 0.0125});
  std::string table;
  for (const auto& row : rows) {
    table += (table.empty() ? "" : ", ") + fmt(row.eps) + ": " + fmt(row.ratio, 4);
    if (row.ratio > kScalingFactor * rows.front().ratio) out.pass = false;
  }
  out.require(out.pass, "ratio table {" + table + "} bounded by " + fmt(kScalingFactor) + "x its eps = 0.1 value");
  return out;
}

Outcome criterion_reflection() {
  Outcome out;
  const auto report = run_reflection_check(config(R"({"experiment": "reflection_check", "samples": 100000})"));
  double worst = 0.0;
  for (const auto& row : report.rows) {
    worst = std::max(worst, std::abs(row.estimate.mean - row.target) / row.estimate.std_error);
  }
  out.require(report.rows.size() == 9, std::to_string(report.rows.size()) + " grid points");
  out.require(worst < kReflectionMaxZ, "max |z| " + fmt(worst, 3) + " < " + fmt(kReflectionMaxZ));
  return out;
}

Outcome criterion_green() {
  Outcome out;
  const auto report = run_green_hitting(config(R"({"experiment": "green_hitting", "samples": 200000, "green_r": 0.001})"));
  for (const auto& row : report.rows) {
    const double err = std::abs(row.rel_err());
    out.require(err <= kGreenTol, "pair " + row.params["x"].dump() + " -> " + row.params["y"].dump() + ": " +
                                      fmt(row.estimate.mean, 5) + " vs " + fmt(row.target, 5) + " rel err " + fmt(err, 3));
  }
  out.require(report.rows.size() == 2, std::to_string(report.rows.size()) + " pairs");
  return out;
}

Outcome criterion_properties() {
  Outcome out;

  // Conservation and Minkowski content against time binning, BM of duration 1 at h = r/4.
  {
    const double r = 1e-3;
    const double h = r / 4.0;
    double worst_conservation = 0.0;
    double worst_agreement = 0.0;
    bool trend = true;
    std::string values;
    for (std::uint64_t s = 0; s < 3; ++s) {
      RngStream rng(2024, s);
      const Path path = sample_bm(1.0, h * h, 0.0, rng);
      const GridSpec grid = grid_for(path, h);
      const auto field = occupation_grid(path, grid);
      const double binned = field.total();
      worst_conservation = std::max(worst_conservation, std::abs(binned - 1.0));
      const auto estimates = minkowski_estimate(rasterize(path, grid), {4 * r, 2 * r, r});
      double previous = std::abs(estimates.front().second - binned);
      for (const auto& [radius, value] : estimates) {
        const double gap = std::abs(value - binned);
        trend = trend && gap <= previous;
        previous = gap;
      }
      const double rel = std::abs(estimates.back().second - binned) / binned;
      worst_agreement = std::max(worst_agreement, rel);
      values += (values.empty() ? "" : ", ") + fmt(estimates.back().second, 4);
    }
    out.require(worst_conservation <= kConservationTol, "conservation error " + fmt(worst_conservation, 2));
    out.require(worst_agreement <= kMinkowskiTol,
                "Minkowski(r = 1e-3) {" + values + "} vs binning 1, worst rel err " + fmt(worst_agreement, 3));
    out.detail += trend ? " (gap shrinks as r decreases)" : " (gap not monotone in r)";
  }

  // Band monotonicity and nesting on bridge hulls.
  {
    bool monotone = true;
    bool nested = true;
    const double h = 1.0 / 512.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      RngStream rng(2025, s);
      const Path path = sample_bridge(1.0, 0.0, h * h, rng);
      const auto hull = outer_decompose(rasterize(path, grid_for(path, h)));
      Band previous = boundary_band(hull, 4 * h);
      for (const double eps : {0.01, 0.02, 0.04, 0.08, 0.16}) {
        Band band = boundary_band(hull, eps);
        monotone = monotone && band.area >= previous.area && band.area <= hull.area + 1e-15;
        for (std::size_t i = 0; i < band.mask.cells.size(); ++i) {
          if (previous.mask.cells[i] && !band.mask.cells[i]) nested = false;
        }
        previous = std::move(band);
      }
    }
    out.require(monotone && nested, "band area monotone and bands nested in eps");
  }

  // Byte-identical output across worker counts.
  {
    auto c = config(R"({"experiment": "height_gap", "samples": 24, "seed": 3})");
    const auto one = run_height_gap(c);
    c.workers = 4;
    const auto four = run_height_gap(c);
    out.require(csv_of(one) == csv_of(four) && one.sample_table == four.sample_table,
                "height_gap output identical for 1 and 4 workers");
  }

  // Assumption integral bounded along the default test-function family on the disc.
  {
    const double h = 1.0 / 512.0;
    std::vector<Vertex> v;
    for (int k = 0; k <= 20000; ++k) v.push_back({static_cast<double>(k), std::polar(1.0, 2.0 * kPi * (k % 20000) / 20000.0)});
    const Path circle(std::move(v));
    const auto hull = outer_decompose(rasterize(circle, grid_for(circle, h)));
    for (const auto& make : std::vector<std::function<TestFunctionSpec(double)>>{TestFunctionSpec::uniform, TestFunctionSpec::sine_bump}) {
      std::vector<double> full;
      for (const double eps : {0.04, 0.02, 0.01}) full.push_back(assumption_integral(make(eps), hull, 0.0).full);
      const auto [lo, hi] = std::minmax_element(full.begin(), full.end());
      out.require(*hi <= kAssumptionFactor * *lo, make(0.04).profile_name + " full {" + fmt(full[0], 4) + ", " +
                                                       fmt(full[1], 4) + ", " + fmt(full[2], 4) + "} within factor " +
                                                       fmt(kAssumptionFactor));
    }
    double previous = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (const double delta : {0.5, 0.1, 0.02, 0.004}) {
      const double near = assumption_integral(TestFunctionSpec::uniform(0.01), hull, delta).near_diagonal;
      decreasing = decreasing && near <= previous;
      previous = near;
    }
    out.require(decreasing, "near-diagonal part decreases with delta");
  }
  return out;
}

// Halving the grid side (dt = grid_h^2 throughout) moves estimates by less than
// kRefinementSigmas combined standard errors.
Outcome supplementary_refinement() {
  Outcome out;
  if (!shared.hull_area) shared.hull_area = run_hull_area(config(R"({"experiment": "hull_area"})"));
  const auto fine = run_hull_area(config(R"({"experiment": "hull_area", "grid_h": 0.0009765625})"));
  const auto& a = shared.hull_area->rows.at(0).estimate;
  const auto& b = fine.rows.at(0).estimate;
  const double se = std::hypot(a.std_error, b.std_error);
  out.require(std::abs(a.mean - b.mean) <= kRefinementSigmas * se,
              "hull area h=1/512 " + fmt(a.mean, 5) + " vs h=1/1024 " + fmt(b.mean, 5) + " (se " + fmt(se, 2) + ")");

  if (!shared.height_gap) {
    shared.height_gap = run_height_gap(config(R"({"experiment": "height_gap", "samples": 1000,
                                                  "grid_h": 0.0009765625})"));
  }
  const auto coarse = run_height_gap(config(R"({"experiment": "height_gap", "samples": 1000})"));
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& c = coarse.rows.at(k).estimate;
    const auto& f = shared.height_gap->rows.at(k).estimate;
    const double s = std::hypot(c.std_error, f.std_error);
    out.require(std::abs(c.mean - f.mean) <= kRefinementSigmas * s,
                "band ratio eps " + coarse.rows[k].params["eps"].dump() + " h=1/512 " + fmt(c.mean, 5) + " vs h=1/1024 " +
                    fmt(f.mean, 5) + " (se " + fmt(s, 2) + ")");
  }
  return out;
}

struct Criterion {
  std::string id;
  std::string name;
  double budget;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"1", "bridge hull area", kBudgetHullArea, criterion_hull_area},
      {"2", "height gap", kBudgetHeightGap, criterion_height_gap},
      {"3", "lambda0 ratio", kBudgetLambda, criterion_lambda0},
      {"4", "kernel suite", kBudgetKernels, criterion_kernels},
      {"5", "imaginary part identity", kBudgetIdentity, criterion_identity},
      {"6", "hull map scaling", kBudgetScaling, criterion_scaling},
      {"7", "reflection principle", kBudgetReflection, criterion_reflection},
      {"8", "Green hitting", kBudgetGreen, criterion_green},
      {"9", "property suite", 0, criterion_properties},
      {"R", "grid refinement (supplementary)", 0, supplementary_refinement},
  };
  std::set<std::string> selected(argv + 1, argv + argc);

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget > 0) outcome.require(seconds <= c.budget, "runtime " + fmt(seconds, 3) + " s <= " + fmt(c.budget) + " s");
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %s %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(),
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
