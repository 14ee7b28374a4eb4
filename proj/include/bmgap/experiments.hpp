#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bmgap/errors.hpp"
#include "bmgap/stats.hpp"

namespace bmgap {

enum class ExperimentKind {
  hull_area,
  height_gap,
  lambda0_ratio,
  loop_functionals,
  reflection_check,
  green_hitting,
  kernel_suite,
};

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_string(const std::string& name);
std::vector<std::string> experiment_names();

struct GreenPair {
  Point x;
  Point y;
};

/// Validated run configuration. Keys of the JSON document match the field names.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::hull_area;
  std::size_t samples = 500;
  double grid_h = 1.0 / 512.0;
  double dt = 1.0 / (512.0 * 512.0);  // defaults to grid_h^2
  std::vector<double> eps_list{0.04, 0.02, 0.01};
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string output_path;
  /// 0 selects default_batches(samples).
  std::size_t batches = 0;

  // hull_area, height_gap
  bool random_rotation = true;
  /// When set, height_gap replaces every sample's occupation with this constant density.
  std::optional<double> synthetic_density;

  // lambda0_ratio, loop_functionals
  double loop_eps = 1e-3;
  double t_max = 1.0;
  std::size_t loop_steps = 131072;
  std::vector<double> t_max_list{0.25, 0.5, 1.0, 2.0};

  // reflection_check
  std::vector<double> reflection_a{0.25, 0.5, 1.0};
  std::vector<double> reflection_t{0.5, 1.0, 2.0};
  std::size_t reflection_steps = 64;

  // green_hitting
  std::vector<GreenPair> green_pairs{{Point(0.0, 0.0), Point(0.5, 0.0)}, {Point(0.3, 0.0), Point(-0.3, 0.0)}};
  double green_r = 1e-3;
  double hitting_dt = 1e-2;

  // kernel_suite
  double kernel_fault = 0.0;
  bool kernel_monte_carlo = true;
};

/// Parses a JSON document, fills defaults and checks every invariant. All violations
/// are collected into a single ConfigError.
ExperimentConfig parse_config(const std::string& text);

/// Invariant violations of an already-built config (empty when valid).
std::vector<std::string> validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

/// One CSV row: an estimate of some quantity against its target.
struct ResultRow {
  nlohmann::json params;
  Estimate estimate;
  double target = 0.0;
  double rel_err() const;
};

struct Gate {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentKind experiment = ExperimentKind::hull_area;
  std::vector<ResultRow> rows;
  std::vector<Gate> gates;
  nlohmann::json extra = nlohmann::json::object();
  /// Optional per-sample table (header first) for debugging.
  std::vector<std::string> sample_table;
  double seconds = 0.0;

  bool passed() const;
};

/// Progress message sent from a worker to the controller after each finished sample.
struct Progress {
  std::size_t done = 0;
  std::size_t total = 0;
};
using ProgressFn = std::function<void(const Progress&)>;

ExperimentReport run_hull_area(const ExperimentConfig& config, const ProgressFn& progress = {});
ExperimentReport run_height_gap(const ExperimentConfig& config, const ProgressFn& progress = {});
ExperimentReport run_lambda0_ratio(const ExperimentConfig& config, const ProgressFn& progress = {});
ExperimentReport run_loop_functionals(const ExperimentConfig& config, const ProgressFn& progress = {});
ExperimentReport run_reflection_check(const ExperimentConfig& config, const ProgressFn& progress = {});
ExperimentReport run_green_hitting(const ExperimentConfig& config, const ProgressFn& progress = {});
ExperimentReport run_kernel_suite(const ExperimentConfig& config, const ProgressFn& progress = {});

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// CSV with header `experiment,param_json,n,mean,stderr,target,rel_err`.
void write_csv(std::ostream& out, const ExperimentReport& report);
/// Summary document: config, rows, gates, extra metadata.
nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentReport& report);

/// Kernel-suite record `{check, n, max_residual, tolerance, pass}`.
struct KernelCheck {
  std::string check;
  std::size_t n = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct KernelSuiteOptions {
  std::uint64_t seed = 1;
  double green_fault = 0.0;
  bool monte_carlo = true;
  std::size_t identity_samples = 100000;
};

std::vector<KernelCheck> kernel_checks(const KernelSuiteOptions& options);

/// P(max of a one-dimensional Brownian bridge of duration t exceeds a), estimated from
/// the coordinate of sample_bridge paths with the exact per-step crossing probability.
/// Per-path values are conditional probabilities in [0, 1].
std::vector<double> bridge_max_exceedance(double a, double t, std::size_t n, std::size_t steps,
                                          std::uint64_t seed, std::uint64_t stream_base);

/// Runs task(i) for i in [0, n) on `workers` threads. Results come back in index order;
/// the controller thread receives a message per finished sample. The first exception
/// thrown by a task is rethrown after all workers stop.
template <class Result>
std::vector<Result> parallel_samples(std::size_t n, std::size_t workers, const std::function<Result(std::size_t)>& task,
                                     const ProgressFn& progress);

}  // namespace bmgap

#include "bmgap/detail/parallel.hpp"
