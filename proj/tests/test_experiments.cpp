#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"

#include "bmgap/experiments.hpp"

using namespace bmgap;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& violations, const std::string& a, const std::string& b = "") {
  return std::any_of(violations.begin(), violations.end(), [&](const std::string& v) {
    return v.find(a) != std::string::npos && v.find(b) != std::string::npos;
  });
}

std::string csv_of(const ExperimentReport& report) {
  std::ostringstream out;
  write_csv(out, report);
  return out.str();
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto c = parse_config(R"({"experiment": "hull_area"})");
  CHECK(c.experiment == ExperimentKind::hull_area);
  CHECK(c.samples == 500);
  CHECK(c.grid_h == 1.0 / 512.0);
  CHECK(c.dt == c.grid_h * c.grid_h);
  CHECK(c.eps_list == std::vector<double>{0.04, 0.02, 0.01});
  CHECK(c.workers == 1);
  CHECK(validate(c).empty());

  const auto coarse = parse_config(R"({"experiment": "height_gap", "grid_h": 0.01, "eps_list": [0.1, 0.05]})");
  CHECK(coarse.dt == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(parse_config(R"({"experiment": "lambda0_ratio"})").samples == 20000);
}

TEST_CASE("config round-trips through JSON") {
  const auto c = parse_config(R"({"experiment": "green_hitting", "samples": 64, "seed": 9,
                                  "green_pairs": [[0.1, 0.0, 0.0, 0.4]], "green_r": 0.002})");
  const auto again = parse_config(to_json(c).dump());
  CHECK(to_json(again) == to_json(c));
  REQUIRE(again.green_pairs.size() == 1);
  CHECK(again.green_pairs[0].y == Point(0.0, 0.4));
}

TEST_CASE("config violations name the offending fields") {
  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "grid_h": 0.01, "dt": 0.001})"), "dt", "grid_h"));

  const auto unknown = violations_of(R"({"experiment": "foo"})");
  CHECK(mentions(unknown, "foo"));
  for (const auto& name : experiment_names()) CHECK(mentions(unknown, name));

  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "samples": 0})"), "samples must be positive"));
  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "samples": 4})"), "samples", "batch"));
  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "eps_list": [0.01, 0.02]})"), "strictly decreasing"));
  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "eps_list": [0.001]})"), "0.001", "4*grid_h"));
  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "colour": 1})"), "colour"));
  CHECK(mentions(violations_of(R"({})"), "experiment is required"));
  CHECK(mentions(violations_of(R"({"experiment": "hull_area", "samples": -3})"), "samples", "nonnegative integer"));
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("all violations are reported together") {
  const auto v = violations_of(R"({"experiment": "hull_area", "samples": 0, "workers": 0, "green_r": -1, "bogus": true})");
  CHECK(v.size() >= 4);
  CHECK(mentions(v, "samples"));
  CHECK(mentions(v, "workers"));
  CHECK(mentions(v, "green_r"));
  CHECK(mentions(v, "bogus"));
}

TEST_CASE("synthetic constant density is recovered exactly") {
  auto c = parse_config(R"({"experiment": "height_gap", "samples": 8, "grid_h": 0.015625,
                            "eps_list": [0.2, 0.1, 0.0625], "synthetic_density": 2.5})");
  const auto report = run_height_gap(c);
  REQUIRE(report.rows.size() == 3);
  for (const auto& row : report.rows) CHECK(std::abs(row.estimate.mean - 2.5) <= 1e-9);
  REQUIRE(report.gates.size() == 1);
  CHECK(report.gates[0].name == "synthetic_identity");
  CHECK(report.passed());
}

TEST_CASE("results do not depend on the worker count") {
  auto c = parse_config(R"({"experiment": "hull_area", "samples": 12, "grid_h": 0.0078125, "seed": 5,
                            "eps_list": [0.1, 0.05]})");
  const auto one = run_hull_area(c);
  c.workers = 3;
  const auto three = run_hull_area(c);
  CHECK(csv_of(one) == csv_of(three));
  CHECK(one.sample_table == three.sample_table);

  auto g = parse_config(R"({"experiment": "height_gap", "samples": 10, "grid_h": 0.0078125,
                            "eps_list": [0.1, 0.05], "seed": 6})");
  const auto a = run_height_gap(g);
  g.workers = 4;
  CHECK(csv_of(a) == csv_of(run_height_gap(g)));
}

TEST_CASE("progress reaches the total") {
  auto c = parse_config(R"({"experiment": "hull_area", "samples": 9, "grid_h": 0.015625, "workers": 2,
                            "eps_list": [0.1]})");
  std::size_t calls = 0;
  Progress last;
  run_hull_area(c, [&](const Progress& p) {
    ++calls;
    last = p;
  });
  CHECK(calls == 9);
  CHECK(last.done == 9);
  CHECK(last.total == 9);
}

TEST_CASE("standard error shrinks like one over root n") {
  auto c = parse_config(R"({"experiment": "hull_area", "samples": 512, "grid_h": 0.015625, "batches": 32,
                            "eps_list": [0.1]})");
  const double small = run_hull_area(c).rows[0].estimate.std_error;
  c.samples = 1024;
  const double large = run_hull_area(c).rows[0].estimate.std_error;
  const double ratio = large / small;
  CHECK(ratio >= 0.6);
  CHECK(ratio <= 0.85);
}

TEST_CASE("kernel suite records and fault injection") {
  auto c = parse_config(R"({"experiment": "kernel_suite", "kernel_monte_carlo": false})");
  const auto clean = run_kernel_suite(c);
  CHECK(clean.passed());
  CHECK(clean.extra["records"].size() == clean.rows.size());
  CHECK(clean.gates.size() == clean.rows.size());

  c.kernel_fault = 1e-6;
  const auto faulty = run_kernel_suite(c);
  CHECK(!faulty.passed());
  bool covariance_failed = false;
  for (const auto& g : faulty.gates) {
    if (g.name.find("conformal") != std::string::npos && !g.pass) covariance_failed = true;
  }
  CHECK(covariance_failed);
}

TEST_CASE("bridge maximum exceedance edge cases") {
  for (const double v : bridge_max_exceedance(0.0, 1.0, 200, 16, 1, 0)) CHECK(v == 1.0);
  double mean = 0.0;
  const auto far = bridge_max_exceedance(10.0, 1.0, 2000, 16, 1, 0);
  for (const double v : far) mean += v / static_cast<double>(far.size());
  CHECK(mean <= 1e-6);
}

TEST_CASE("reflection check passes at small sample size") {
  auto c = parse_config(R"({"experiment": "reflection_check", "samples": 4000, "reflection_a": [0.5],
                            "reflection_t": [1.0]})");
  const auto report = run_reflection_check(c);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].target == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(report.passed());
}

TEST_CASE("runner rejects a mismatched experiment") {
  const auto c = parse_config(R"({"experiment": "hull_area", "samples": 8})");
  CHECK_THROWS_AS(run_height_gap(c), InvalidArgument);
}
