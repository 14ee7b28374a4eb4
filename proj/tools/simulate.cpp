#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bmgap/experiments.hpp"
#include "bmgap/hull.hpp"
#include "bmgap/path.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("malformed number '" + item + "' in --eps");
    out.push_back(v);
  }
  return out;
}

std::string summary_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

// Unrotated bridge of sample 0: its path as CSV and its hull as a graymap.
void dump_sample0(const bmgap::ExperimentConfig& config, const std::string& prefix) {
  bmgap::RngStream rng(config.seed, 0);
  const auto path = bmgap::sample_bridge(1.0, bmgap::Point(0.0, 0.0), config.dt, rng);
  std::ofstream csv(prefix + ".csv");
  path.write_csv(csv);
  const auto hull = bmgap::outer_decompose(bmgap::rasterize(path, bmgap::grid_for(path, config.grid_h)));
  std::ofstream pgm(prefix + ".pgm", std::ios::binary);
  bmgap::write_pgm(pgm, hull);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for planar Brownian hulls and occupation measures"};
  std::string experiment;
  std::string config_path;
  std::size_t samples = 0;
  double dt = 0.0;
  double grid_h = 0.0;
  std::string eps;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out;
  std::string samples_out;
  std::string dump_prefix;
  bool no_rotation = false;
  bool quiet = false;

  app.add_option("--experiment", experiment, "Experiment name")
      ->check(CLI::IsMember(bmgap::experiment_names()));
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* samples_opt = app.add_option("--samples", samples, "Monte Carlo sample count");
  auto* dt_opt = app.add_option("--dt", dt, "Time step");
  auto* grid_opt = app.add_option("--grid-h", grid_h, "Grid cell side");
  app.add_option("--eps", eps, "Comma-separated band widths, decreasing");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads (default: $BMGAP_WORKERS or 1)");
  app.add_option("--out", out, "CSV output path (summary JSON next to it); stdout if omitted");
  app.add_option("--samples-out", samples_out, "Per-sample CSV table");
  app.add_option("--dump-sample0", dump_prefix, "Write the unrotated bridge of sample 0 (.csv) and its hull mask (.pgm) under this prefix");
  app.add_flag("--no-rotation", no_rotation, "Disable per-sample random rotation");
  app.add_flag("--quiet", quiet, "No progress output");
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      try {
        doc = nlohmann::json::parse(read_file(config_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw bmgap::ConfigError({std::string("malformed config document: ") + e.what()});
      }
    }
    if (!experiment.empty()) doc["experiment"] = experiment;
    if (*samples_opt) doc["samples"] = samples;
    if (*grid_opt) {
      doc["grid_h"] = grid_h;
      if (!*dt_opt && !doc.contains("dt")) doc["dt"] = grid_h * grid_h;
    }
    if (*dt_opt) doc["dt"] = dt;
    if (!eps.empty()) doc["eps_list"] = parse_list(eps);
    if (*seed_opt) doc["seed"] = seed;
    if (*workers_opt) {
      doc["workers"] = workers;
    } else if (!doc.contains("workers")) {
      if (const char* env = std::getenv("BMGAP_WORKERS")) doc["workers"] = std::stoul(env);
    }
    if (!out.empty()) doc["output_path"] = out;
    if (no_rotation) doc["random_rotation"] = false;

    const auto config = bmgap::parse_config(doc.dump());

    bmgap::ProgressFn progress;
    std::size_t last_percent = 0;
    if (!quiet) {
      progress = [&](const bmgap::Progress& p) {
        const std::size_t percent = p.total ? 100 * p.done / p.total : 100;
        if (percent >= last_percent + 5 || p.done == p.total) {
          last_percent = percent;
          std::fprintf(stderr, "\r%s: %zu/%zu (%zu%%)", bmgap::to_string(config.experiment).c_str(), p.done,
                       p.total, percent);
          if (p.done == p.total) std::fputc('\n', stderr);
        }
      };
    }

    const auto report = bmgap::run_experiment(config, progress);
    const auto summary = bmgap::summary_json(config, report);

    if (config.output_path.empty()) {
      bmgap::write_csv(std::cout, report);
    } else {
      std::ofstream csv(config.output_path);
      if (!csv) throw std::runtime_error("cannot write " + config.output_path);
      bmgap::write_csv(csv, report);
      std::ofstream json_out(summary_path(config.output_path));
      json_out << summary.dump(2) << '\n';
    }
    if (!samples_out.empty()) {
      std::ofstream table(samples_out);
      for (const auto& line : report.sample_table) table << line << '\n';
    }
    if (!dump_prefix.empty()) dump_sample0(config, dump_prefix);

    for (const auto& g : report.gates) {
      std::fprintf(stderr, "[%s] %s: value %.6g, tolerance %.6g%s%s\n", g.pass ? "PASS" : "FAIL", g.name.c_str(),
                   g.value, g.tolerance, g.detail.empty() ? "" : ", ", g.detail.c_str());
    }
    return report.passed() ? 0 : 1;
  } catch (const bmgap::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
