// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ldma/codebook.hpp"
#include "ldma/harness.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

int execute(const ldma::ScenarioConfig& cfg, const std::string& out_dir, int workers) {
  const auto start = std::chrono::steady_clock::now();
  const ldma::RunResult result = ldma::run_scenario(cfg, {workers});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string csv_name = cfg.id + ".csv";
  write_file(fs::path(out_dir) / csv_name, ldma::to_csv(result));
  write_file(fs::path(out_dir) / (cfg.id + ".manifest.json"),
             ldma::run_manifest(cfg, wall, workers, csv_name));
  std::cout << (fs::path(out_dir) / csv_name).string() << "  rows=" << result.rows.size()
            << "  wall=" << wall << "s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field location division multiple access simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int workers = 1;

  auto* run = app.add_subcommand("run", "Run a scenario and write CSV + manifest");
  run->add_option("config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--trials", trials, "Override the number of trials");
  run->add_option("--workers", workers, "Worker threads (0 = all cores)")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  std::string validate_path;
  validate->add_option("config", validate_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep-correlation", "Exact vs Fresnel-approximate correlation over N");
  ldma::ScenarioConfig sweep_cfg;
  sweep_cfg.id = "correlation_sweep";
  sweep_cfg.scenario_kind = ldma::ScenarioKind::correlation_sweep;
  std::string sweep_out = "results";
  sweep->add_option("--id", sweep_cfg.id)->capture_default_str();
  sweep->add_option("--antennas", sweep_cfg.correlation.antenna_grid, "Antenna counts")->delimiter(',');
  sweep->add_option("--frequency", sweep_cfg.array.carrier_frequency, "Carrier frequency [Hz]")->capture_default_str();
  sweep->add_option("--spacing", sweep_cfg.array.element_spacing, "Element spacing [m], 0 = half wavelength");
  sweep->add_option("--distance-a", sweep_cfg.correlation.distance_a)->capture_default_str();
  sweep->add_option("--angle-a", sweep_cfg.correlation.angle_a)->capture_default_str();
  sweep->add_option("--distance-b", sweep_cfg.correlation.distance_b)->capture_default_str();
  sweep->add_option("--angle-b", sweep_cfg.correlation.angle_b)->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();

  auto* codebook = app.add_subcommand("codebook", "Codebook utilities");
  codebook->require_subcommand(1);
  auto* build = codebook->add_subcommand("build", "Build a DFT or polar codebook and write it as JSON");
  std::string cb_kind = "polar";
  int cb_antennas = 256;
  double cb_frequency = 30e9;
  double cb_spacing = 0.0;
  double cb_r_min = 4.0;
  double cb_coherence = 0.5;
  std::string cb_out;
  build->add_option("--kind", cb_kind)->check(CLI::IsMember({"dft", "polar"}))->capture_default_str();
  build->add_option("--antennas", cb_antennas)->capture_default_str();
  build->add_option("--frequency", cb_frequency)->capture_default_str();
  build->add_option("--spacing", cb_spacing, "0 = half wavelength");
  build->add_option("--r-min", cb_r_min)->capture_default_str();
  build->add_option("--coherence", cb_coherence)->capture_default_str();
  build->add_option("--out", cb_out, "Output JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      ldma::ScenarioConfig cfg = ldma::load_scenario(config_path);
      if (seed) {
        cfg.seed = *seed;
      }
      if (trials) {
        cfg.num_trials = *trials;
      }
      cfg.validate();
      return execute(cfg, out_dir, workers);
    }
    if (*validate) {
      const ldma::ScenarioConfig cfg = ldma::load_scenario(validate_path);
      std::cout << cfg.id << ": ok (" << ldma::to_string(cfg.scenario_kind) << ")\n";
      return 0;
    }
    if (*sweep) {
      sweep_cfg.validate();
      return execute(sweep_cfg, sweep_out, 1);
    }
    if (*build) {
      ldma::ArraySpec spec;
      spec.num_antennas = cb_antennas;
      spec.carrier_frequency = cb_frequency;
      spec.element_spacing = cb_spacing;
      const ldma::ArrayConfig array = spec.make();
      const ldma::Codebook cb = cb_kind == "dft" ? ldma::build_dft_codebook(array)
                                                 : ldma::build_polar_codebook(array, cb_r_min, cb_coherence);
      write_file(cb_out, ldma::codebook_to_json(cb));
      std::cout << cb_out << "  size=" << cb.size() << "\n";
      return 0;
    }
  } catch (const ldma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ldma::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
