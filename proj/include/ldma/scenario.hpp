// SPDX-License-Identifier: Apache-2.0
//
// Experiment description parsed from a JSON document. Unknown keys are
// rejected with ConfigError.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldma/array_geometry.hpp"
#include "ldma/channel_model.hpp"
#include "ldma/precoding.hpp"

namespace ldma {

enum class ScenarioKind { correlation_sweep, linear_bound, linear_multipath, uniform_cell };

enum class PrecoderMethod { zf, wmmse, fully_digital_zf, sdma_dft_zf, sdma_dft_wmmse };

enum class DistanceSampling { uniform, inverse };

std::string to_string(ScenarioKind kind);
std::string to_string(PrecoderMethod method);

struct ArraySpec {
  int num_antennas = 256;
  /// Zero selects half-wavelength spacing.
  double element_spacing = 0.0;
  double carrier_frequency = 30e9;
  double propagation_speed = kNominalPropagationSpeed;

  ArrayConfig make() const;
  ArrayConfig make(int num_antennas) const;
};

struct UserRegion {
  double min_angle = 0.0;
  double max_angle = 0.0;
  double min_distance = 4.0;
  double max_distance = 100.0;
  DistanceSampling distance_sampling = DistanceSampling::uniform;
};

struct CodebookSpec {
  /// "dft" or "polar"
  std::string kind = "polar";
  double coherence_target = 0.5;
  /// Defaults to the user region's minimum distance.
  std::optional<double> min_distance;
};

struct CorrelationSweepSpec {
  std::vector<int> antenna_grid = {64, 128, 192, 256, 320, 384, 448, 512,
                                   576, 640, 704, 768, 832, 896, 960, 1024};
  double distance_a = 5.0;
  double angle_a = kPi / 6.0;
  double distance_b = 15.0;
  double angle_b = kPi / 6.0;
};

struct LinearBoundSpec {
  int k_max = 14;
  int exhaustive_grid = 60;
  int exhaustive_max_users = 6;
  int placement_grid_points = 400;
  int placement_passes = 10;
};

struct ScenarioConfig {
  std::string id;
  ScenarioKind scenario_kind = ScenarioKind::correlation_sweep;
  ArraySpec array;
  int num_users = 1;
  double total_power = 1.0;
  std::optional<std::vector<double>> power_allocation;
  std::optional<double> kappa;
  int num_nlos = 0;
  UserRegion user_region;
  ScatterRegion scatter_region;
  std::vector<double> snr_grid = {0.0};
  int num_trials = 1;
  std::uint64_t seed = 1;
  std::vector<PrecoderMethod> precoders;
  CodebookSpec codebook;
  double pilot_noise_variance = 0.0;
  WmmseOptions wmmse;
  CorrelationSweepSpec correlation;
  LinearBoundSpec linear_bound;

  /// System configuration for one SNR point (P / sigma^2 in dB).
  SystemConfig system_at(double snr_db) const;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses and validates. Throws ConfigError.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

/// Canonical JSON echo of the resolved configuration.
std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace ldma
