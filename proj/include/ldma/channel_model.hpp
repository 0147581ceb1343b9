// SPDX-License-Identifier: Apache-2.0
//
// Far-field steering vectors, near-field focusing vectors and Rician
// multipath channels.
#pragma once

#include <vector>

#include "ldma/array_geometry.hpp"
#include "ldma/rng.hpp"
#include "ldma/types.hpp"

namespace ldma {

enum class DistanceMode {
  exact,
  second_order,
  /// Drops the quadratic term; reproduces the steering vector. Test use only.
  first_order,
};

enum class ChannelModel { far, near };

/// (1/sqrt N) exp(j k n d sin(phi)) over centered offsets n.
CVector steering_vector(const ArrayConfig& cfg, double angle);

/// (1/sqrt N) exp(-j k (r_n - r)). Far-field locations (infinite distance)
/// return the steering vector.
CVector focusing_vector(const ArrayConfig& cfg, const Location& loc,
                        DistanceMode mode = DistanceMode::exact);

struct PathComponent {
  cdouble gain;
  Location location;
};

struct ChannelRealization {
  CVector h;
  /// paths[0] is the LoS path, the rest are NLoS.
  std::vector<PathComponent> paths;
  int num_nlos = 0;
  ChannelModel model = ChannelModel::near;
};

/// Region NLoS scatterers are drawn from, uniform in distance and angle.
struct ScatterRegion {
  double min_distance = 4.0;
  double max_distance = 100.0;
  double min_angle = -kPi / 3.0;
  double max_angle = kPi / 3.0;

  void validate() const;
};

/// sqrt(N) a0 v(p0) + sqrt(N/L) sum_l a_l v(p_l), with v the steering vector
/// (far) or exact focusing vector (near).
CVector reconstruct_channel(const ArrayConfig& cfg, const std::vector<PathComponent>& paths,
                            ChannelModel model);

/// Single deterministic path build: sqrt(N) * gain * v(loc).
ChannelRealization single_path_channel(const ArrayConfig& cfg, const Location& loc,
                                       cdouble gain, ChannelModel model = ChannelModel::near);

/// Rician far-field channel. NLoS angles are uniform over the region's
/// angle range. Throws ConfigError for L < 0, kappa < 0, or L = 0 with kappa = 0.
ChannelRealization sample_far_channel(const ArrayConfig& cfg, double los_angle, int num_nlos,
                                      double kappa, const ScatterRegion& region, Rng& rng);

/// Rician near-field channel with scatterers uniform over the region.
ChannelRealization sample_near_channel(const ArrayConfig& cfg, const Location& los_location,
                                       int num_nlos, double kappa, const ScatterRegion& region,
                                       Rng& rng);

}  // namespace ldma
