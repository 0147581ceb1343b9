// SPDX-License-Identifier: Apache-2.0
#include "ldma/channel_model.hpp"

#include <cmath>

namespace ldma {

CVector steering_vector(const ArrayConfig& cfg, double angle) {
  const int n_ant = cfg.num_antennas();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_ant));
  const double step = cfg.wavenumber() * cfg.element_spacing() * std::sin(angle);
  CVector v(n_ant);
  for (int i = 0; i < n_ant; ++i) {
    v[i] = std::polar(scale, step * cfg.element_offset(i));
  }
  return v;
}

CVector focusing_vector(const ArrayConfig& cfg, const Location& loc, DistanceMode mode) {
  if (loc.is_far_field()) {
    return steering_vector(cfg, loc.angle());
  }
  const int n_ant = cfg.num_antennas();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_ant));
  const double k = cfg.wavenumber();
  const double r = loc.distance();
  const double s = std::sin(loc.angle());
  const double c = std::cos(loc.angle());
  CVector v(n_ant);
  for (int i = 0; i < n_ant; ++i) {
    const double nd = cfg.element_offset(i) * cfg.element_spacing();
    double delta = 0.0;  // r_n - r
    switch (mode) {
      case DistanceMode::exact: {
        // Rationalized to avoid cancellation when r >> nd.
        const double rn = std::sqrt(r * r + nd * nd - 2.0 * nd * r * s);
        delta = (nd * nd - 2.0 * nd * r * s) / (rn + r);
        break;
      }
      case DistanceMode::second_order:
        delta = -nd * s + nd * nd * c * c / (2.0 * r);
        break;
      case DistanceMode::first_order:
        delta = -nd * s;
        break;
    }
    v[i] = std::polar(scale, -k * delta);
  }
  return v;
}

void ScatterRegion::validate() const {
  if (!(min_distance > 0.0) || !(max_distance >= min_distance)) {
    throw ConfigError("scatter region: need 0 < min_distance <= max_distance");
  }
  if (!(min_angle > -0.5 * kPi) || !(max_angle < 0.5 * kPi) || !(min_angle <= max_angle)) {
    throw ConfigError("scatter region: angles must satisfy -pi/2 < min <= max < pi/2");
  }
}

CVector reconstruct_channel(const ArrayConfig& cfg, const std::vector<PathComponent>& paths,
                            ChannelModel model) {
  const double n_ant = cfg.num_antennas();
  CVector h = CVector::Zero(cfg.num_antennas());
  if (paths.empty()) {
    return h;
  }
  const auto response = [&](const Location& loc) {
    return model == ChannelModel::far ? steering_vector(cfg, loc.angle())
                                      : focusing_vector(cfg, loc, DistanceMode::exact);
  };
  h += std::sqrt(n_ant) * paths[0].gain * response(paths[0].location);
  const std::size_t num_nlos = paths.size() - 1;
  if (num_nlos > 0) {
    const double nlos_scale = std::sqrt(n_ant / static_cast<double>(num_nlos));
    for (std::size_t l = 1; l < paths.size(); ++l) {
      h += nlos_scale * paths[l].gain * response(paths[l].location);
    }
  }
  return h;
}

ChannelRealization single_path_channel(const ArrayConfig& cfg, const Location& loc,
                                       cdouble gain, ChannelModel model) {
  ChannelRealization out{CVector(), {PathComponent{gain, loc}}, 0, model};
  out.h = reconstruct_channel(cfg, out.paths, model);
  return out;
}

namespace {

void check_rician(int num_nlos, double kappa) {
  if (num_nlos < 0) {
    throw ConfigError("channel: number of NLoS paths must be >= 0");
  }
  if (!(kappa >= 0.0)) {
    throw ConfigError("channel: Rician factor must be >= 0");
  }
  if (num_nlos == 0 && kappa == 0.0) {
    throw ConfigError("channel: L = 0 with kappa = 0 carries no power");
  }
}

ChannelRealization sample_rician(const ArrayConfig& cfg, const Location& los, int num_nlos,
                                 double kappa, const ScatterRegion& region, ChannelModel model,
                                 Rng& rng) {
  check_rician(num_nlos, kappa);
  region.validate();
  const double los_var = std::isinf(kappa) ? 1.0 : kappa / (kappa + 1.0);
  const double nlos_var = std::isinf(kappa) ? 0.0 : 1.0 / (kappa + 1.0);

  ChannelRealization out;
  out.model = model;
  out.num_nlos = num_nlos;
  out.paths.reserve(num_nlos + 1);
  out.paths.push_back({complex_gaussian(rng, los_var), los});
  for (int l = 0; l < num_nlos; ++l) {
    const double angle = uniform(rng, region.min_angle, region.max_angle);
    const Location loc = model == ChannelModel::far
                             ? Location::far_field(angle)
                             : Location(uniform(rng, region.min_distance, region.max_distance), angle);
    out.paths.push_back({complex_gaussian(rng, nlos_var), loc});
  }
  out.h = reconstruct_channel(cfg, out.paths, model);
  return out;
}

}  // namespace

ChannelRealization sample_far_channel(const ArrayConfig& cfg, double los_angle, int num_nlos,
                                      double kappa, const ScatterRegion& region, Rng& rng) {
  return sample_rician(cfg, Location::far_field(los_angle), num_nlos, kappa, region,
                       ChannelModel::far, rng);
}

ChannelRealization sample_near_channel(const ArrayConfig& cfg, const Location& los_location,
                                       int num_nlos, double kappa, const ScatterRegion& region,
                                       Rng& rng) {
  return sample_rician(cfg, los_location, num_nlos, kappa, region, ChannelModel::near, rng);
}

}  // namespace ldma
