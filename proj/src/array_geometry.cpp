// SPDX-License-Identifier: Apache-2.0
#include "ldma/array_geometry.hpp"

#include <cmath>
#include <sstream>

namespace ldma {

ArrayConfig::ArrayConfig(int num_antennas, double element_spacing, double carrier_frequency,
                         double propagation_speed)
    : num_antennas_(num_antennas),
      element_spacing_(element_spacing),
      carrier_frequency_(carrier_frequency),
      propagation_speed_(propagation_speed) {
  if (num_antennas < 1) {
    throw ConfigError("ArrayConfig: num_antennas must be >= 1");
  }
  if (!(element_spacing > 0.0) || !std::isfinite(element_spacing)) {
    throw ConfigError("ArrayConfig: element_spacing must be positive and finite");
  }
  if (!(carrier_frequency > 0.0) || !std::isfinite(carrier_frequency)) {
    throw ConfigError("ArrayConfig: carrier_frequency must be positive and finite");
  }
  if (!(propagation_speed > 0.0) || !std::isfinite(propagation_speed)) {
    throw ConfigError("ArrayConfig: propagation_speed must be positive and finite");
  }
  wavelength_ = propagation_speed_ / carrier_frequency_;
  wavenumber_ = 2.0 * kPi / wavelength_;
}

ArrayConfig ArrayConfig::half_wavelength(int num_antennas, double carrier_frequency,
                                         double propagation_speed) {
  return ArrayConfig(num_antennas, 0.5 * propagation_speed / carrier_frequency,
                     carrier_frequency, propagation_speed);
}

ArrayConfig ArrayConfig::with_antennas(int num_antennas) const {
  return ArrayConfig(num_antennas, element_spacing_, carrier_frequency_, propagation_speed_);
}

Location::Location(double distance, double angle) : distance_(distance), angle_(angle) {
  if (!(distance > 0.0) || std::isnan(distance)) {
    throw ConfigError("Location: distance must be positive");
  }
  if (!(std::abs(angle) < 0.5 * kPi)) {
    std::ostringstream msg;
    msg << "Location: angle " << angle << " rad is outside the open interval (-pi/2, pi/2)";
    throw ConfigError(msg.str());
  }
}

double rayleigh_distance(const ArrayConfig& cfg) {
  const double aperture = cfg.aperture();
  return 2.0 * aperture * aperture / cfg.wavelength();
}

bool is_near_field(const ArrayConfig& cfg, double distance) {
  return distance <= rayleigh_distance(cfg);
}

namespace {

void check_index(double n, const ArrayConfig& cfg) {
  if (std::abs(n) > cfg.max_index() + 1e-9) {
    std::ostringstream msg;
    msg << "element offset " << n << " exceeds max index " << cfg.max_index();
    throw std::out_of_range(msg.str());
  }
}

}  // namespace

double element_distance_exact(const Location& loc, double n, const ArrayConfig& cfg) {
  check_index(n, cfg);
  const double r = loc.distance();
  const double nd = n * cfg.element_spacing();
  return std::sqrt(r * r + nd * nd - 2.0 * nd * r * std::sin(loc.angle()));
}

double element_distance_second_order(const Location& loc, double n, const ArrayConfig& cfg) {
  check_index(n, cfg);
  const double r = loc.distance();
  const double nd = n * cfg.element_spacing();
  const double c = std::cos(loc.angle());
  return r - nd * std::sin(loc.angle()) + nd * nd * c * c / (2.0 * r);
}

double element_distance_first_order(const Location& loc, double n, const ArrayConfig& cfg) {
  check_index(n, cfg);
  return loc.distance() - n * cfg.element_spacing() * std::sin(loc.angle());
}

}  // namespace ldma
