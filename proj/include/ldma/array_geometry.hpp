// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array geometry and the far/near-field boundary.
#pragma once

#include <limits>

#include "ldma/types.hpp"

namespace ldma {

/// Exact vacuum speed of light.
inline constexpr double kSpeedOfLight = 299792458.0;
/// Rounded propagation speed used by default, so that 30 GHz maps to a
/// 1 cm wavelength.
inline constexpr double kNominalPropagationSpeed = 3.0e8;

/// ULA geometry and carrier. Elements sit at centered offsets
/// n = -(N-1)/2, ..., (N-1)/2 (in units of the spacing d), which are
/// integers for odd N and half-integers for even N.
class ArrayConfig {
 public:
  /// Throws ConfigError when N < 1, d <= 0, f <= 0 or speed <= 0.
  ArrayConfig(int num_antennas, double element_spacing, double carrier_frequency,
              double propagation_speed = kNominalPropagationSpeed);

  /// Half-wavelength spaced array.
  static ArrayConfig half_wavelength(int num_antennas, double carrier_frequency,
                                     double propagation_speed = kNominalPropagationSpeed);

  int num_antennas() const { return num_antennas_; }
  double element_spacing() const { return element_spacing_; }
  double carrier_frequency() const { return carrier_frequency_; }
  double propagation_speed() const { return propagation_speed_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const { return wavenumber_; }
  /// (N-1)/2
  double max_index() const { return 0.5 * (num_antennas_ - 1); }
  /// (N-1)·d
  double aperture() const { return (num_antennas_ - 1) * element_spacing_; }

  /// Centered offset of the element at storage position i in [0, N).
  double element_offset(int i) const { return i - max_index(); }

  /// Same geometry with a different element count.
  ArrayConfig with_antennas(int num_antennas) const;

 private:
  int num_antennas_;
  double element_spacing_;
  double carrier_frequency_;
  double propagation_speed_;
  double wavelength_;
  double wavenumber_;
};

/// Polar position relative to the array center. The angle is measured from
/// broadside and must lie strictly inside (-pi/2, pi/2). A distance of
/// +infinity denotes a far-field direction.
class Location {
 public:
  Location(double distance, double angle);

  static Location far_field(double angle) {
    return Location(std::numeric_limits<double>::infinity(), angle);
  }

  double distance() const { return distance_; }
  double angle() const { return angle_; }
  bool is_far_field() const { return distance_ == std::numeric_limits<double>::infinity(); }
  Location mirrored() const { return Location(distance_, -angle_); }

 private:
  double distance_;
  double angle_;
};

/// 2D^2 / lambda
double rayleigh_distance(const ArrayConfig& cfg);

/// Near-field side of the boundary; the boundary itself counts as near field.
bool is_near_field(const ArrayConfig& cfg, double distance);

/// Euclidean distance from element offset n to the point at loc.
/// Throws std::out_of_range when |n| exceeds (N-1)/2.
double element_distance_exact(const Location& loc, double n, const ArrayConfig& cfg);

/// r - n d sin(phi) + n^2 d^2 cos^2(phi) / (2r)
double element_distance_second_order(const Location& loc, double n, const ArrayConfig& cfg);

/// r - n d sin(phi). Only used to check that the first-order expansion
/// reproduces the far-field steering vector.
double element_distance_first_order(const Location& loc, double n, const ArrayConfig& cfg);

}  // namespace ldma
