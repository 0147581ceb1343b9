// SPDX-License-Identifier: Apache-2.0
//
// Correlation of steering and focusing vectors: Dirichlet sinc, Fresnel
// integrals and the |G(beta)| distance-correlation approximation.
#pragma once

#include "ldma/array_geometry.hpp"
#include "ldma/channel_model.hpp"

namespace ldma {

struct FresnelPair {
  double C = 0.0;
  double S = 0.0;
};

/// C(x) = int_0^x cos(pi t^2 / 2) dt, S(x) = int_0^x sin(pi t^2 / 2) dt.
/// Maclaurin series for |x| <= 1.6, continued fraction for the auxiliary
/// functions above. Absolute error well below 1e-8.
FresnelPair fresnel(double x);

/// sin(N pi a / 2) / (N sin(pi a / 2)), extended continuously through the
/// removable points a = 2m (value 1 for odd N; (-1)^m for even N).
double dirichlet_sinc(int num_antennas, double a);

/// |a(phi_l)^H a(phi_m)|
double steering_correlation(const ArrayConfig& cfg, double angle_l, double angle_m);

/// |b(l)^H b(m)| by direct inner product.
double focusing_correlation_exact(const ArrayConfig& cfg, const Location& l, const Location& m,
                                  DistanceMode mode = DistanceMode::exact);

/// |G(beta)| = |C(beta) + j S(beta)| / beta, equal to 1 at beta = 0.
double fresnel_correlation(double beta);

/// beta = N sqrt(d^2 cos^2(phi) / (2 lambda) |1/r_l - 1/r_m|). Either
/// distance may be infinite.
double distance_beta(const ArrayConfig& cfg, double r_l, double r_m, double angle);

struct CorrelationReport {
  /// Correlation under the second-order distance model, which the Fresnel
  /// approximation is derived from.
  double exact = 0.0;
  /// Correlation under the exact spherical-wave geometry.
  double exact_geometry = 0.0;
  double approx_beta = 0.0;
  double approx_value = 0.0;
  /// |exact - approx_value|
  double abs_error = 0.0;
  /// |exact_geometry - approx_value|
  double abs_error_geometry = 0.0;
};

CorrelationReport focusing_correlation_approx(const ArrayConfig& cfg, double r_l, double r_m,
                                              double angle);

/// Non-increasing majorant of |G(beta)|: follows |G| along its initial
/// decreasing branch, then interpolates linearly between successive local
/// maxima. Tabulated once on first use.
class FresnelEnvelope {
 public:
  static const FresnelEnvelope& instance();

  double operator()(double beta) const;

  /// Smallest beta with envelope(beta) <= target. Returns 0 for target >= 1.
  double solve(double target) const;

  double table_end() const { return beta_.back(); }

 private:
  FresnelEnvelope();
  std::vector<double> beta_;
  std::vector<double> value_;
};

}  // namespace ldma
