// SPDX-License-Identifier: Apache-2.0
#include "ldma/correlation.hpp"

#include <algorithm>
#include <cmath>

namespace ldma {

double dirichlet_sinc(int num_antennas, double a) {
  if (num_antennas < 1) {
    throw ConfigError("dirichlet_sinc: N must be >= 1");
  }
  // Reduce a to a' in [-1, 1] with a = a' + 2m so sin(pi a / 2) stays accurate
  // near the removable points.
  const double m = std::round(0.5 * a);
  const double reduced = a - 2.0 * m;
  const bool odd_m = std::fmod(std::abs(m), 2.0) == 1.0;
  const double sign = (odd_m && num_antennas % 2 == 0) ? -1.0 : 1.0;
  const double x = 0.5 * kPi * reduced;
  if (x == 0.0) {
    return sign;
  }
  return sign * std::sin(num_antennas * x) / (num_antennas * std::sin(x));
}

double steering_correlation(const ArrayConfig& cfg, double angle_l, double angle_m) {
  const double a = 2.0 * cfg.element_spacing() / cfg.wavelength() *
                   (std::sin(angle_m) - std::sin(angle_l));
  return std::abs(dirichlet_sinc(cfg.num_antennas(), a));
}

double focusing_correlation_exact(const ArrayConfig& cfg, const Location& l, const Location& m,
                                  DistanceMode mode) {
  const CVector bl = focusing_vector(cfg, l, mode);
  const CVector bm = focusing_vector(cfg, m, mode);
  return std::abs(bl.dot(bm));
}

double fresnel_correlation(double beta) {
  if (beta == 0.0) {
    return 1.0;
  }
  const FresnelPair f = fresnel(beta);
  return std::hypot(f.C, f.S) / std::abs(beta);
}

double distance_beta(const ArrayConfig& cfg, double r_l, double r_m, double angle) {
  const double d = cfg.element_spacing();
  const double c = std::cos(angle);
  const double inv_gap = std::abs(1.0 / r_l - 1.0 / r_m);
  return cfg.num_antennas() * std::sqrt(d * d * c * c / (2.0 * cfg.wavelength()) * inv_gap);
}

CorrelationReport focusing_correlation_approx(const ArrayConfig& cfg, double r_l, double r_m,
                                              double angle) {
  if (!(r_l > 0.0) || !(r_m > 0.0)) {
    throw ConfigError("focusing_correlation_approx: distances must be positive");
  }
  CorrelationReport report;
  report.approx_beta = distance_beta(cfg, r_l, r_m, angle);
  report.approx_value = fresnel_correlation(report.approx_beta);
  const Location l(r_l, angle);
  const Location m(r_m, angle);
  report.exact = focusing_correlation_exact(cfg, l, m, DistanceMode::second_order);
  report.exact_geometry = focusing_correlation_exact(cfg, l, m, DistanceMode::exact);
  report.abs_error = std::abs(report.exact - report.approx_value);
  report.abs_error_geometry = std::abs(report.exact_geometry - report.approx_value);
  return report;
}

const FresnelEnvelope& FresnelEnvelope::instance() {
  static const FresnelEnvelope envelope;
  return envelope;
}

FresnelEnvelope::FresnelEnvelope() {
  constexpr double kStep = 1e-3;
  constexpr double kEnd = 64.0;
  const int count = static_cast<int>(kEnd / kStep) + 1;
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) {
    g[i] = fresnel_correlation(i * kStep);
  }
  // Initial decreasing branch up to the first local minimum.
  int i = 1;
  while (i + 1 < count && g[i + 1] < g[i]) {
    ++i;
  }
  for (int j = 0; j <= i; ++j) {
    beta_.push_back(j * kStep);
    value_.push_back(g[j]);
  }
  for (++i; i + 1 < count; ++i) {
    if (g[i] >= g[i - 1] && g[i] > g[i + 1]) {
      beta_.push_back(i * kStep);
      value_.push_back(g[i]);
    }
  }
  // Monotone majorant over the knots.
  for (int j = static_cast<int>(value_.size()) - 2; j >= 0; --j) {
    value_[j] = std::max(value_[j], value_[j + 1]);
  }
}

double FresnelEnvelope::operator()(double beta) const {
  beta = std::abs(beta);
  if (beta >= beta_.back()) {
    return std::max(value_.back() * beta_.back() / beta, fresnel_correlation(beta));
  }
  const auto it = std::upper_bound(beta_.begin(), beta_.end(), beta);
  const std::size_t hi = static_cast<std::size_t>(it - beta_.begin());
  const std::size_t lo = hi - 1;
  const double t = (beta - beta_[lo]) / (beta_[hi] - beta_[lo]);
  const double interpolated = value_[lo] + t * (value_[hi] - value_[lo]);
  return std::max(interpolated, fresnel_correlation(beta));
}

double FresnelEnvelope::solve(double target) const {
  if (target >= 1.0) {
    return 0.0;
  }
  if (!(target > 0.0)) {
    throw ConfigError("FresnelEnvelope::solve: target must be positive");
  }
  if (target < value_.back()) {
    return value_.back() * beta_.back() / target;
  }
  const auto it = std::lower_bound(value_.begin(), value_.end(), target,
                                   [](double v, double t) { return v > t; });
  const std::size_t hi = static_cast<std::size_t>(it - value_.begin());
  if (hi == 0) {
    return 0.0;
  }
  double lo = beta_[hi - 1];
  double up = beta_[hi];
  for (int iter = 0; iter < 100 && up - lo > 1e-15 * up; ++iter) {
    const double mid = 0.5 * (lo + up);
    ((*this)(mid) <= target ? up : lo) = mid;
  }
  return up;
}

}  // namespace ldma
