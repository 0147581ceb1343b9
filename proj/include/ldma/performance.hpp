// SPDX-License-Identifier: Apache-2.0
//
// Spectrum efficiency and closed-form rate analyses for single-path users.
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ldma/array_geometry.hpp"
#include "ldma/channel_model.hpp"
#include "ldma/precoding.hpp"
#include "ldma/types.hpp"

namespace ldma {

struct RateReport {
  RVector per_user_rates;
  RVector sinr;
  double sum_rate = 0.0;
};

/// sinr_k = p_k |h_k^H t_k|^2 / (sigma^2 + sum_{l != k} p_l |h_k^H t_l|^2)
/// for transmit directions t (N x K) and powers p.
RateReport spectrum_efficiency(const std::vector<ChannelRealization>& channels,
                               const CMatrix& transmit, const RVector& power,
                               double noise_variance);

/// Uses F_A F_D and the stream powers carried by the precoder set.
RateReport spectrum_efficiency(const std::vector<ChannelRealization>& channels,
                               const PrecoderSet& precoders, const SystemConfig& sys);

enum class BoundKind { lemma5, ideal, lemma6_aub, lemma7_aub };

std::string to_string(BoundKind kind);

struct BoundReport {
  BoundKind kind = BoundKind::ideal;
  double value = 0.0;
  std::vector<double> per_user;
  /// Diagonal of the inverse Gram matrix (lemma5) or gamma_k (lemma7).
  std::vector<double> inverse_gram_diag;

  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  // lemma7
  double x1 = kUnset;
  double x2 = kUnset;
  double chi1 = kUnset;
  double chi2 = kUnset;
  double delta = kUnset;
  // lemma6: inverse-distance span, optimal middle offset and g(x_hat)
  double r0 = kUnset;
  double x_hat = kUnset;
  double g_hat = kUnset;
};

/// sum_k log2(1 + P/(K sigma^2) N |a_k|^2 / [(B^H B)^{-1}]_kk). B is N x K.
BoundReport lemma5_se(const CMatrix& focusing, const CVector& gains, const SystemConfig& sys);

/// Same, from a K x K Gram matrix and the array size N.
BoundReport lemma5_se_gram(const CMatrix& gram, const CVector& gains, const SystemConfig& sys,
                           int num_antennas);

/// sum_k log2(1 + P/(K sigma^2) N |a_k|^2), K = gains.size().
BoundReport ideal_se(const CVector& gains, const SystemConfig& sys, int num_antennas);

/// Inverse-distance span r0 = 1/r1 - 1/r3 and gap-to-correlation map for
/// users on the ray at `angle`: g(x) = envelope(beta(x))^2 where x is an
/// inverse-distance gap.
double lemma6_g(const ArrayConfig& cfg, double angle, double inverse_gap);

/// Three users on one ray with the outer users at r1 < r3 and non-adjacent
/// interference neglected. The middle user sits at x_hat = r0/2 in inverse
/// distance. Throws NumericalError when 1 - 2 g(x_hat) <= 0.
BoundReport lemma6_bound(const ArrayConfig& cfg, double angle, double r1, double r3,
                         const SystemConfig& sys, double gain_magnitude);

/// gamma_k from the roots of x^2 - x + |delta|^2 = 0, for K users with
/// adjacent correlation magnitude delta.
BoundReport lemma7_bound(int num_users, double delta, const SystemConfig& sys,
                         const CVector& gains, int num_antennas);

struct MinMaxPlacement {
  /// Sorted ascending.
  std::vector<double> distances;
  /// Largest correlation over all pairs.
  double delta = 0.0;
  /// Largest correlation over neighbours in distance order.
  double delta_adjacent = 0.0;
  /// Set when delta >= 0.99: the range cannot resolve this many users.
  bool resolution_limited = false;
};

struct MinMaxOptions {
  int grid_points = 400;
  int passes = 10;
};

/// Places K users on the ray at `angle` within [r_min, r_max] to minimize the
/// largest pairwise focusing-vector correlation. Starts from uniform inverse
/// distance spacing and refines by coordinate descent over an inverse-distance
/// grid.
MinMaxPlacement min_max_correlation(const ArrayConfig& cfg, double angle, double r_min,
                                    double r_max, int num_users, const MinMaxOptions& options = {});

/// Largest pairwise correlation of the given placement.
double max_pairwise_correlation(const ArrayConfig& cfg, double angle,
                                const std::vector<double>& distances);

}  // namespace ldma
