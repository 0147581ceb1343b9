// SPDX-License-Identifier: Apache-2.0
//
// Hybrid precoding on the effective channel: ZF, WMMSE and the fully-digital
// ZF baseline.
#pragma once

#include <vector>

#include "ldma/channel_model.hpp"
#include "ldma/rng.hpp"
#include "ldma/types.hpp"

namespace ldma {

/// Transmit-side parameters. N_RF equals K and the per-user allocation sums to P.
struct SystemConfig {
  int num_users = 1;
  int num_rf_chains = 1;
  double total_power = 1.0;
  double noise_variance = 1.0;
  RVector power_allocation;

  /// p_k = P / K
  static SystemConfig equal_power(int num_users, double total_power, double noise_variance);
  /// P / sigma^2 given in dB, with P = total_power.
  static SystemConfig from_snr_db(int num_users, double snr_db, double total_power = 1.0);

  double snr() const { return total_power / noise_variance; }
  void validate() const;
};

/// F_A (N x K), F_D (K x K), the per-column normalizers Lambda that make
/// ||F_A f_D,k|| = 1, and the per-stream powers p_k.
struct PrecoderSet {
  CMatrix analog;
  CMatrix digital;
  RVector power_diag;
  RVector power;

  /// F_A F_D, the unit-norm transmit directions.
  CMatrix transmit() const { return analog * digital; }
};

/// Stacked effective channel; row k is hbar_k^H.
struct EffectiveChannel {
  CMatrix stacked;

  CVector user(int k) const { return stacked.row(k).adjoint(); }
  int num_users() const { return static_cast<int>(stacked.rows()); }
};

/// hbar_k = F_A^H h_k + F_A^H n_k with n_k ~ CN(0, variance I).
/// Throws ConfigError on negative variance or mismatched sizes.
EffectiveChannel estimate_effective_channel(const CMatrix& analog,
                                            const std::vector<ChannelRealization>& channels,
                                            double pilot_noise_variance, Rng& rng);

/// Noiseless effective channel.
EffectiveChannel effective_channel(const CMatrix& analog,
                                   const std::vector<ChannelRealization>& channels);

/// Condition numbers above this are rejected by the ZF routines.
inline constexpr double kMaxConditionNumber = 1e12;

/// F_D = Hbar^H (Hbar Hbar^H)^{-1} Lambda. Throws NumericalError naming the
/// condition number when Hbar is singular or ill-conditioned.
PrecoderSet zf_precoder(const EffectiveChannel& hbar, const SystemConfig& sys,
                        const CMatrix& analog);

struct WmmseOptions {
  int max_iters = 200;
  double tol = 1e-6;
  /// Start from the ZF solution (falls back to matched filtering when ZF is
  /// singular).
  bool init_from_zf = true;
};

struct WmmseResult {
  PrecoderSet precoders;
  bool converged = false;
  int iterations = 0;
  /// Weighted-MSE objective sum_k (w_k e_k - ln w_k) at MMSE receivers and
  /// weights; entry 0 is the initial point.
  std::vector<double> objective_history;
};

/// Weighted sum-rate maximization on the K x K effective channel under the
/// total power constraint sum_k ||F_A u_k||^2 <= P. Returned digital columns
/// are normalized so ||F_A f_D,k|| = 1 and the stream powers go to `power`.
WmmseResult wmmse_precoder(const EffectiveChannel& hbar, const SystemConfig& sys,
                           const CMatrix& analog, const WmmseOptions& options = {});

struct DigitalPrecoder {
  /// N x K, unit-norm columns.
  CMatrix precoder;
  RVector power;
};

/// F = H^H (H H^H)^{-1} Lambda with unit-norm columns.
DigitalPrecoder fully_digital_zf(const std::vector<ChannelRealization>& channels,
                                 const SystemConfig& sys);

/// Largest over smallest singular value; infinity for rank-deficient input.
double condition_number(const CMatrix& m);

}  // namespace ldma
