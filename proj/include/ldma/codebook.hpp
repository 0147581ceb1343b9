// SPDX-License-Identifier: Apache-2.0
//
// DFT and polar-domain codebooks, and beam-sweeping codeword assignment.
#pragma once

#include <string>
#include <vector>

#include "ldma/array_geometry.hpp"
#include "ldma/channel_model.hpp"
#include "ldma/types.hpp"

namespace ldma {

enum class CodebookKind { dft, polar };

struct Codebook {
  CodebookKind kind = CodebookKind::dft;
  ArrayConfig array;
  /// 1 for DFT codebooks.
  double coherence_target = 1.0;
  /// One label per codeword; far-field rings carry an infinite distance.
  std::vector<Location> labels;
  /// N x M, unit-norm columns regenerated from labels.
  CMatrix codewords;

  int size() const { return static_cast<int>(labels.size()); }
};

/// M = N steering vectors at sin(phi_m) = (2m - N + 1) / N.
Codebook build_dft_codebook(const ArrayConfig& cfg);

/// DFT angle grid; per angle, distance rings uniform in inverse distance with
/// adjacent rings separated by the beta at which the |G| envelope reaches
/// coherence_target. Ring 0 is the far-field steering vector; rings continue
/// inward until they cover min_distance.
Codebook build_polar_codebook(const ArrayConfig& cfg, double min_distance,
                              double coherence_target);

/// Inverse-distance step between adjacent rings at the given angle.
double polar_ring_step(const ArrayConfig& cfg, double angle, double coherence_target);

/// Rebuilds codewords from labels (exact focusing vectors).
CMatrix synthesize_codewords(const ArrayConfig& cfg, const std::vector<Location>& labels);

/// {kind, N, d, frequency, coherence_target, entries: [{angle, distance_or_null}]}
std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const std::string& text);

struct BeamAssignment {
  std::vector<int> user_to_codeword;
  /// |w_k^H h_k| for the assigned codeword.
  std::vector<double> gains;
};

/// Greedy sweep: repeatedly assign the (user, free codeword) pair with the
/// largest |w^H h|. Ties go to the lower user, then lower codeword index.
/// Throws ConfigError when K > M.
BeamAssignment sweep_assign(const std::vector<ChannelRealization>& channels, const Codebook& cb);

/// Analog precoder [w_1, ..., w_K] for an assignment.
CMatrix analog_precoder(const Codebook& cb, const BeamAssignment& assignment);

}  // namespace ldma
