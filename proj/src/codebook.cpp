// SPDX-License-Identifier: Apache-2.0
#include "ldma/codebook.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "ldma/correlation.hpp"

namespace ldma {

namespace {

constexpr double kMaxCodebookEntries = 1 << 25;  // M * N complex entries

std::vector<double> dft_angles(int num_antennas) {
  std::vector<double> angles(num_antennas);
  for (int m = 0; m < num_antennas; ++m) {
    angles[m] = std::asin(static_cast<double>(2 * m - num_antennas + 1) / num_antennas);
  }
  return angles;
}

}  // namespace

CMatrix synthesize_codewords(const ArrayConfig& cfg, const std::vector<Location>& labels) {
  CMatrix w(cfg.num_antennas(), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t m = 0; m < labels.size(); ++m) {
    w.col(static_cast<Eigen::Index>(m)) = focusing_vector(cfg, labels[m], DistanceMode::exact);
  }
  return w;
}

Codebook build_dft_codebook(const ArrayConfig& cfg) {
  Codebook cb{CodebookKind::dft, cfg, 1.0, {}, {}};
  for (double angle : dft_angles(cfg.num_antennas())) {
    cb.labels.push_back(Location::far_field(angle));
  }
  cb.codewords = synthesize_codewords(cfg, cb.labels);
  return cb;
}

double polar_ring_step(const ArrayConfig& cfg, double angle, double coherence_target) {
  const double beta = FresnelEnvelope::instance().solve(coherence_target);
  const double n = cfg.num_antennas();
  const double d = cfg.element_spacing();
  const double c = std::cos(angle);
  return 2.0 * cfg.wavelength() * beta * beta / (n * n * d * d * c * c);
}

Codebook build_polar_codebook(const ArrayConfig& cfg, double min_distance,
                              double coherence_target) {
  if (!(coherence_target > 0.0 && coherence_target < 1.0)) {
    throw ConfigError("polar codebook: coherence_target must lie in (0, 1)");
  }
  if (!(min_distance > 0.0)) {
    throw ConfigError("polar codebook: min_distance must be positive");
  }
  Codebook cb{CodebookKind::polar, cfg, coherence_target, {}, {}};
  const double max_inverse = 1.0 / min_distance;
  for (double angle : dft_angles(cfg.num_antennas())) {
    cb.labels.push_back(Location::far_field(angle));
    const double step = polar_ring_step(cfg, angle, coherence_target);
    // Rings at u = s * step, continuing until within half a step of 1/r_min.
    for (int s = 1; s * step < max_inverse + 0.5 * step; ++s) {
      cb.labels.push_back(Location(1.0 / (s * step), angle));
      if (static_cast<double>(cb.labels.size()) * cfg.num_antennas() > kMaxCodebookEntries) {
        throw ConfigError("polar codebook: too many codewords; raise min_distance or lower "
                          "coherence_target");
      }
    }
  }
  cb.codewords = synthesize_codewords(cfg, cb.labels);
  return cb;
}

std::string codebook_to_json(const Codebook& cb) {
  nlohmann::ordered_json doc;
  doc["kind"] = cb.kind == CodebookKind::dft ? "dft" : "polar";
  doc["N"] = cb.array.num_antennas();
  doc["d"] = cb.array.element_spacing();
  doc["frequency"] = cb.array.carrier_frequency();
  if (cb.array.propagation_speed() != kNominalPropagationSpeed) {
    doc["propagation_speed"] = cb.array.propagation_speed();
  }
  doc["coherence_target"] = cb.coherence_target;
  auto entries = nlohmann::ordered_json::array();
  for (const Location& loc : cb.labels) {
    nlohmann::ordered_json e;
    e["angle"] = loc.angle();
    e["distance_or_null"] = loc.is_far_field() ? nlohmann::ordered_json(nullptr)
                                               : nlohmann::ordered_json(loc.distance());
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

Codebook codebook_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind != "dft" && kind != "polar") {
      throw ConfigError("codebook: unknown kind '" + kind + "'");
    }
    const double speed = doc.value("propagation_speed", kNominalPropagationSpeed);
    const ArrayConfig cfg(doc.at("N").get<int>(), doc.at("d").get<double>(),
                          doc.at("frequency").get<double>(), speed);
    Codebook cb{kind == "dft" ? CodebookKind::dft : CodebookKind::polar, cfg,
                doc.at("coherence_target").get<double>(), {}, {}};
    for (const auto& e : doc.at("entries")) {
      const double angle = e.at("angle").get<double>();
      const auto& dist = e.at("distance_or_null");
      cb.labels.push_back(dist.is_null() ? Location::far_field(angle)
                                         : Location(dist.get<double>(), angle));
    }
    cb.codewords = synthesize_codewords(cfg, cb.labels);
    return cb;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("codebook JSON: ") + e.what());
  }
}

BeamAssignment sweep_assign(const std::vector<ChannelRealization>& channels, const Codebook& cb) {
  const int num_users = static_cast<int>(channels.size());
  const int num_codewords = cb.size();
  if (num_users > num_codewords) {
    throw ConfigError("sweep_assign: more users than codewords");
  }
  CMatrix h(cb.array.num_antennas(), num_users);
  for (int k = 0; k < num_users; ++k) {
    if (channels[k].h.size() != cb.array.num_antennas()) {
      throw ConfigError("sweep_assign: channel length does not match codebook");
    }
    h.col(k) = channels[k].h;
  }
  const Eigen::MatrixXd gain = (cb.codewords.adjoint() * h).cwiseAbs();  // M x K

  BeamAssignment out;
  out.user_to_codeword.assign(num_users, -1);
  out.gains.assign(num_users, 0.0);
  std::vector<bool> taken(num_codewords, false);
  for (int round = 0; round < num_users; ++round) {
    int best_user = -1;
    int best_cw = -1;
    double best = -1.0;
    for (int k = 0; k < num_users; ++k) {
      if (out.user_to_codeword[k] >= 0) {
        continue;
      }
      for (int m = 0; m < num_codewords; ++m) {
        if (!taken[m] && gain(m, k) > best) {
          best = gain(m, k);
          best_user = k;
          best_cw = m;
        }
      }
    }
    out.user_to_codeword[best_user] = best_cw;
    out.gains[best_user] = best;
    taken[best_cw] = true;
  }
  return out;
}

CMatrix analog_precoder(const Codebook& cb, const BeamAssignment& assignment) {
  CMatrix fa(cb.array.num_antennas(), static_cast<Eigen::Index>(assignment.user_to_codeword.size()));
  for (std::size_t k = 0; k < assignment.user_to_codeword.size(); ++k) {
    fa.col(static_cast<Eigen::Index>(k)) = cb.codewords.col(assignment.user_to_codeword[k]);
  }
  return fa;
}

}  // namespace ldma
