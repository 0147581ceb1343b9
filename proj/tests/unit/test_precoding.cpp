// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "ldma/codebook.hpp"
#include "ldma/performance.hpp"
#include "ldma/precoding.hpp"

using namespace ldma;

namespace {

struct Instance {
  std::vector<ChannelRealization> channels;
  CMatrix analog;
  EffectiveChannel hbar;
};

// K users in a sector, Rician channels, LDMA analog beams.
Instance random_instance(const ArrayConfig& cfg, const Codebook& cb, int k, Rng& rng) {
  Instance in;
  const ScatterRegion region;
  for (int u = 0; u < k; ++u) {
    const Location loc(uniform(rng, 4.0, 60.0), uniform(rng, -0.9, 0.9));
    in.channels.push_back(sample_near_channel(cfg, loc, 3, 5.0, region, rng));
  }
  in.analog = analog_precoder(cb, sweep_assign(in.channels, cb));
  in.hbar = effective_channel(in.analog, in.channels);
  return in;
}

}  // namespace

TEST_SUITE("precoding") {
  TEST_CASE("system configuration") {
    const SystemConfig s = SystemConfig::from_snr_db(4, 20.0);
    CHECK(s.num_rf_chains == 4);
    CHECK(s.snr() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(s.power_allocation.sum() == doctest::Approx(1.0).epsilon(1e-15));
    SystemConfig bad = s;
    bad.num_rf_chains = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.power_allocation[0] = 0.9;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(SystemConfig::equal_power(0, 1.0, 1.0).validate(), ConfigError);
  }

  TEST_CASE("effective channel estimation") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(64, 30e9);
    const Codebook cb = build_dft_codebook(cfg);
    Rng rng = derive_stream(3, 0);
    const Instance in = random_instance(cfg, cb, 3, rng);
    Rng r1 = derive_stream(9, 9);
    const EffectiveChannel noiseless = estimate_effective_channel(in.analog, in.channels, 0.0, r1);
    CHECK(noiseless.stacked == in.hbar.stacked);
    for (int k = 0; k < 3; ++k) {
      CHECK(noiseless.user(k) == CVector(in.analog.adjoint() * in.channels[k].h));
    }
    CHECK_THROWS_AS(estimate_effective_channel(in.analog, in.channels, -1.0, r1), ConfigError);

    Rng ra = derive_stream(4, 1);
    Rng rb = derive_stream(4, 1);
    CHECK(estimate_effective_channel(in.analog, in.channels, 0.3, ra).stacked ==
          estimate_effective_channel(in.analog, in.channels, 0.3, rb).stacked);

    // orthonormal analog columns: per-entry noise variance equals the pilot variance
    const double var = 0.7;
    double acc = 0.0;
    const int draws = 10000;
    Rng rn = derive_stream(5, 0);
    for (int i = 0; i < draws; ++i) {
      const EffectiveChannel e = estimate_effective_channel(in.analog, in.channels, var, rn);
      acc += (e.stacked - in.hbar.stacked).cwiseAbs2().sum() / 9.0;
    }
    CHECK(acc / draws == doctest::Approx(var).epsilon(0.05));
  }

  TEST_CASE("ZF on an identity effective channel") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(16, 30e9);
    const Codebook cb = build_dft_codebook(cfg);
    const CMatrix analog = cb.codewords.leftCols(3);
    const EffectiveChannel hbar{CMatrix::Identity(3, 3)};
    const PrecoderSet p = zf_precoder(hbar, SystemConfig::equal_power(3, 1.0, 1.0), analog);
    CHECK((p.digital - CMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((p.power_diag - RVector::Ones(3)).norm() < 1e-12);
  }

  TEST_CASE("ZF nulls interference and normalizes columns") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(128, 30e9);
    const Codebook cb = build_polar_codebook(cfg, 4.0, 0.5);
    Rng rng = derive_stream(21, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + trial % 5;
      const Instance in = random_instance(cfg, cb, k, rng);
      const SystemConfig sys = SystemConfig::from_snr_db(k, 10.0);
      const PrecoderSet p = zf_precoder(in.hbar, sys, in.analog);
      const CMatrix eff = in.hbar.stacked * p.digital;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          if (i != j) {
            CHECK(std::abs(eff(i, j)) < 1e-9);
          }
        }
        CHECK(std::abs((in.analog * p.digital.col(i)).squaredNorm() - 1.0) < 1e-10);
      }
      // scaling the effective channel leaves the transmit directions unchanged
      const PrecoderSet scaled = zf_precoder(EffectiveChannel{3.7 * in.hbar.stacked}, sys, in.analog);
      CHECK((scaled.transmit() - p.transmit()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("ZF rejects singular effective channels") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(32, 30e9);
    const Codebook cb = build_dft_codebook(cfg);
    CMatrix h = CMatrix::Random(3, 3);
    h.row(2) = h.row(1);
    const SystemConfig sys = SystemConfig::equal_power(3, 1.0, 1.0);
    CHECK_THROWS_AS(zf_precoder(EffectiveChannel{h}, sys, cb.codewords.leftCols(3)), NumericalError);
    try {
      zf_precoder(EffectiveChannel{h}, sys, cb.codewords.leftCols(3));
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("condition number") != std::string::npos);
    }
    CHECK(condition_number(h) > kMaxConditionNumber);
  }

  TEST_CASE("WMMSE") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(128, 30e9);
    const Codebook cb = build_polar_codebook(cfg, 4.0, 0.5);
    Rng rng = derive_stream(33, 0);
    for (int trial = 0; trial < 15; ++trial) {
      const int k = 2 + trial % 4;
      const Instance in = random_instance(cfg, cb, k, rng);
      const SystemConfig sys = SystemConfig::from_snr_db(k, -5.0 + 5.0 * (trial % 6));
      const WmmseResult w = wmmse_precoder(in.hbar, sys, in.analog);
      REQUIRE(w.objective_history.size() >= 2);
      for (std::size_t i = 1; i < w.objective_history.size(); ++i) {
        CHECK(w.objective_history[i] <= w.objective_history[i - 1] + 1e-9);
      }
      CHECK(w.iterations >= 1);
      CHECK(w.precoders.power.sum() <= sys.total_power * (1.0 + 1e-9));
      CHECK((w.precoders.power.array() >= 0.0).all());
      for (int c = 0; c < k; ++c) {
        CHECK(std::abs((in.analog * w.precoders.digital.col(c)).squaredNorm() - 1.0) < 1e-10);
      }
      const double zf = spectrum_efficiency(in.channels, zf_precoder(in.hbar, sys, in.analog), sys).sum_rate;
      const double wm = spectrum_efficiency(in.channels, w.precoders, sys).sum_rate;
      CHECK(wm >= zf - 1e-9);
    }
    const Instance in = random_instance(cfg, cb, 2, rng);
    WmmseOptions bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(wmmse_precoder(in.hbar, SystemConfig::equal_power(2, 1.0, 1.0), in.analog, bad), ConfigError);
  }

  TEST_CASE("WMMSE single user is matched filtering at full power") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(64, 30e9);
    const Codebook cb = build_polar_codebook(cfg, 4.0, 0.5);
    Rng rng = derive_stream(1, 2);
    const Instance in = random_instance(cfg, cb, 1, rng);
    const SystemConfig sys = SystemConfig::from_snr_db(1, 7.0);
    const WmmseResult w = wmmse_precoder(in.hbar, sys, in.analog);
    const double gain = std::norm(in.channels[0].h.dot(in.analog.col(0)));
    const double capacity = std::log2(1.0 + sys.snr() * gain);
    CHECK(spectrum_efficiency(in.channels, w.precoders, sys).sum_rate == doctest::Approx(capacity).epsilon(1e-9));
  }

  TEST_CASE("WMMSE on orthogonal effective channels matches ZF") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(64, 30e9);
    const Codebook cb = build_dft_codebook(cfg);
    std::vector<ChannelRealization> channels;
    std::vector<int> beams = {5, 20, 41};
    CMatrix analog(64, 3);
    for (int k = 0; k < 3; ++k) {
      channels.push_back(single_path_channel(cfg, cb.labels[beams[k]], cdouble(1.0, 0.0), ChannelModel::far));
      analog.col(k) = cb.codewords.col(beams[k]);
    }
    const EffectiveChannel hbar = effective_channel(analog, channels);
    const SystemConfig sys = SystemConfig::from_snr_db(3, 10.0);
    const double zf = spectrum_efficiency(channels, zf_precoder(hbar, sys, analog), sys).sum_rate;
    const double wm = spectrum_efficiency(channels, wmmse_precoder(hbar, sys, analog).precoders, sys).sum_rate;
    CHECK(wm == doctest::Approx(zf).epsilon(1e-6));
  }

  TEST_CASE("fully digital ZF") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(64, 30e9);
    Rng rng = derive_stream(8, 0);
    const ScatterRegion region;
    std::vector<ChannelRealization> channels;
    for (int k = 0; k < 4; ++k) {
      channels.push_back(sample_near_channel(cfg, Location(uniform(rng, 4, 40), uniform(rng, -1, 1)), 2, 3.0, region, rng));
    }
    const SystemConfig sys = SystemConfig::from_snr_db(4, 15.0);
    const DigitalPrecoder fd = fully_digital_zf(channels, sys);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(fd.precoder.col(i).norm() - 1.0) < 1e-12);
      for (int j = 0; j < 4; ++j) {
        if (i != j) {
          CHECK(std::abs(channels[i].h.dot(fd.precoder.col(j))) < 1e-9);
        }
      }
    }
    const DigitalPrecoder one = fully_digital_zf({channels[0]}, SystemConfig::from_snr_db(1, 0.0));
    CHECK((one.precoder.col(0) - channels[0].h.normalized()).norm() < 1e-12);

    std::vector<ChannelRealization> dup = {channels[0], channels[0]};
    CHECK_THROWS_AS(fully_digital_zf(dup, SystemConfig::from_snr_db(2, 0.0)), NumericalError);

    // orthogonal single-path channels reach the ideal rate
    const Codebook cb = build_dft_codebook(cfg);
    std::vector<ChannelRealization> ortho;
    for (int m : {3, 30, 50}) {
      ortho.push_back(single_path_channel(cfg, cb.labels[m], cdouble(1.0, 0.0), ChannelModel::far));
    }
    const SystemConfig s3 = SystemConfig::from_snr_db(3, 5.0);
    const DigitalPrecoder f3 = fully_digital_zf(ortho, s3);
    const double se = spectrum_efficiency(ortho, f3.precoder, f3.power, s3.noise_variance).sum_rate;
    CHECK(se == doctest::Approx(ideal_se(CVector::Ones(3), s3, 64).value).epsilon(1e-9));
  }
}
