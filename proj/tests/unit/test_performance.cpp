// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "ldma/channel_model.hpp"
#include "ldma/correlation.hpp"
#include "ldma/performance.hpp"

using namespace ldma;

namespace {

CMatrix tridiagonal(int k, double delta) {
  CMatrix t = CMatrix::Identity(k, k);
  for (int i = 0; i + 1 < k; ++i) {
    t(i, i + 1) = delta;
    t(i + 1, i) = delta;
  }
  return t;
}

CMatrix focusing_matrix(const ArrayConfig& cfg, const std::vector<Location>& locs) {
  CMatrix b(cfg.num_antennas(), static_cast<Eigen::Index>(locs.size()));
  for (std::size_t i = 0; i < locs.size(); ++i) {
    b.col(static_cast<Eigen::Index>(i)) = focusing_vector(cfg, locs[i]);
  }
  return b;
}

}  // namespace

TEST_SUITE("performance") {
  TEST_CASE("spectrum efficiency") {
    // interference-free unit gains with equal power
    const SystemConfig sys = SystemConfig::equal_power(3, 3.0, 0.5);
    std::vector<ChannelRealization> ch(3);
    CMatrix t = CMatrix::Identity(3, 3);
    for (int k = 0; k < 3; ++k) {
      ch[k].h = t.col(k);
    }
    const RateReport r = spectrum_efficiency(ch, t, sys.power_allocation, sys.noise_variance);
    for (int k = 0; k < 3; ++k) {
      CHECK(r.per_user_rates[k] == doctest::Approx(std::log2(1.0 + 1.0 / 0.5)).epsilon(1e-15));
      CHECK(r.per_user_rates[k] == doctest::Approx(std::log2(1.0 + r.sinr[k])).epsilon(1e-15));
    }
    CHECK(r.sum_rate == doctest::Approx(r.per_user_rates.sum()).epsilon(1e-12));

    // phase rotation invariance
    const ArrayConfig cfg = ArrayConfig::half_wavelength(32, 30e9);
    Rng rng(17);
    const ScatterRegion region;
    std::vector<ChannelRealization> users;
    for (int k = 0; k < 3; ++k) {
      users.push_back(sample_near_channel(cfg, Location(uniform(rng, 4, 20), uniform(rng, -1, 1)), 2, 2.0, region, rng));
    }
    CMatrix dirs = CMatrix::Random(32, 3).colwise().normalized();
    const RVector p = RVector::Constant(3, 1.0 / 3.0);
    const double base = spectrum_efficiency(users, dirs, p, 0.1).sum_rate;
    users[1].h *= std::exp(cdouble(0.0, 1.234));
    CHECK(spectrum_efficiency(users, dirs, p, 0.1).sum_rate == doctest::Approx(base).epsilon(1e-13));

    // single user
    const RateReport one = spectrum_efficiency({users[0]}, dirs.leftCols(1), RVector::Constant(1, 2.0), 0.5);
    CHECK(one.sum_rate == doctest::Approx(std::log2(1.0 + 4.0 * std::norm(users[0].h.dot(dirs.col(0))))).epsilon(1e-13));
  }

  TEST_CASE("ideal SE") {
    const SystemConfig sys = SystemConfig::equal_power(1, 1.0, 1.0);
    CHECK(ideal_se(CVector::Ones(1), sys, 256).value == doctest::Approx(std::log2(257.0)).epsilon(1e-15));
    CHECK(ideal_se(CVector::Zero(4), SystemConfig::equal_power(4, 1.0, 1.0), 256).value == 0.0);
  }

  TEST_CASE("lemma5_se inverse-Gram rate") {
    const SystemConfig sys = SystemConfig::from_snr_db(3, 12.0);
    const CVector gains = CVector::Ones(3);
    const BoundReport orth = lemma5_se_gram(CMatrix::Identity(3, 3), gains, sys, 64);
    CHECK(orth.value == doctest::Approx(ideal_se(gains, sys, 64).value).epsilon(1e-14));

    const BoundReport tri = lemma5_se_gram(tridiagonal(3, 0.3), gains, sys, 64);
    CHECK(tri.inverse_gram_diag[1] == doctest::Approx(1.0 / (1.0 - 2.0 * 0.09)).epsilon(1e-12));
    CHECK(tri.inverse_gram_diag[0] == doctest::Approx((1.0 - 0.09) / (1.0 - 2.0 * 0.09)).epsilon(1e-12));
    CHECK(tri.kind == BoundKind::lemma5);

    CMatrix singular = CMatrix::Ones(2, 2);
    CHECK_THROWS_AS(lemma5_se_gram(singular, CVector::Ones(2), SystemConfig::from_snr_db(2, 0.0), 8), NumericalError);
  }

  TEST_CASE("lemma5_se equals ZF on the focusing matrix") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(128, 30e9);
    Rng rng = derive_stream(55, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const int k = 2 + trial % 5;
      std::vector<Location> locs;
      std::vector<ChannelRealization> ch;
      CVector gains(k);
      for (int i = 0; i < k; ++i) {
        locs.emplace_back(uniform(rng, 4.0, 80.0), uniform(rng, -1.0, 1.0));
        gains[i] = complex_gaussian(rng, 1.0);
        ch.push_back(single_path_channel(cfg, locs.back(), gains[i]));
      }
      const CMatrix b = focusing_matrix(cfg, locs);
      const SystemConfig sys = SystemConfig::from_snr_db(k, 10.0);
      const double zf = spectrum_efficiency(ch, zf_precoder(effective_channel(b, ch), sys, b), sys).sum_rate;
      CHECK(std::abs(zf - lemma5_se(b, gains, sys).value) < 1e-9);
    }
  }

  TEST_CASE("lemma7_bound closed form") {
    const SystemConfig sys = SystemConfig::from_snr_db(3, 12.0);
    const BoundReport zero = lemma7_bound(3, 0.0, sys, CVector::Ones(3), 256);
    CHECK(zero.x1 == 0.0);
    CHECK(zero.x2 == 1.0);
    CHECK(zero.chi1 == 0.0);
    CHECK(zero.chi2 == 1.0);
    for (double g : zero.inverse_gram_diag) {
      CHECK(g == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(zero.value == doctest::Approx(ideal_se(CVector::Ones(3), sys, 256).value).epsilon(1e-14));

    const BoundReport three = lemma7_bound(3, 0.3, sys, CVector::Ones(3), 256);
    CHECK(three.x1 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(three.x2 == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(three.chi1 == doctest::Approx(-0.0125).epsilon(1e-12));
    CHECK(three.chi2 == doctest::Approx(1.0125).epsilon(1e-12));
    CHECK(three.inverse_gram_diag[1] == doctest::Approx(1.0 / (1.0 - 0.18)).epsilon(1e-12));
    CHECK(three.inverse_gram_diag[0] == doctest::Approx(0.91 / 0.82).epsilon(1e-12));

    for (int k = 2; k <= 10; ++k) {
      for (double delta : {0.1, 0.2, 0.3, 0.4}) {
        const BoundReport r = lemma7_bound(k, delta, SystemConfig::from_snr_db(k, 12.0), CVector::Ones(k), 256);
        const CMatrix inv = tridiagonal(k, delta).inverse();
        for (int i = 0; i < k; ++i) {
          CHECK(std::abs(r.inverse_gram_diag[i] - inv(i, i).real()) < 1e-9);
          CHECK(std::abs(r.inverse_gram_diag[i] - r.inverse_gram_diag[k - 1 - i]) < 1e-9);
          CHECK(r.inverse_gram_diag[i] >= 1.0);
        }
      }
    }

    // repeated root and the complex-root regime
    const BoundReport half = lemma7_bound(4, 0.5, SystemConfig::from_snr_db(4, 0.0), CVector::Ones(4), 16);
    const CMatrix inv_half = tridiagonal(4, 0.5).inverse();
    for (int i = 0; i < 4; ++i) {
      CHECK(half.inverse_gram_diag[i] == doctest::Approx(inv_half(i, i).real()).epsilon(1e-6));
    }
    const BoundReport complex_ok = lemma7_bound(3, 0.6, SystemConfig::from_snr_db(3, 0.0), CVector::Ones(3), 16);
    const CMatrix inv6 = tridiagonal(3, 0.6).inverse();
    CHECK(complex_ok.inverse_gram_diag[1] == doctest::Approx(inv6(1, 1).real()).epsilon(1e-9));
    CHECK_THROWS_AS(lemma7_bound(6, 0.6, SystemConfig::from_snr_db(6, 0.0), CVector::Ones(6), 16), NumericalError);

    // non-increasing in |delta|
    double previous = 1e300;
    for (double delta = 0.0; delta < 0.5; delta += 0.01) {
      const double v = lemma7_bound(6, delta, SystemConfig::from_snr_db(6, 12.0), CVector::Ones(6), 256).value;
      CHECK(v <= previous + 1e-12);
      previous = v;
    }
  }

  TEST_CASE("lemma6_bound three-user placement") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(256, 30e9);
    const SystemConfig sys = SystemConfig::from_snr_db(3, 12.0);
    const double r1 = 4.0;
    const double r3 = 150.0;
    const BoundReport b = lemma6_bound(cfg, 0.0, r1, r3, sys, 1.0);
    CHECK(b.r0 == doctest::Approx(1.0 / r1 - 1.0 / r3).epsilon(1e-15));
    CHECK(b.x_hat == doctest::Approx(0.5 * b.r0).epsilon(1e-15));
    CHECK(b.g_hat == doctest::Approx(lemma6_g(cfg, 0.0, b.x_hat)).epsilon(1e-15));

    // g is the squared envelope, so the adjacent correlation is sqrt(g)
    const double delta = std::sqrt(b.g_hat);
    const BoundReport t = lemma5_se_gram(tridiagonal(3, delta), CVector::Ones(3), sys, 256);
    CHECK(std::abs(b.value - t.value) < 1e-9);

    const BoundReport l7 = lemma7_bound(3, delta, sys, CVector::Ones(3), 256);
    CHECK(std::abs(l7.value - b.value) < 1e-9);
    CHECK(std::abs(l7.per_user[0] - b.per_user[0]) < 1e-9);
    CHECK(std::abs(l7.per_user[1] - b.per_user[1]) < 1e-9);

    // far-separated users: g = 0 gives the ideal rate
    const ArrayConfig big = ArrayConfig::half_wavelength(4096, 30e9);
    const BoundReport ideal_like = lemma6_bound(big, 0.0, 2.0, 1e9, sys, 1.0);
    CHECK(ideal_like.g_hat < 1e-3);
    CHECK(ideal_like.value == doctest::Approx(ideal_se(CVector::Ones(3), sys, 4096).value).epsilon(1e-3));

    CHECK_THROWS_AS(lemma6_bound(cfg, 0.0, 10.0, 5.0, sys, 1.0), ConfigError);
  }

  TEST_CASE("lemma6_bound middle placement dominates perturbed placements") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(256, 30e9);
    const SystemConfig sys = SystemConfig::from_snr_db(3, 12.0);
    const BoundReport b = lemma6_bound(cfg, 0.0, 4.0, 150.0, sys, 1.0);
    for (int i = 1; i <= 20; ++i) {
      const double x = b.r0 * (0.05 + 0.9 * i / 21.0);
      CMatrix t = CMatrix::Identity(3, 3);
      t(0, 1) = t(1, 0) = std::sqrt(lemma6_g(cfg, 0.0, x));
      t(1, 2) = t(2, 1) = std::sqrt(lemma6_g(cfg, 0.0, b.r0 - x));
      const double se = lemma5_se_gram(t, CVector::Ones(3), sys, 256).value;
      CHECK(b.value >= se - 1e-9);
    }
  }

  TEST_CASE("min-max placement") {
    const ArrayConfig cfg = ArrayConfig::half_wavelength(256, 30e9);
    CHECK_THROWS_AS(min_max_correlation(cfg, 0.0, 4.0, 150.0, 1), ConfigError);
    CHECK_THROWS_AS(min_max_correlation(cfg, 0.0, 150.0, 4.0, 2), ConfigError);

    const MinMaxPlacement two = min_max_correlation(cfg, 0.0, 4.0, 150.0, 2);
    REQUIRE(two.distances.size() == 2);
    CHECK(two.distances[0] < two.distances[1]);
    const double endpoints = max_pairwise_correlation(cfg, 0.0, {4.0, 150.0});
    CHECK(two.delta <= endpoints);
    // pairwise correlation oscillates in the inverse-distance gap, so any deep dip is optimal
    CHECK(max_pairwise_correlation(cfg, 0.0, two.distances) == doctest::Approx(two.delta).epsilon(1e-12));
    {
      const double u_lo = 1.0 / 150.0;
      const double step = (1.0 / 4.0 - u_lo) / 399.0;
      double oracle = 2.0;
      for (int j = 1; j < 400; ++j) {
        oracle = std::min(oracle, max_pairwise_correlation(cfg, 0.0, {1.0 / (u_lo + step * j), 150.0}));
      }
      CHECK(two.delta <= oracle + 1e-12);
    }

    // K = 3: agrees with a brute-force search over the middle position
    const MinMaxPlacement three = min_max_correlation(cfg, 0.0, 4.0, 150.0, 3);
    const double span = 1.0 / 4.0 - 1.0 / 150.0;
    const double step = span / 399.0;
    double oracle_u = 0.0;
    double oracle_delta = 2.0;
    for (int j = 0; j < 400; ++j) {
      const double u = 1.0 / 150.0 + step * j;
      const double m = max_pairwise_correlation(cfg, 0.0, {4.0, 1.0 / u, 150.0});
      if (m < oracle_delta) {
        oracle_delta = m;
        oracle_u = u;
      }
    }
    CHECK(std::abs(1.0 / three.distances[1] - oracle_u) <= step * (1.0 + 1e-9));
    CHECK(three.delta <= oracle_delta + 1e-12);
    CHECK(three.delta == doctest::Approx(max_pairwise_correlation(cfg, 0.0, three.distances)).epsilon(1e-12));

    for (int k = 2; k <= 6; ++k) {
      std::vector<double> uniform_inverse;
      for (int i = 0; i < k; ++i) {
        uniform_inverse.push_back(1.0 / (1.0 / 150.0 + span * i / (k - 1)));
      }
      const MinMaxPlacement p = min_max_correlation(cfg, 0.0, 4.0, 150.0, k);
      CHECK(p.delta <= max_pairwise_correlation(cfg, 0.0, uniform_inverse) + 1e-15);
      CHECK(p.delta_adjacent <= p.delta);
      for (std::size_t i = 1; i < p.distances.size(); ++i) {
        CHECK(p.distances[i - 1] <= p.distances[i]);
      }
      CHECK_FALSE(p.resolution_limited);
    }
    const MinMaxPlacement crowded = min_max_correlation(cfg, 0.0, 80.0, 81.0, 4);
    CHECK(crowded.resolution_limited);
  }
}
