// SPDX-License-Identifier: Apache-2.0
#include "ldma/performance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

#include "ldma/correlation.hpp"

namespace ldma {

RateReport spectrum_efficiency(const std::vector<ChannelRealization>& channels,
                               const CMatrix& transmit, const RVector& power,
                               double noise_variance) {
  const Eigen::Index k = static_cast<Eigen::Index>(channels.size());
  if (transmit.cols() != k || power.size() != k) {
    throw ConfigError("spectrum_efficiency: need one transmit column and power per user");
  }
  RateReport out;
  out.per_user_rates.resize(k);
  out.sinr.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (channels[i].h.size() != transmit.rows()) {
      throw ConfigError("spectrum_efficiency: channel length does not match precoder");
    }
    const Eigen::RowVectorXcd gains = channels[i].h.adjoint() * transmit;
    double interference = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      if (l != i) {
        interference += power[l] * std::norm(gains[l]);
      }
    }
    out.sinr[i] = power[i] * std::norm(gains[i]) / (noise_variance + interference);
    out.per_user_rates[i] = std::log2(1.0 + out.sinr[i]);
  }
  out.sum_rate = out.per_user_rates.sum();
  return out;
}

RateReport spectrum_efficiency(const std::vector<ChannelRealization>& channels,
                               const PrecoderSet& precoders, const SystemConfig& sys) {
  return spectrum_efficiency(channels, precoders.transmit(), precoders.power, sys.noise_variance);
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::lemma5:
      return "lemma5";
    case BoundKind::ideal:
      return "ideal";
    case BoundKind::lemma6_aub:
      return "lemma6_aub";
    case BoundKind::lemma7_aub:
      return "lemma7_aub";
  }
  return "unknown";
}

namespace {

double snr_per_user(const SystemConfig& sys, int num_users) {
  return sys.total_power / (num_users * sys.noise_variance);
}

void finish(BoundReport& report) {
  report.value = 0.0;
  for (double r : report.per_user) {
    report.value += r;
  }
}

}  // namespace

BoundReport lemma5_se_gram(const CMatrix& gram, const CVector& gains, const SystemConfig& sys,
                           int num_antennas) {
  const Eigen::Index k = gram.rows();
  if (gram.cols() != k || gains.size() != k) {
    throw ConfigError("lemma5_se: Gram matrix must be K x K with K gains");
  }
  const double cond = condition_number(gram);
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "lemma5_se: Gram matrix is singular (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("lemma5_se: Gram matrix is not positive definite");
  }
  const CMatrix inv = llt.solve(CMatrix::Identity(k, k));
  const double rho = snr_per_user(sys, static_cast<int>(k));
  BoundReport out;
  out.kind = BoundKind::lemma5;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double diag = inv(i, i).real();
    out.inverse_gram_diag.push_back(diag);
    out.per_user.push_back(std::log2(1.0 + rho * num_antennas * std::norm(gains[i]) / diag));
  }
  finish(out);
  return out;
}

BoundReport lemma5_se(const CMatrix& focusing, const CVector& gains, const SystemConfig& sys) {
  return lemma5_se_gram(focusing.adjoint() * focusing, gains, sys,
                        static_cast<int>(focusing.rows()));
}

BoundReport ideal_se(const CVector& gains, const SystemConfig& sys, int num_antennas) {
  const int k = static_cast<int>(gains.size());
  BoundReport out;
  out.kind = BoundKind::ideal;
  if (k == 0) {
    return out;
  }
  const double rho = snr_per_user(sys, k);
  for (int i = 0; i < k; ++i) {
    out.per_user.push_back(std::log2(1.0 + rho * num_antennas * std::norm(gains[i])));
  }
  finish(out);
  return out;
}

double lemma6_g(const ArrayConfig& cfg, double angle, double inverse_gap) {
  const double d = cfg.element_spacing();
  const double c = std::cos(angle);
  const double beta =
      cfg.num_antennas() * std::sqrt(d * d * c * c / (2.0 * cfg.wavelength()) * std::abs(inverse_gap));
  const double env = FresnelEnvelope::instance()(beta);
  return env * env;
}

BoundReport lemma6_bound(const ArrayConfig& cfg, double angle, double r1, double r3,
                         const SystemConfig& sys, double gain_magnitude) {
  if (!(r1 > 0.0) || !(r1 < r3)) {
    throw ConfigError("lemma6_bound: need 0 < r1 < r3");
  }
  BoundReport out;
  out.kind = BoundKind::lemma6_aub;
  out.r0 = 1.0 / r1 - 1.0 / r3;
  out.x_hat = 0.5 * out.r0;
  out.g_hat = lemma6_g(cfg, angle, out.x_hat);
  const double g = out.g_hat;
  if (!(1.0 - 2.0 * g > 0.0)) {
    throw NumericalError("lemma6_bound: adjacent correlation too large (1 - 2 g <= 0)");
  }
  const double snr = snr_per_user(sys, 3) * cfg.num_antennas() * gain_magnitude * gain_magnitude;
  const double outer = std::log2(1.0 + snr * (1.0 - 2.0 * g) / (1.0 - g));
  const double middle = std::log2(1.0 + snr * (1.0 - 2.0 * g));
  out.per_user = {outer, middle, outer};
  out.inverse_gram_diag = {(1.0 - g) / (1.0 - 2.0 * g), 1.0 / (1.0 - 2.0 * g),
                           (1.0 - g) / (1.0 - 2.0 * g)};
  finish(out);
  return out;
}

BoundReport lemma7_bound(int num_users, double delta, const SystemConfig& sys,
                         const CVector& gains, int num_antennas) {
  using cd = std::complex<double>;
  if (num_users < 1 || gains.size() != num_users) {
    throw ConfigError("lemma7_bound: need K >= 1 and K gains");
  }
  if (!(delta >= 0.0)) {
    throw ConfigError("lemma7_bound: |delta| must be >= 0");
  }
  BoundReport out;
  out.kind = BoundKind::lemma7_aub;
  out.delta = delta;
  const cd root = std::sqrt(cd(1.0 - 4.0 * delta * delta, 0.0));
  const cd x1 = 0.5 * (1.0 - root);
  const cd x2 = 0.5 * (1.0 + root);
  out.x1 = x1.real();
  out.x2 = x2.real();

  // D(m) = chi1 x1^m + chi2 x2^m, the determinant of the leading (m+1) x (m+1)
  // tridiagonal block; D(-1) = D(0) = 1.
  std::function<cd(int)> det;
  const bool repeated = std::abs(x2 - x1) < 1e-7;
  if (repeated) {
    // Double root x = 1/2: D(m) = (m + 2) x^(m+1).
    det = [x1, x2](int m) { return static_cast<double>(m + 2) * std::pow(0.5 * (x1 + x2), m + 1); };
  } else {
    const cd chi1 = -x1 * x1 / (x2 - x1);
    const cd chi2 = x2 * x2 / (x2 - x1);
    out.chi1 = chi1.real();
    out.chi2 = chi2.real();
    det = [=](int m) {
      const cd t1 = chi1 == cd(0.0) ? cd(0.0) : chi1 * std::pow(x1, m);
      const cd t2 = chi2 == cd(0.0) ? cd(0.0) : chi2 * std::pow(x2, m);
      return t1 + t2;
    };
  }

  const int k_total = num_users;
  const double rho = snr_per_user(sys, k_total);
  const cd denom = det(k_total - 1);
  for (int k = 1; k <= k_total; ++k) {
    const cd gamma = det(k - 2) * det(k_total - k - 1) / denom;
    if (std::abs(gamma.imag()) > 1e-9) {
      std::ostringstream msg;
      msg << "lemma7_bound: gamma_" << k << " has imaginary residue " << gamma.imag()
          << " at |delta| = " << delta;
      throw NumericalError(msg.str());
    }
    if (!(gamma.real() > 0.0)) {
      std::ostringstream msg;
      msg << "lemma7_bound: gamma_" << k << " = " << gamma.real()
          << " is not positive at |delta| = " << delta;
      throw NumericalError(msg.str());
    }
    out.inverse_gram_diag.push_back(gamma.real());
    out.per_user.push_back(
        std::log2(1.0 + rho * num_antennas * std::norm(gains[k - 1]) / gamma.real()));
  }
  finish(out);
  return out;
}

double max_pairwise_correlation(const ArrayConfig& cfg, double angle,
                                const std::vector<double>& distances) {
  std::vector<CVector> vecs;
  for (double r : distances) {
    vecs.push_back(focusing_vector(cfg, Location(r, angle)));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      worst = std::max(worst, std::abs(vecs[i].dot(vecs[j])));
    }
  }
  return worst;
}

MinMaxPlacement min_max_correlation(const ArrayConfig& cfg, double angle, double r_min,
                                    double r_max, int num_users, const MinMaxOptions& options) {
  if (num_users < 2) {
    throw ConfigError("min_max_correlation: need K >= 2");
  }
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw ConfigError("min_max_correlation: need 0 < r_min < r_max");
  }
  if (options.grid_points < 2 || options.passes < 0) {
    throw ConfigError("min_max_correlation: need >= 2 grid points and >= 0 passes");
  }
  const double u_lo = 1.0 / r_max;
  const double u_hi = 1.0 / r_min;
  const auto vec_at = [&](double u) { return focusing_vector(cfg, Location(1.0 / u, angle)); };

  std::vector<double> grid(options.grid_points);
  std::vector<CVector> grid_vecs(options.grid_points);
  for (int j = 0; j < options.grid_points; ++j) {
    grid[j] = u_lo + (u_hi - u_lo) * j / (options.grid_points - 1);
    grid_vecs[j] = vec_at(grid[j]);
  }

  std::vector<double> pos(num_users);
  std::vector<CVector> vecs(num_users);
  for (int i = 0; i < num_users; ++i) {
    pos[i] = u_lo + (u_hi - u_lo) * i / (num_users - 1);
    vecs[i] = vec_at(pos[i]);
  }
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(num_users, num_users);
  for (int i = 0; i < num_users; ++i) {
    for (int j = i + 1; j < num_users; ++j) {
      corr(i, j) = corr(j, i) = std::abs(vecs[i].dot(vecs[j]));
    }
  }

  for (int pass = 0; pass < options.passes; ++pass) {
    bool moved = false;
    for (int i = 0; i < num_users; ++i) {
      double fixed_max = 0.0;
      for (int a = 0; a < num_users; ++a) {
        for (int b = a + 1; b < num_users; ++b) {
          if (a != i && b != i) {
            fixed_max = std::max(fixed_max, corr(a, b));
          }
        }
      }
      double current = fixed_max;
      for (int a = 0; a < num_users; ++a) {
        if (a != i) {
          current = std::max(current, corr(i, a));
        }
      }
      int best_j = -1;
      double best = current;
      for (int j = 0; j < options.grid_points; ++j) {
        double cand = fixed_max;
        for (int a = 0; a < num_users && cand < best; ++a) {
          if (a != i) {
            cand = std::max(cand, std::abs(grid_vecs[j].dot(vecs[a])));
          }
        }
        if (cand < best) {
          best = cand;
          best_j = j;
        }
      }
      if (best_j >= 0) {
        moved = true;
        pos[i] = grid[best_j];
        vecs[i] = grid_vecs[best_j];
        for (int a = 0; a < num_users; ++a) {
          if (a != i) {
            corr(i, a) = corr(a, i) = std::abs(vecs[i].dot(vecs[a]));
          }
        }
      }
    }
    if (!moved) {
      break;
    }
  }

  std::vector<int> order(num_users);
  for (int i = 0; i < num_users; ++i) {
    order[i] = i;
  }
  // Ascending distance = descending inverse distance.
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pos[a] > pos[b]; });
  MinMaxPlacement out;
  for (int idx : order) {
    out.distances.push_back(1.0 / pos[idx]);
  }
  out.delta = corr.maxCoeff();
  for (int t = 0; t + 1 < num_users; ++t) {
    out.delta_adjacent = std::max(out.delta_adjacent, corr(order[t], order[t + 1]));
  }
  out.resolution_limited = out.delta >= 0.99;
  return out;
}

}  // namespace ldma
