// SPDX-License-Identifier: Apache-2.0
#include "ldma/precoding.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>

namespace ldma {

SystemConfig SystemConfig::equal_power(int num_users, double total_power, double noise_variance) {
  SystemConfig sys;
  sys.num_users = num_users;
  sys.num_rf_chains = num_users;
  sys.total_power = total_power;
  sys.noise_variance = noise_variance;
  sys.power_allocation = RVector::Constant(num_users, total_power / num_users);
  sys.validate();
  return sys;
}

SystemConfig SystemConfig::from_snr_db(int num_users, double snr_db, double total_power) {
  return equal_power(num_users, total_power, total_power / std::pow(10.0, snr_db / 10.0));
}

void SystemConfig::validate() const {
  if (num_users < 1) {
    throw ConfigError("SystemConfig: num_users must be >= 1");
  }
  if (num_rf_chains != num_users) {
    throw ConfigError("SystemConfig: num_rf_chains must equal num_users");
  }
  if (!(total_power > 0.0) || !(noise_variance > 0.0)) {
    throw ConfigError("SystemConfig: total_power and noise_variance must be positive");
  }
  if (power_allocation.size() != num_users) {
    throw ConfigError("SystemConfig: power_allocation must have one entry per user");
  }
  if ((power_allocation.array() < 0.0).any()) {
    throw ConfigError("SystemConfig: power_allocation must be non-negative");
  }
  if (std::abs(power_allocation.sum() - total_power) > 1e-9 * total_power) {
    throw ConfigError("SystemConfig: power_allocation must sum to total_power");
  }
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  if (s.size() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

EffectiveChannel effective_channel(const CMatrix& analog,
                                   const std::vector<ChannelRealization>& channels) {
  CMatrix stacked(static_cast<Eigen::Index>(channels.size()), analog.cols());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].h.size() != analog.rows()) {
      throw ConfigError("effective channel: channel length does not match F_A");
    }
    stacked.row(static_cast<Eigen::Index>(k)) = (analog.adjoint() * channels[k].h).adjoint();
  }
  return {stacked};
}

EffectiveChannel estimate_effective_channel(const CMatrix& analog,
                                            const std::vector<ChannelRealization>& channels,
                                            double pilot_noise_variance, Rng& rng) {
  if (!(pilot_noise_variance >= 0.0)) {
    throw ConfigError("estimate_effective_channel: pilot noise variance must be >= 0");
  }
  if (static_cast<Eigen::Index>(channels.size()) != analog.cols()) {
    throw ConfigError("estimate_effective_channel: need one channel per analog column");
  }
  EffectiveChannel out = effective_channel(analog, channels);
  if (pilot_noise_variance == 0.0) {
    return out;
  }
  for (std::size_t k = 0; k < channels.size(); ++k) {
    CVector noise(analog.rows());
    for (Eigen::Index i = 0; i < noise.size(); ++i) {
      noise[i] = complex_gaussian(rng, pilot_noise_variance);
    }
    out.stacked.row(static_cast<Eigen::Index>(k)) += (analog.adjoint() * noise).adjoint();
  }
  return out;
}

namespace {

void require_well_conditioned(const CMatrix& h, const char* what) {
  const double cond = condition_number(h);
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << what << ": channel is singular or ill-conditioned (condition number " << cond
        << " exceeds " << kMaxConditionNumber << ")";
    throw NumericalError(msg.str());
  }
}

// H^H (H H^H)^{-1} for a full-row-rank K x M matrix, via thin QR of H^H:
// H^H = Q R gives H^H (H H^H)^{-1} = Q R^{-H}.
CMatrix right_pseudo_inverse(const CMatrix& h) {
  const Eigen::Index k = h.rows();
  Eigen::HouseholderQR<CMatrix> qr(h.adjoint());
  const CMatrix q = qr.householderQ() * CMatrix::Identity(h.cols(), k);
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const CMatrix r_inv_h =
      r.adjoint().triangularView<Eigen::Lower>().solve(CMatrix::Identity(k, k));
  return q * r_inv_h;
}

}  // namespace

PrecoderSet zf_precoder(const EffectiveChannel& hbar, const SystemConfig& sys,
                        const CMatrix& analog) {
  sys.validate();
  const CMatrix& h = hbar.stacked;
  const Eigen::Index k = h.rows();
  if (h.cols() != k || k != sys.num_users || analog.cols() != k) {
    throw ConfigError("zf_precoder: effective channel must be K x K with K analog columns");
  }
  require_well_conditioned(h, "zf_precoder");
  const CMatrix f = right_pseudo_inverse(h);
  const CMatrix t = analog * f;
  PrecoderSet out;
  out.analog = analog;
  out.power_diag.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    out.power_diag[c] = 1.0 / t.col(c).norm();
  }
  out.digital = f * out.power_diag.cast<cdouble>().asDiagonal();
  out.power = sys.power_allocation;
  return out;
}

DigitalPrecoder fully_digital_zf(const std::vector<ChannelRealization>& channels,
                                 const SystemConfig& sys) {
  sys.validate();
  if (static_cast<int>(channels.size()) != sys.num_users || channels.empty()) {
    throw ConfigError("fully_digital_zf: need one channel per user");
  }
  const Eigen::Index n = channels[0].h.size();
  CMatrix h(static_cast<Eigen::Index>(channels.size()), n);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    h.row(static_cast<Eigen::Index>(k)) = channels[k].h.adjoint();
  }
  require_well_conditioned(h, "fully_digital_zf");
  DigitalPrecoder out;
  out.precoder = right_pseudo_inverse(h);
  out.precoder.colwise().normalize();
  out.power = sys.power_allocation;
  return out;
}

namespace {

struct MmseState {
  RVector mse;
  CVector receiver;
  double objective = 0.0;
};

// MMSE receivers, errors and the weighted-MSE objective at w_k = 1/e_k.
MmseState mmse_state(const CMatrix& hbar, const CMatrix& u, double noise) {
  const CMatrix a = hbar * u;  // a(k, l) = hbar_k^H u_l
  const Eigen::Index k = hbar.rows();
  MmseState st;
  st.mse.resize(k);
  st.receiver.resize(k);
  st.objective = static_cast<double>(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double total = a.row(i).squaredNorm() + noise;
    st.receiver[i] = a(i, i) / total;
    st.mse[i] = std::max(1.0 - std::norm(a(i, i)) / total, std::numeric_limits<double>::min());
    st.objective += std::log(st.mse[i]);
  }
  return st;
}

// argmin_U sum_k w_k E_k(U) s.t. sum_k u_k^H Q u_k <= P. With Q = L L^H and
// L^{-1} A L^{-H} = V diag(lambda) V^H the stream power for multiplier mu is
// sum |c_ik|^2 / (lambda_i + mu)^2, c = V^H L^{-1} B.
CMatrix precoder_update(const CMatrix& hbar, const Eigen::LLT<CMatrix>& q_chol,
                        const MmseState& st, double total_power) {
  const Eigen::Index k = hbar.rows();
  const RVector w = st.mse.cwiseInverse();
  CMatrix a = CMatrix::Zero(k, k);
  CMatrix b(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const CVector h = hbar.row(i).adjoint();
    a += (w[i] * std::norm(st.receiver[i])) * (h * h.adjoint());
    b.col(i) = (w[i] * st.receiver[i]) * h;
  }
  const CMatrix l = q_chol.matrixL();
  const auto l_tri = l.triangularView<Eigen::Lower>();
  const CMatrix l_inv_a = l_tri.solve(a);
  const CMatrix m = l_tri.solve(l_inv_a.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (m + m.adjoint()));
  const RVector lambda = eig.eigenvalues().cwiseMax(0.0);
  const CMatrix c = eig.eigenvectors().adjoint() * l_tri.solve(b);
  const RVector c2 = c.cwiseAbs2().rowwise().sum();

  const auto power = [&](double mu) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double denom = lambda[i] + mu;
      p += c2[i] / (denom * denom);
    }
    return p;
  };

  double mu = 0.0;
  const double lambda_min = lambda.minCoeff();
  if (!(lambda_min > 1e-14 * std::max(1.0, lambda.maxCoeff()) && power(0.0) <= total_power)) {
    double lo = 0.0;
    double hi = std::sqrt(c2.sum() / total_power) + 1e-300;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (power(mid) > total_power ? lo : hi) = mid;
    }
    mu = hi;
  }
  const RVector scale = (lambda.array() + mu).inverse();
  const CMatrix v = eig.eigenvectors() * scale.cast<cdouble>().asDiagonal() * c;
  return l_tri.adjoint().solve(v);
}

}  // namespace

WmmseResult wmmse_precoder(const EffectiveChannel& hbar_in, const SystemConfig& sys,
                           const CMatrix& analog, const WmmseOptions& options) {
  sys.validate();
  if (options.max_iters < 1 || !(options.tol > 0.0)) {
    throw ConfigError("wmmse_precoder: need max_iters >= 1 and tol > 0");
  }
  const CMatrix& hbar = hbar_in.stacked;
  const Eigen::Index k = hbar.rows();
  if (hbar.cols() != k || k != sys.num_users || analog.cols() != k) {
    throw ConfigError("wmmse_precoder: effective channel must be K x K with K analog columns");
  }
  const CMatrix q = analog.adjoint() * analog;
  Eigen::LLT<CMatrix> q_chol(q);
  if (q_chol.info() != Eigen::Success) {
    throw NumericalError("wmmse_precoder: analog precoder columns are linearly dependent");
  }

  // Initial point with sum_k ||F_A u_k||^2 = P.
  CMatrix u(k, k);
  bool initialized = false;
  if (options.init_from_zf) {
    try {
      const PrecoderSet zf = zf_precoder(hbar_in, sys, analog);
      u = zf.digital * sys.power_allocation.cwiseSqrt().cast<cdouble>().asDiagonal();
      initialized = true;
    } catch (const NumericalError&) {
    }
  }
  if (!initialized) {
    for (Eigen::Index i = 0; i < k; ++i) {
      u.col(i) = hbar.row(i).adjoint();
      const double norm = (analog * u.col(i)).norm();
      u.col(i) *= norm > 0.0 ? std::sqrt(sys.power_allocation[i]) / norm : 0.0;
    }
  }

  WmmseResult result;
  MmseState st = mmse_state(hbar, u, sys.noise_variance);
  result.objective_history.push_back(st.objective);
  CMatrix best_u = u;
  double best_obj = st.objective;
  for (int it = 0; it < options.max_iters; ++it) {
    u = precoder_update(hbar, q_chol, st, sys.total_power);
    const double prev = st.objective;
    st = mmse_state(hbar, u, sys.noise_variance);
    result.objective_history.push_back(st.objective);
    result.iterations = it + 1;
    assert(st.objective <= prev + 1e-9 * std::max(1.0, std::abs(prev)));
    if (st.objective < best_obj) {
      best_obj = st.objective;
      best_u = u;
    }
    if (prev - st.objective < options.tol) {
      result.converged = true;
      break;
    }
  }

  PrecoderSet& out = result.precoders;
  out.analog = analog;
  out.digital.resize(k, k);
  out.power_diag.resize(k);
  out.power.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double norm = (analog * best_u.col(i)).norm();
    if (norm > 0.0) {
      out.power[i] = norm * norm;
      out.power_diag[i] = 1.0 / norm;
      out.digital.col(i) = best_u.col(i) / norm;
    } else {
      // Stream switched off: keep a valid unit-norm direction with zero power.
      CVector dir = CVector::Zero(k);
      dir[i] = 1.0;
      const double n0 = (analog * dir).norm();
      out.power[i] = 0.0;
      out.power_diag[i] = 1.0 / n0;
      out.digital.col(i) = dir / n0;
    }
  }
  return result;
}

}  // namespace ldma
