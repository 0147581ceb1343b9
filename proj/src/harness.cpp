// SPDX-License-Identifier: Apache-2.0
#include "ldma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <thread>

#include <json.hpp>

#include "ldma/codebook.hpp"
#include "ldma/correlation.hpp"
#include "ldma/performance.hpp"
#include "ldma/rng.hpp"

#ifndef LDMA_GIT_DESCRIBE
#define LDMA_GIT_DESCRIBE "unknown"
#endif

namespace ldma {

const ResultRow& RunResult::at(const std::string& method, double sweep_value) const {
  for (const auto& row : rows) {
    if (row.method == method && row.sweep_value == sweep_value) {
      return row;
    }
  }
  throw std::out_of_range("RunResult: no row for " + method);
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Runs body(i) for i in [0, count). Results must be written to per-index
// slots; the lowest failing index's exception is rethrown.
template <typename Body>
void parallel_for(int count, int workers, Body&& body) {
  if (workers <= 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};

// Two-pass in index order, so results do not depend on scheduling.
MeanStd mean_and_error(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) {
      ss += (x - out.mean) * (x - out.mean);
    }
    out.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

}  // namespace

std::string to_csv(const RunResult& result) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : result.rows) {
    out += result.scenario_id;
    out += ',';
    out += row.sweep_var;
    out += ',';
    out += fmt17(row.sweep_value);
    out += ',';
    out += row.method;
    out += ',';
    out += fmt17(row.mean);
    out += ',';
    out += fmt17(row.std_error);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// correlation_sweep

RunResult run_correlation_sweep(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto& cs = cfg.correlation;
  const Location a(cs.distance_a, cs.angle_a);
  const Location b(cs.distance_b, cs.angle_b);
  const bool same_angle = cs.angle_a == cs.angle_b;
  RunResult out{cfg.id, {}};
  const auto emit = [&](int n, const char* method, double value) {
    out.rows.push_back({"N", static_cast<double>(n), method, value, 0.0, 1, cfg.seed});
  };
  for (int n : cs.antenna_grid) {
    const ArrayConfig array = cfg.array.make(n);
    emit(n, "exact", focusing_correlation_exact(array, a, b, DistanceMode::exact));
    emit(n, "exact_second_order", focusing_correlation_exact(array, a, b, DistanceMode::second_order));
    if (same_angle) {
      const CorrelationReport rep = focusing_correlation_approx(array, cs.distance_a, cs.distance_b, cs.angle_a);
      emit(n, "approx", rep.approx_value);
      emit(n, "abs_error", rep.abs_error_geometry);
      emit(n, "abs_error_second_order", rep.abs_error);
      emit(n, "beta", rep.approx_beta);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// linear_bound

namespace {

using SmallMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, 0, 32, 32>;

// Single-path ZF rate from the focusing vectors: 1/[G^{-1}]_kk is the squared
// residual of b_k against the other users, read off R of a QR with b_k last.
// Stays finite (and non-negative) for numerically dependent placements.
double vectors_rate(const std::vector<CVector>& vecs, double rho_n) {
  const int k = static_cast<int>(vecs.size());
  const Eigen::Index n = vecs.front().size();
  CMatrix b(n, k);
  double rate = 0.0;
  for (int u = 0; u < k; ++u) {
    int col = 0;
    for (int v = 0; v < k; ++v) {
      if (v != u) {
        b.col(col++) = vecs[v];
      }
    }
    b.col(k - 1) = vecs[u];
    Eigen::HouseholderQR<CMatrix> qr(b);
    const double residual = std::norm(qr.matrixQR()(k - 1, k - 1));
    rate += std::log2(1.0 + rho_n * residual);
  }
  return rate;
}

double placement_rate(const ArrayConfig& array, double angle, const std::vector<double>& distances,
                      double rho_n) {
  std::vector<CVector> vecs;
  for (double r : distances) {
    vecs.push_back(focusing_vector(array, Location(r, angle)));
  }
  return vectors_rate(vecs, rho_n);
}

// Max rate over all K-subsets of the grid (users are interchangeable, so
// only increasing index tuples are visited). Depth-first with the Cholesky
// factor, its inverse and the inverse-Gram diagonal extended one user per
// level.
class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const CMatrix& gram, int k, double rho_n)
      : gram_(gram), k_(k), rho_n_(rho_n), idx_(k), l_(k, k), linv_(k, k), diag_(k + 1, k) {}

  double run() {
    best_ = -std::numeric_limits<double>::infinity();
    descend(0, 0);
    return best_;
  }

 private:
  void descend(int depth, int first) {
    const int g = static_cast<int>(gram_.rows());
    for (int j = first; j <= g - (k_ - depth); ++j) {
      idx_[depth] = j;
      if (!extend(depth)) {
        continue;
      }
      if (depth + 1 == k_) {
        double prod = 1.0;
        for (int c = 0; c < k_; ++c) {
          prod *= 1.0 + rho_n_ / diag_(k_, c);
        }
        best_ = std::max(best_, std::log2(prod));
      } else {
        descend(depth + 1, j + 1);
      }
    }
  }

  // Row `d` of L and of L^{-1}; false when the Gram is not positive definite.
  bool extend(int d) {
    const int jd = idx_[d];
    double norm = gram_(jd, jd).real();
    for (int c = 0; c < d; ++c) {
      cdouble v = gram_(jd, idx_[c]);
      for (int m = 0; m < c; ++m) {
        v -= l_(d, m) * std::conj(l_(c, m));
      }
      v /= l_(c, c);
      l_(d, c) = v;
      norm -= std::norm(v);
    }
    if (!(norm > 1e-14)) {
      return false;
    }
    const double ldd = std::sqrt(norm);
    l_(d, d) = ldd;
    for (int c = 0; c < d; ++c) {
      cdouble v = 0.0;
      for (int m = c; m < d; ++m) {
        v -= l_(d, m) * linv_(m, c);
      }
      linv_(d, c) = v / ldd;
    }
    linv_(d, d) = 1.0 / ldd;
    for (int c = 0; c < d; ++c) {
      diag_(d + 1, c) = diag_(d, c) + std::norm(linv_(d, c));
    }
    diag_(d + 1, d) = 1.0 / norm;
    return true;
  }

  const CMatrix& gram_;
  int k_;
  double rho_n_;
  double best_ = 0.0;
  std::vector<int> idx_;
  CMatrix l_;
  CMatrix linv_;
  Eigen::MatrixXd diag_;
};

// Coordinate ascent on the rate over grid candidates, from a start placement.
double coordinate_rate_search(const CMatrix& grid_vecs, std::vector<CVector> users, double rho_n,
                              int passes) {
  const int k = static_cast<int>(users.size());
  const auto rate_of = [&](const std::vector<CVector>& u) { return vectors_rate(u, rho_n); };
  double best = rate_of(users);
  for (int pass = 0; pass < passes; ++pass) {
    bool moved = false;
    for (int i = 0; i < k; ++i) {
      const CVector keep = users[i];
      int best_j = -1;
      for (Eigen::Index j = 0; j < grid_vecs.cols(); ++j) {
        users[i] = grid_vecs.col(j);
        const double r = rate_of(users);
        if (r > best) {
          best = r;
          best_j = static_cast<int>(j);
        }
      }
      users[i] = best_j >= 0 ? CVector(grid_vecs.col(best_j)) : keep;
      moved = moved || best_j >= 0;
    }
    if (!moved) {
      break;
    }
  }
  return best;
}

}  // namespace

RunResult run_linear_bound(const ScenarioConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const ArrayConfig array = cfg.array.make();
  const auto& lb = cfg.linear_bound;
  const UserRegion& region = cfg.user_region;
  const double angle = region.min_angle;
  const double snr_db = cfg.snr_grid.front();
  const int n = array.num_antennas();
  const double u_lo = 1.0 / region.max_distance;
  const double u_hi = 1.0 / region.min_distance;

  CMatrix grid_vecs(n, lb.exhaustive_grid);
  for (int j = 0; j < lb.exhaustive_grid; ++j) {
    const double u = u_lo + (u_hi - u_lo) * j / (lb.exhaustive_grid - 1);
    grid_vecs.col(j) = focusing_vector(array, Location(1.0 / u, angle));
  }
  const CMatrix grid_gram = grid_vecs.adjoint() * grid_vecs;

  RunResult out{cfg.id, {}};
  const auto emit = [&](int k, const char* method, double mean, double err, int trials) {
    out.rows.push_back({"K", static_cast<double>(k), method, mean, err, trials, cfg.seed});
  };

  for (int k = 1; k <= lb.k_max; ++k) {
    const SystemConfig sys = SystemConfig::from_snr_db(k, snr_db, cfg.total_power);
    const CVector gains = CVector::Ones(k);
    const double rho_n = sys.total_power / (k * sys.noise_variance) * n;
    // Far-field SDMA: all users share one steering direction, one is served.
    const double sdma = std::log2(1.0 + sys.snr() * n);

    if (k == 1) {
      const double single = ideal_se(gains, sys, n).value;
      for (const char* m : {"bound", "reachable", "exhaustive", "random"}) {
        emit(1, m, single, 0.0, 1);
      }
      emit(1, "sdma", sdma, 0.0, 1);
      continue;
    }

    const MinMaxPlacement placement =
        min_max_correlation(array, angle, region.min_distance, region.max_distance, k,
                            {lb.placement_grid_points, lb.placement_passes});
    double bound = std::numeric_limits<double>::quiet_NaN();
    try {
      bound = lemma7_bound(k, placement.delta_adjacent, sys, gains, n).value;
    } catch (const NumericalError&) {
      // Adjacent correlation outside the bound's regime; leave NaN.
    }
    const double reachable = placement_rate(array, angle, placement.distances, rho_n);

    double exhaustive;
    if (k <= lb.exhaustive_max_users && k <= lb.exhaustive_grid) {
      exhaustive = ExhaustiveSearch(grid_gram, k, rho_n).run();
    } else {
      std::vector<CVector> start;
      for (double r : placement.distances) {
        start.push_back(focusing_vector(array, Location(r, angle)));
      }
      exhaustive = coordinate_rate_search(grid_vecs, start, rho_n, lb.placement_passes);
    }

    std::vector<double> random(cfg.num_trials);
    parallel_for(cfg.num_trials, options.workers, [&](int t) {
      Rng rng = derive_stream(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(k)), t);
      std::vector<double> dist(k);
      for (double& r : dist) {
        r = region.distance_sampling == DistanceSampling::inverse ? 1.0 / uniform(rng, u_lo, u_hi)
                                                                  : uniform(rng, region.min_distance, region.max_distance);
      }
      random[t] = placement_rate(array, angle, dist, rho_n);
    });
    const MeanStd rs = mean_and_error(random);

    emit(k, "bound", bound, 0.0, 1);
    emit(k, "reachable", reachable, 0.0, 1);
    emit(k, "exhaustive", exhaustive, 0.0, 1);
    emit(k, "random", rs.mean, rs.std_error, cfg.num_trials);
    emit(k, "sdma", sdma, 0.0, 1);
    emit(k, "min_max_delta", placement.delta, 0.0, 1);
    emit(k, "min_max_delta_adjacent", placement.delta_adjacent, 0.0, 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// multipath scenarios

std::string method_label(PrecoderMethod method, const CodebookSpec& codebook) {
  const bool polar = codebook.kind == "polar";
  switch (method) {
    case PrecoderMethod::zf:
      return polar ? "ldma_zf" : "sdma_zf";
    case PrecoderMethod::wmmse:
      return polar ? "ldma_wmmse" : "sdma_wmmse";
    case PrecoderMethod::fully_digital_zf:
      return "fully_digital_zf";
    case PrecoderMethod::sdma_dft_zf:
      return "sdma_zf";
    case PrecoderMethod::sdma_dft_wmmse:
      return "sdma_wmmse";
  }
  return "unknown";
}

namespace {

struct MultipathContext {
  ArrayConfig array;
  std::optional<Codebook> configured;  // codebook for zf / wmmse
  std::optional<Codebook> dft;         // codebook for sdma_dft_*
  std::vector<std::string> labels;     // unique, in config order
};

MultipathContext make_context(const ScenarioConfig& cfg) {
  MultipathContext ctx{cfg.array.make(), std::nullopt, std::nullopt, {}};
  bool need_configured = false;
  bool need_dft = false;
  for (PrecoderMethod m : cfg.precoders) {
    need_configured |= m == PrecoderMethod::zf || m == PrecoderMethod::wmmse;
    need_dft |= m == PrecoderMethod::sdma_dft_zf || m == PrecoderMethod::sdma_dft_wmmse;
    const std::string label = method_label(m, cfg.codebook);
    if (std::find(ctx.labels.begin(), ctx.labels.end(), label) == ctx.labels.end()) {
      ctx.labels.push_back(label);
    }
  }
  if (need_configured) {
    ctx.configured = cfg.codebook.kind == "polar"
                         ? build_polar_codebook(ctx.array,
                                                cfg.codebook.min_distance.value_or(cfg.user_region.min_distance),
                                                cfg.codebook.coherence_target)
                         : build_dft_codebook(ctx.array);
  }
  if (need_dft) {
    ctx.dft = build_dft_codebook(ctx.array);
  }
  return ctx;
}

std::vector<Location> sample_users(const ScenarioConfig& cfg, Rng& rng) {
  const UserRegion& region = cfg.user_region;
  const auto distance = [&] {
    if (region.distance_sampling == DistanceSampling::inverse) {
      return 1.0 / uniform(rng, 1.0 / region.max_distance, 1.0 / region.min_distance);
    }
    return uniform(rng, region.min_distance, region.max_distance);
  };
  const auto angle = [&] {
    return region.min_angle == region.max_angle ? region.min_angle
                                                : uniform(rng, region.min_angle, region.max_angle);
  };
  std::vector<Location> users;
  if (cfg.scenario_kind == ScenarioKind::linear_multipath) {
    const double common = angle();
    for (int k = 0; k < cfg.num_users; ++k) {
      users.emplace_back(distance(), common);
    }
  } else {
    for (int k = 0; k < cfg.num_users; ++k) {
      const double a = angle();
      users.emplace_back(distance(), a);
    }
  }
  return users;
}

TrialRates simulate_trial(const ScenarioConfig& cfg, const MultipathContext& ctx, int trial) {
  Rng rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
  std::vector<ChannelRealization> channels;
  for (const Location& loc : sample_users(cfg, rng)) {
    channels.push_back(
        sample_near_channel(ctx.array, loc, cfg.num_nlos, *cfg.kappa, cfg.scatter_region, rng));
  }

  struct Hybrid {
    CMatrix analog;
    EffectiveChannel hbar;
  };
  const auto prepare = [&](const std::optional<Codebook>& cb) -> std::optional<Hybrid> {
    if (!cb) {
      return std::nullopt;
    }
    const CMatrix analog = analog_precoder(*cb, sweep_assign(channels, *cb));
    return Hybrid{analog, estimate_effective_channel(analog, channels, cfg.pilot_noise_variance, rng)};
  };
  const std::optional<Hybrid> configured = prepare(ctx.configured);
  const std::optional<Hybrid> dft = prepare(ctx.dft);

  TrialRates rates;
  for (const auto& label : ctx.labels) {
    rates[label].reserve(cfg.snr_grid.size());
  }
  for (std::size_t s = 0; s < cfg.snr_grid.size(); ++s) {
    const SystemConfig sys = cfg.system_at(cfg.snr_grid[s]);
    for (PrecoderMethod m : cfg.precoders) {
      const std::string label = method_label(m, cfg.codebook);
      auto& series = rates[label];
      if (series.size() > s) {
        continue;  // duplicate label already evaluated at this SNR
      }
      double value = 0.0;
      switch (m) {
        case PrecoderMethod::zf:
        case PrecoderMethod::sdma_dft_zf: {
          const Hybrid& hy = m == PrecoderMethod::zf ? *configured : *dft;
          value = spectrum_efficiency(channels, zf_precoder(hy.hbar, sys, hy.analog), sys).sum_rate;
          break;
        }
        case PrecoderMethod::wmmse:
        case PrecoderMethod::sdma_dft_wmmse: {
          const Hybrid& hy = m == PrecoderMethod::wmmse ? *configured : *dft;
          const WmmseResult w = wmmse_precoder(hy.hbar, sys, hy.analog, cfg.wmmse);
          value = spectrum_efficiency(channels, w.precoders, sys).sum_rate;
          break;
        }
        case PrecoderMethod::fully_digital_zf: {
          const DigitalPrecoder fd = fully_digital_zf(channels, sys);
          value = spectrum_efficiency(channels, fd.precoder, fd.power, sys.noise_variance).sum_rate;
          break;
        }
      }
      series.push_back(value);
    }
  }
  return rates;
}

RunResult run_multipath(const ScenarioConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const MultipathContext ctx = make_context(cfg);
  std::vector<TrialRates> trials(cfg.num_trials);
  parallel_for(cfg.num_trials, options.workers,
               [&](int t) { trials[t] = simulate_trial(cfg, ctx, t); });

  RunResult out{cfg.id, {}};
  for (std::size_t s = 0; s < cfg.snr_grid.size(); ++s) {
    for (const auto& label : ctx.labels) {
      std::vector<double> values;
      values.reserve(trials.size());
      for (const auto& tr : trials) {
        values.push_back(tr.at(label)[s]);
      }
      const MeanStd ms = mean_and_error(values);
      out.rows.push_back({"snr_db", cfg.snr_grid[s], label, ms.mean, ms.std_error, cfg.num_trials, cfg.seed});
    }
  }
  return out;
}

}  // namespace

TrialRates simulate_multipath_trial(const ScenarioConfig& cfg, int trial) {
  cfg.validate();
  return simulate_trial(cfg, make_context(cfg), trial);
}

RunResult run_linear_multipath(const ScenarioConfig& cfg, const RunOptions& options) {
  if (cfg.scenario_kind != ScenarioKind::linear_multipath) {
    throw ConfigError("run_linear_multipath: scenario_kind must be linear_multipath");
  }
  return run_multipath(cfg, options);
}

RunResult run_uniform_cell(const ScenarioConfig& cfg, const RunOptions& options) {
  if (cfg.scenario_kind != ScenarioKind::uniform_cell) {
    throw ConfigError("run_uniform_cell: scenario_kind must be uniform_cell");
  }
  return run_multipath(cfg, options);
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  switch (cfg.scenario_kind) {
    case ScenarioKind::correlation_sweep:
      return run_correlation_sweep(cfg);
    case ScenarioKind::linear_bound:
      return run_linear_bound(cfg, options);
    case ScenarioKind::linear_multipath:
      return run_linear_multipath(cfg, options);
    case ScenarioKind::uniform_cell:
      return run_uniform_cell(cfg, options);
  }
  throw ConfigError("unknown scenario kind");
}

std::string git_describe() { return LDMA_GIT_DESCRIBE; }

std::string run_manifest(const ScenarioConfig& cfg, double wall_time_s, int workers,
                         const std::string& csv_name) {
  nlohmann::ordered_json doc;
  doc["config"] = nlohmann::ordered_json::parse(scenario_to_json(cfg));
  doc["seed"] = cfg.seed;
  doc["git_describe"] = git_describe();
  doc["wall_time_s"] = wall_time_s;
  doc["workers"] = workers;
  doc["csv"] = csv_name;
  return doc.dump(2) + "\n";
}

}  // namespace ldma
