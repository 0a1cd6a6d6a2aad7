/*
 * Copyright 2026 The sptlab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
/**
 * @file simulator.hpp
 * @brief Seeded Monte Carlo for the fixed-parameter, volatility-stabilized
 *        and rank-based (Atlas) markets, with estimators for realized growth,
 *        realized covariance, collision local times and the decomposition of
 *        relative performance into generating-function and drift parts.
 *
 * Every path owns an independent random stream (see rng.hpp) and writes its
 * own PathRecord; aggregation walks the records in path order, so a report is
 * bit-identical for any worker count.
 *
 * Portfolio values are advanced with weighted arithmetic returns
 * ln(sum_i pi_i exp(dx_i)) where dx are the log-cap increments of the step and
 * pi are fixed at the start of the step.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sptlab/error.hpp"
#include "sptlab/linalg.hpp"
#include "sptlab/market.hpp"
#include "sptlab/rank_dynamics.hpp"
#include "sptlab/ranks.hpp"
#include "sptlab/rng.hpp"
#include "sptlab/special_markets.hpp"

namespace sptlab {

/// Lower clamp on market weights inside the volatility-stabilized 1/sqrt(mu).
inline constexpr double kVsmWeightFloor = 1e-10;
/// VSM substep length relative to the smallest market weight.
inline constexpr double kVsmSubstepScale = 0.01;
/// Substeps within one step beyond which a VSM path is declared collapsed.
inline constexpr std::size_t kVsmMaxSubsteps = std::size_t{1} << 26;
/// Fraction of steps touching the floor above which a run is flagged.
inline constexpr double kVsmFloorWarnRate = 1e-3;
/// Default local-time kernel width in units of the per-step gap deviation.
/// Wider kernels bias the estimate down by about lambda * eps / 2 where lambda
/// is the rate of the stationary gap density.
inline constexpr double kLocalTimeWidthFactor = 5.0;
/// Upper bound on stored snapshot values across all paths.
inline constexpr double kMaxSnapshotValues = 5e7;

struct SimConfig {
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1000;
  /// Gap-kernel width; when unset each gap uses 5 times its per-step deviation.
  std::optional<double> local_time_epsilon;
  /// Simulated time discarded before measurement starts.
  double burn_in = 0.0;
  std::size_t workers = 1;
  /// Market weights at time 0 (of the burn-in, if any); equal when unset.
  std::optional<Vector> initial_weights;
  /// VSM only: subdivide steps where small weights make dt too coarse.
  bool vsm_adaptive = true;

  void validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
    if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be positive");
    if (!(horizon >= dt) || !std::isfinite(horizon)) bad("horizon must be at least dt");
    if (n_paths < 1) bad("n_paths must be at least 1");
    if (record_stride < 1) bad("record_stride must be at least 1");
    if (local_time_epsilon && !(*local_time_epsilon > 0.0)) bad("local_time_epsilon must be positive");
    if (!(burn_in >= 0.0) || !std::isfinite(burn_in)) bad("burn_in must be non-negative");
    if (workers < 1) bad("workers must be at least 1");
    if (initial_weights) {
      MarketWeights check(*initial_weights);
    }
  }

  [[nodiscard]] std::size_t steps() const {
    return static_cast<std::size_t>(std::llround(horizon / dt));
  }
  [[nodiscard]] std::size_t burn_in_steps() const {
    return static_cast<std::size_t>(std::llround(burn_in / dt));
  }
};

enum class ModelKind { Fixed, VolatilityStabilized, Atlas };

/// State-dependent portfolio rules for the volatility-stabilized market.
struct VsmStrategy {
  enum class Kind { Market, MinVolatility, MaxGrowth, Equal, Entropy, Diversity, Fixed };
  Kind kind = Kind::Market;
  double parameter = 0.0;  ///< entropy offset c or diversity exponent p
  Vector weights;          ///< Fixed only

  static VsmStrategy market() { return {Kind::Market, 0.0, {}}; }
  static VsmStrategy min_volatility() { return {Kind::MinVolatility, 0.0, {}}; }
  static VsmStrategy max_growth() { return {Kind::MaxGrowth, 0.0, {}}; }
  static VsmStrategy equal() { return {Kind::Equal, 0.0, {}}; }
  static VsmStrategy entropy(double c = 0.0) { return {Kind::Entropy, c, {}}; }
  static VsmStrategy diversity(double p) { return {Kind::Diversity, p, {}}; }
  static VsmStrategy fixed(const Portfolio& pf) { return {Kind::Fixed, 0.0, pf.weights()}; }

  [[nodiscard]] std::string label() const {
    switch (kind) {
      case Kind::Market: return "market";
      case Kind::MinVolatility: return "min_volatility";
      case Kind::MaxGrowth: return "max_growth";
      case Kind::Equal: return "equal";
      case Kind::Entropy: return "entropy";
      case Kind::Diversity: return "diversity";
      case Kind::Fixed: return "fixed";
    }
    return "unknown";
  }

  /// Weights for the current market weights `mu`, written into `out`.
  void evaluate(std::span<const double> mu, std::span<double> out) const {
    const std::size_t n = mu.size();
    const double nd = static_cast<double>(n);
    switch (kind) {
      case Kind::Market:
      case Kind::MinVolatility:
        std::copy(mu.begin(), mu.end(), out.begin());
        return;
      case Kind::MaxGrowth:
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 + (1.0 - 0.5 * nd) * mu[i];
        return;
      case Kind::Equal:
        std::fill(out.begin(), out.end(), 1.0 / nd);
        return;
      case Kind::Entropy: {
        double z = parameter;
        for (std::size_t i = 0; i < n; ++i) {
          const double mlog = mu[i] > 0.0 ? mu[i] * std::log(mu[i]) : 0.0;
          out[i] = mu[i] * parameter - mlog;
          z -= mlog;
        }
        for (std::size_t i = 0; i < n; ++i) out[i] /= z;
        return;
      }
      case Kind::Diversity: {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          out[i] = std::pow(mu[i], parameter);
          norm += out[i];
        }
        for (std::size_t i = 0; i < n; ++i) out[i] /= norm;
        return;
      }
      case Kind::Fixed:
        for (std::size_t i = 0; i < n; ++i) out[i] = weights[static_cast<Eigen::Index>(i)];
        return;
    }
  }
};

struct Snapshot {
  double time = 0.0;
  std::vector<double> relative_log;  ///< ln(V_pi / V_mu) since measurement start, per portfolio
  std::vector<double> weights;       ///< ranked market weights (Atlas) or name-ordered weights
};

/// Raw accumulators of one path.
struct PathRecord {
  std::vector<double> log_growth;           ///< ln V_pi(T) - ln V_pi(0)
  std::vector<double> relative_log;         ///< ln(V_pi/V_mu)(T) - ln(V_pi/V_mu)(0)
  std::vector<double> quadratic_variation;  ///< sum of squared per-step log returns
  std::vector<double> log_f_start;          ///< Atlas: ln F_p(mu_(.)) at measurement start
  std::vector<double> log_f_end;
  double market_log_growth = 0.0;
  Matrix covariation;                       ///< sum dx dx^T (rank-indexed for Atlas)
  std::vector<double> gap_occupation;       ///< Atlas: sum 1[G_k < eps_k] dG_k^2
  std::size_t floor_hits = 0;               ///< VSM: steps with some mu_i below the floor
  std::vector<Snapshot> snapshots;
};

struct EstimateWithError {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct RealizedStats {
  std::vector<EstimateWithError> growth;           ///< per portfolio, per unit time
  std::vector<EstimateWithError> relative_growth;  ///< per portfolio, vs the market
  std::vector<EstimateWithError> variance;         ///< realized QV / T per portfolio
  EstimateWithError market_growth;
  Matrix covariance;
  Matrix covariance_stderr;
};

struct LocalTimeEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;
  double epsilon = 0.0;
};

struct FgpDecomposition {
  double dlnF = 0.0;     ///< path-mean ln F(mu(T)) - ln F(mu(0))
  double dTheta = 0.0;   ///< path-mean relative log performance minus dlnF
  double residual = 0.0; ///< max over paths of |relative - (dlnF + dTheta)|
  EstimateWithError dlnF_rate;
  EstimateWithError dTheta_rate;
};

struct RunReport {
  ModelKind model = ModelKind::Fixed;
  SimConfig config;
  std::size_t steps = 0;
  double horizon = 0.0;  ///< measured time, steps * dt
  std::vector<std::string> labels;
  std::vector<Vector> tracked;  ///< Atlas: rank weights of each tracked portfolio
  std::vector<double> initial_variance;
  std::vector<double> local_time_epsilon;
  std::vector<PathRecord> paths;
  double floor_hit_rate = 0.0;
  bool floor_warning = false;

  // Aggregates filled at the end of every simulate_* call.
  RealizedStats realized;
  std::vector<LocalTimeEstimate> local_times;
  std::vector<FgpDecomposition> fgp;
  std::vector<double> series_time;
  std::vector<std::vector<double>> series_relative_log;  ///< [portfolio][snapshot], path mean
};

namespace detail {

inline EstimateWithError mean_and_error(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) {
    return {mean, std::numeric_limits<double>::quiet_NaN()};
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

template <class Fn>
std::vector<PathRecord> run_paths(const SimConfig& cfg, Fn&& path_fn) {
  std::vector<PathRecord> records(cfg.n_paths);
  std::vector<std::exception_ptr> errors(cfg.n_paths);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < cfg.n_paths; k = next.fetch_add(1)) {
      try {
        records[k] = path_fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(cfg.workers, cfg.n_paths);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

inline void check_snapshot_budget(const SimConfig& cfg, std::size_t per_snapshot) {
  const double count = static_cast<double>(cfg.steps() / cfg.record_stride + 1) *
                       static_cast<double>(per_snapshot) * static_cast<double>(cfg.n_paths);
  if (count > kMaxSnapshotValues) {
    throw Error(ErrorCode::ConfigInvalid,
                "record_stride too small: snapshots would hold " + std::to_string(count) + " values");
  }
}

inline std::vector<double> initial_log_caps(const SimConfig& cfg, Eigen::Index n) {
  std::vector<double> x(static_cast<std::size_t>(n), std::log(1.0 / static_cast<double>(n)));
  if (cfg.initial_weights) {
    if (cfg.initial_weights->size() != n) {
      throw Error(ErrorCode::ConfigInvalid, "initial_weights length does not match the market");
    }
    for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = std::log((*cfg.initial_weights)[i]);
  }
  return x;
}

/// Market weights exp(x - logsumexp(x)), renormalized.
inline void weights_from_log_caps(std::span<const double> x, std::span<double> mu) {
  const double top = *std::max_element(x.begin(), x.end());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mu[i] = std::exp(x[i] - top);
    total += mu[i];
  }
  for (double& m : mu) m /= total;
}

inline double log_sum_exp(std::span<const double> x) {
  const double top = *std::max_element(x.begin(), x.end());
  double total = 0.0;
  for (double v : x) total += std::exp(v - top);
  return top + std::log(total);
}

/// Fills the aggregate fields of a report from its path records.
void aggregate(RunReport& report);

}  // namespace detail

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Path-averaged growth, relative growth, realized variance and covariance.
inline RealizedStats realized_stats(const RunReport& run) {
  RealizedStats out;
  const std::size_t m = run.labels.size();
  const std::size_t paths = run.paths.size();
  const double t = run.horizon;
  std::vector<double> buf(paths);
  auto collect = [&](auto&& getter) {
    for (std::size_t k = 0; k < paths; ++k) buf[k] = getter(run.paths[k]) / t;
    return detail::mean_and_error(buf);
  };
  for (std::size_t j = 0; j < m; ++j) {
    out.growth.push_back(collect([j](const PathRecord& r) { return r.log_growth[j]; }));
    out.relative_growth.push_back(collect([j](const PathRecord& r) { return r.relative_log[j]; }));
    out.variance.push_back(collect([j](const PathRecord& r) { return r.quadratic_variation[j]; }));
  }
  out.market_growth = collect([](const PathRecord& r) { return r.market_log_growth; });
  if (paths > 0) {
    const Eigen::Index n = run.paths.front().covariation.rows();
    out.covariance = Matrix::Zero(n, n);
    out.covariance_stderr = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto est = collect([i, j](const PathRecord& r) { return r.covariation(i, j); });
        out.covariance(i, j) = est.value;
        out.covariance_stderr(i, j) = est.stderr_;
      }
    }
  }
  return out;
}

/**
 * Local time of ranked gap `level` (0-based; gap between ranks level and
 * level + 1) from the occupation kernel
 *   Lambda(T) ~ (1 / (2 eps)) sum_steps 1[G < eps] dG^2,
 * returned as a rate per unit time averaged over paths.
 */
inline LocalTimeEstimate estimate_local_times(const RunReport& run, std::size_t level) {
  if (run.model != ModelKind::Atlas || run.local_time_epsilon.empty()) {
    throw Error(ErrorCode::MissingGapRecord, "run has no ranked-gap record");
  }
  if (level >= run.local_time_epsilon.size()) {
    throw Error(ErrorCode::MissingGapRecord, "gap index " + std::to_string(level) + " out of range");
  }
  const double eps = run.local_time_epsilon[level];
  std::vector<double> rates;
  rates.reserve(run.paths.size());
  for (const auto& r : run.paths) {
    rates.push_back(r.gap_occupation[level] / (2.0 * eps) / run.horizon);
  }
  const auto est = detail::mean_and_error(rates);
  return {est.value, est.stderr_, eps};
}

/// Splits relative log performance of tracked portfolio `index` into
/// Delta ln F_p(mu_(.)) and Delta Theta.
inline FgpDecomposition fgp_decomposition(const RunReport& run, std::size_t index) {
  if (run.model != ModelKind::Atlas || index >= run.tracked.size() || run.paths.empty() ||
      run.paths.front().log_f_start.size() <= index) {
    throw Error(ErrorCode::MissingSnapshots, "no ranked-weight record for this portfolio");
  }
  FgpDecomposition out;
  std::vector<double> f_rates;
  std::vector<double> theta_rates;
  double f_sum = 0.0;
  double theta_sum = 0.0;
  for (const auto& r : run.paths) {
    const double dlnf = r.log_f_end[index] - r.log_f_start[index];
    const double dtheta = r.relative_log[index] - dlnf;
    out.residual = std::max(out.residual, std::abs(r.relative_log[index] - (dlnf + dtheta)));
    f_sum += dlnf;
    theta_sum += dtheta;
    f_rates.push_back(dlnf / run.horizon);
    theta_rates.push_back(dtheta / run.horizon);
  }
  const double n = static_cast<double>(run.paths.size());
  out.dlnF = f_sum / n;
  out.dTheta = theta_sum / n;
  out.dlnF_rate = detail::mean_and_error(f_rates);
  out.dTheta_rate = detail::mean_and_error(theta_rates);
  return out;
}

/// Looks up a tracked rank portfolio by weights.
inline FgpDecomposition fgp_decomposition(const RunReport& run, const Portfolio& p) {
  for (std::size_t j = 0; j < run.tracked.size(); ++j) {
    if (run.tracked[j].size() == p.size() && run.tracked[j] == p.weights()) {
      return fgp_decomposition(run, j);
    }
  }
  throw Error(ErrorCode::MissingSnapshots, "portfolio was not tracked in this run");
}

namespace detail {

inline void aggregate(RunReport& report) {
  report.realized = realized_stats(report);
  report.local_times.clear();
  for (std::size_t k = 0; k < report.local_time_epsilon.size(); ++k) {
    report.local_times.push_back(estimate_local_times(report, k));
  }
  report.fgp.clear();
  if (report.model == ModelKind::Atlas) {
    for (std::size_t j = 0; j < report.tracked.size(); ++j) {
      report.fgp.push_back(fgp_decomposition(report, j));
    }
  }
  report.series_time.clear();
  report.series_relative_log.assign(report.labels.size(), {});
  if (!report.paths.empty()) {
    const auto& first = report.paths.front().snapshots;
    for (const auto& s : first) report.series_time.push_back(s.time);
    for (std::size_t j = 0; j < report.labels.size(); ++j) {
      auto& series = report.series_relative_log[j];
      series.assign(first.size(), 0.0);
      for (const auto& r : report.paths) {
        for (std::size_t s = 0; s < first.size(); ++s) series[s] += r.snapshots[s].relative_log[j];
      }
      for (double& v : series) v /= static_cast<double>(report.paths.size());
    }
  }
  std::size_t hits = 0;
  for (const auto& r : report.paths) hits += r.floor_hits;
  const double total_steps = static_cast<double>(report.config.steps() + report.config.burn_in_steps()) *
                             static_cast<double>(report.paths.size());
  report.floor_hit_rate = total_steps > 0 ? static_cast<double>(hits) / total_steps : 0.0;
  report.floor_warning = report.floor_hit_rate > kVsmFloorWarnRate;
}

/// Accumulators shared by the three model kernels.
class PathAccumulator {
 public:
  PathAccumulator(std::size_t portfolios, Eigen::Index n) {
    rec_.log_growth.assign(portfolios, 0.0);
    rec_.relative_log.assign(portfolios, 0.0);
    rec_.quadratic_variation.assign(portfolios, 0.0);
    rec_.covariation = Matrix::Zero(n, n);
    cov_.assign(static_cast<std::size_t>(n * n), 0.0);
    n_ = static_cast<std::size_t>(n);
  }

  /// Per-step log return of portfolio j and of the market.
  void add_returns(std::size_t j, double log_ret, double market_log_ret) {
    rec_.log_growth[j] += log_ret;
    rec_.relative_log[j] += log_ret - market_log_ret;
    rec_.quadratic_variation[j] += log_ret * log_ret;
  }

  void add_market(double market_log_ret) { rec_.market_log_growth += market_log_ret; }

  void add_increments(std::span<const double> dx) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double di = dx[i];
      double* row = cov_.data() + i * n_;
      for (std::size_t j = i; j < n_; ++j) row[j] += di * dx[j];
    }
  }

  void snapshot(double time, std::span<const double> weights) {
    rec_.snapshots.push_back({time, rec_.relative_log, {weights.begin(), weights.end()}});
  }

  PathRecord& record() { return rec_; }

  PathRecord finish() {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double v = cov_[i * n_ + j];
        rec_.covariation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        rec_.covariation(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    }
    return std::move(rec_);
  }

 private:
  PathRecord rec_;
  std::vector<double> cov_;
  std::size_t n_ = 0;
};

/// ln(sum_i w_i exp(dx_i - shift)) + shift; NaN when the sum is not positive.
inline double weighted_log_return(std::span<const double> w, std::span<const double> growth_factor,
                                  double shift) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] * growth_factor[i];
  return total > 0.0 ? std::log(total) + shift : std::numeric_limits<double>::quiet_NaN();
}

/// Row-major copy of a loadings matrix scaled by sqrt(dt).
struct ScaledLoadings {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool diagonal = false;

  ScaledLoadings(const Matrix& xi, double scale)
      : rows(static_cast<std::size_t>(xi.rows())), cols(static_cast<std::size_t>(xi.cols())) {
    values.resize(rows * cols);
    diagonal = rows == cols;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double v = xi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        values[i * cols + j] = v * scale;
        if (i != j && v != 0.0) diagonal = false;
      }
    }
  }

  [[nodiscard]] double apply(std::size_t row, std::span<const double> z) const {
    if (diagonal) return values[row * cols + row] * z[row];
    double out = 0.0;
    const double* r = values.data() + row * cols;
    for (std::size_t l = 0; l < cols; ++l) out += r[l] * z[l];
    return out;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Fixed-parameter market
// ---------------------------------------------------------------------------

/**
 * Constant parameters: log-cap increments over a step are exactly Gaussian
 * with mean gamma dt and covariance Sigma dt. Tracked portfolios hold constant
 * weights, rebalanced every step.
 */
inline RunReport simulate_fixed(const MarketParams& params, const std::vector<Portfolio>& portfolios,
                                const SimConfig& cfg) {
  cfg.validate();
  for (const auto& pf : portfolios) require_same_size(params, pf);
  const Eigen::Index n = params.n();
  detail::check_snapshot_budget(cfg, portfolios.size() + static_cast<std::size_t>(n));

  const Matrix xi = params.loadings() ? *params.loadings() : params.factor().lower();
  const detail::ScaledLoadings vol(xi, std::sqrt(cfg.dt));
  std::vector<double> drift(static_cast<std::size_t>(n));
  const Vector growth = params.growth();
  for (Eigen::Index i = 0; i < n; ++i) drift[static_cast<std::size_t>(i)] = growth[i] * cfg.dt;
  std::vector<std::vector<double>> weights;
  for (const auto& pf : portfolios) weights.push_back(to_std(pf.weights()));

  const std::size_t steps = cfg.steps();
  const std::size_t burn = cfg.burn_in_steps();
  const std::size_t nn = static_cast<std::size_t>(n);

  auto path_fn = [&](std::size_t path) {
    auto rng = path_engine(cfg.seed, path);
    std::normal_distribution<double> normal;
    std::vector<double> x = detail::initial_log_caps(cfg, n);
    std::vector<double> mu(nn), z(vol.cols), dx(nn), factor(nn);
    detail::weights_from_log_caps(x, mu);
    detail::PathAccumulator acc(portfolios.size(), n);

    for (std::size_t step = 0; step < burn + steps; ++step) {
      const bool measure = step >= burn;
      const std::size_t t = step - burn;
      if (measure && t % cfg.record_stride == 0) acc.snapshot(static_cast<double>(t) * cfg.dt, mu);
      for (double& v : z) v = normal(rng);
      double shift = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nn; ++i) {
        dx[i] = drift[i] + vol.apply(i, z);
        shift = std::max(shift, dx[i]);
      }
      for (std::size_t i = 0; i < nn; ++i) factor[i] = std::exp(dx[i] - shift);
      double market = 0.0;
      for (std::size_t i = 0; i < nn; ++i) market += mu[i] * factor[i];
      const double market_log = std::log(market) + shift;
      if (measure) {
        for (std::size_t j = 0; j < weights.size(); ++j) {
          acc.add_returns(j, detail::weighted_log_return(weights[j], factor, shift), market_log);
        }
        acc.add_market(market_log);
        acc.add_increments(dx);
      }
      for (std::size_t i = 0; i < nn; ++i) x[i] += dx[i];
      detail::weights_from_log_caps(x, mu);
    }
    acc.snapshot(static_cast<double>(steps) * cfg.dt, mu);
    return acc.finish();
  };

  RunReport report;
  report.model = ModelKind::Fixed;
  report.config = cfg;
  report.steps = steps;
  report.horizon = static_cast<double>(steps) * cfg.dt;
  for (std::size_t j = 0; j < portfolios.size(); ++j) {
    report.labels.push_back("portfolio_" + std::to_string(j));
    report.initial_variance.push_back(portfolio_variance(params, portfolios[j]));
  }
  report.paths = detail::run_paths(cfg, path_fn);
  detail::aggregate(report);
  return report;
}

// ---------------------------------------------------------------------------
// Volatility-stabilized market
// ---------------------------------------------------------------------------

/**
 * Euler-Maruyama on log caps, d ln V_i = dW_i / sqrt(mu_i), with mu evaluated
 * at the start of each step and clamped at kVsmWeightFloor inside the square
 * root. With cfg.vsm_adaptive (the default) each step of length dt is split
 * into substeps no longer than kVsmSubstepScale * min_i mu_i, which keeps the
 * per-substep log-cap deviation at or below 0.1; without it a weight of order
 * dt makes the scheme unstable. Weights are reflected at kVsmWeightFloor, so
 * the clamp inside the square root only matters with vsm_adaptive off.
 * Strategies rebalance at every substep. Floor contacts are counted; a run whose contact rate exceeds
 * kVsmFloorWarnRate is flagged. A non-finite log cap aborts the run with
 * WeightCollapse.
 */
inline RunReport simulate_vsm(const MarketWeights& mu0, const std::vector<VsmStrategy>& strategies,
                              const SimConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = mu0.n();
  for (const auto& s : strategies) {
    if (s.kind == VsmStrategy::Kind::Fixed) Portfolio check(s.weights);
    if (s.kind == VsmStrategy::Kind::Fixed && s.weights.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "fixed strategy size does not match the market");
    }
  }
  detail::check_snapshot_budget(cfg, strategies.size() + static_cast<std::size_t>(n));
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t steps = cfg.steps();
  const std::size_t burn = cfg.burn_in_steps();

  const double log_floor = std::log(kVsmWeightFloor);

  // State is the vector of log caps; weights are recomputed from it at every
  // substep so a weight that underflows in double precision can still recover.
  auto path_fn = [&](std::size_t path) {
    auto rng = path_engine(cfg.seed, path);
    std::normal_distribution<double> normal;
    std::vector<double> x(nn);
    for (std::size_t i = 0; i < nn; ++i) x[i] = std::log(mu0.values()[static_cast<Eigen::Index>(i)]);
    std::vector<double> mu(nn), dx(nn), factor(nn), w(nn);
    detail::PathAccumulator acc(strategies.size(), n);
    std::size_t floor_hits = 0;
    double lse = detail::log_sum_exp(x);

    for (std::size_t step = 0; step < burn + steps; ++step) {
      const bool measure = step >= burn;
      const std::size_t t = step - burn;
      if (measure && t % cfg.record_stride == 0) {
        detail::weights_from_log_caps(x, mu);
        acc.snapshot(static_cast<double>(t) * cfg.dt, mu);
      }
      bool touched = false;
      double remaining = cfg.dt;
      std::size_t substeps = 0;
      while (remaining > 0.0) {
        if (++substeps > kVsmMaxSubsteps) {
          throw Error(ErrorCode::WeightCollapse,
                      "market weight pinned at the floor on path " + std::to_string(path));
        }
        detail::weights_from_log_caps(x, mu);
        double min_log_mu = 0.0;
        for (std::size_t i = 0; i < nn; ++i) min_log_mu = std::min(min_log_mu, x[i] - lse);
        double h = remaining;
        if (cfg.vsm_adaptive) {
          h = std::min(remaining, kVsmSubstepScale * std::exp(std::max(min_log_mu, log_floor)));
          if (remaining - h < 1e-9 * cfg.dt) h = remaining;
        }
        const double sqrt_h = std::sqrt(h);
        double shift = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nn; ++i) {
          double log_mu = x[i] - lse;
          if (log_mu < log_floor) {
            log_mu = log_floor;
            touched = true;
          }
          dx[i] = sqrt_h * std::exp(-0.5 * log_mu) * normal(rng);
          shift = std::max(shift, dx[i]);
        }
        for (std::size_t i = 0; i < nn; ++i) {
          factor[i] = std::exp(dx[i] - shift);
          x[i] += dx[i];
          if (!std::isfinite(x[i])) {
            throw Error(ErrorCode::WeightCollapse,
                        "log cap " + std::to_string(i) + " is not finite on path " + std::to_string(path));
          }
        }
        double next_lse = detail::log_sum_exp(x);
        const double market_log = next_lse - lse;
        // Reflect weights at the floor; the injected cap is below 1e-10 of the
        // market and is not counted as return.
        bool reflected = false;
        for (std::size_t i = 0; i < nn; ++i) {
          if (x[i] - next_lse < log_floor) {
            x[i] = next_lse + log_floor;
            reflected = true;
          }
        }
        if (reflected) {
          touched = true;
          next_lse = detail::log_sum_exp(x);
        }
        lse = next_lse;
        if (measure) {
          for (std::size_t j = 0; j < strategies.size(); ++j) {
            strategies[j].evaluate(mu, w);
            acc.add_returns(j, detail::weighted_log_return(w, factor, shift), market_log);
          }
          acc.add_market(market_log);
          acc.add_increments(dx);
        }
        remaining -= h;
      }
      floor_hits += touched ? 1 : 0;
    }
    detail::weights_from_log_caps(x, mu);
    acc.snapshot(static_cast<double>(steps) * cfg.dt, mu);
    PathRecord rec = acc.finish();
    rec.floor_hits = floor_hits;
    return rec;
  };

  RunReport report;
  report.model = ModelKind::VolatilityStabilized;
  report.config = cfg;
  report.steps = steps;
  report.horizon = static_cast<double>(steps) * cfg.dt;
  const auto params = vsm_params(mu0);
  std::vector<double> mu_start(mu0.values().data(), mu0.values().data() + n);
  std::vector<double> w(nn);
  for (const auto& s : strategies) {
    report.labels.push_back(s.label());
    s.evaluate(mu_start, w);
    report.initial_variance.push_back(portfolio_variance(params, Portfolio(to_vector(w))));
  }
  report.paths = detail::run_paths(cfg, path_fn);
  detail::aggregate(report);
  return report;
}

// ---------------------------------------------------------------------------
// Rank-based (Atlas) market
// ---------------------------------------------------------------------------

/// Default kernel width for each ranked gap: 5 * sqrt(d<G_k> per step).
inline std::vector<double> default_local_time_epsilon(const AtlasSpec& spec, double dt) {
  const Matrix& c = spec.rank_cov();
  std::vector<double> eps;
  for (Eigen::Index k = 0; k + 1 < spec.n(); ++k) {
    const double qv = c(k, k) + c(k + 1, k + 1) - 2.0 * c(k, k + 1);
    eps.push_back(kLocalTimeWidthFactor * std::sqrt(qv * dt));
  }
  return eps;
}

/**
 * Euler scheme for d ln V_i = g_{r_i} dt + sum_l xi_{r_i l} dW_l with ranks
 * taken at the start of each step (ties by ascending name index). Rank
 * portfolios are mapped to names through the same ranks and rebalanced every
 * step. Realized covariance is rank-indexed.
 */
inline RunReport simulate_atlas(const AtlasSpec& spec, const std::vector<RankPortfolio>& portfolios,
                                const SimConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = spec.n();
  for (const auto& p : portfolios) {
    if (p.size() != n) throw Error(ErrorCode::DimensionMismatch, "rank portfolio size mismatch");
  }
  detail::check_snapshot_budget(cfg, portfolios.size() + static_cast<std::size_t>(n));
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t steps = cfg.steps();
  const std::size_t burn = cfg.burn_in_steps();

  const detail::ScaledLoadings vol(spec.simulation_loadings(), std::sqrt(cfg.dt));
  std::vector<double> drift(nn);
  for (std::size_t k = 0; k < nn; ++k) drift[k] = spec.g()[static_cast<Eigen::Index>(k)] * cfg.dt;
  std::vector<double> eps = cfg.local_time_epsilon
                                ? std::vector<double>(nn - 1, *cfg.local_time_epsilon)
                                : default_local_time_epsilon(spec, cfg.dt);
  std::vector<std::vector<double>> rank_weights;
  for (const auto& p : portfolios) rank_weights.push_back(to_std(p.weights()));

  auto path_fn = [&](std::size_t path) {
    auto rng = path_engine(cfg.seed, path);
    std::normal_distribution<double> normal;
    std::vector<double> x = detail::initial_log_caps(cfg, n);
    std::vector<std::size_t> order = rank_order(x);
    std::vector<double> mu(nn), ranked(nn), z(vol.cols), dx(nn), factor(nn);
    detail::weights_from_log_caps(x, mu);
    detail::PathAccumulator acc(portfolios.size(), n);
    auto& rec = acc.record();
    rec.gap_occupation.assign(nn - 1, 0.0);

    auto ranked_weights = [&] {
      for (std::size_t k = 0; k < nn; ++k) ranked[k] = mu[order[k]];
    };
    auto log_f = [&](std::vector<double>& out) {
      const double lse = detail::log_sum_exp(x);
      out.clear();
      for (const auto& p : rank_weights) {
        double v = 0.0;
        for (std::size_t k = 0; k < nn; ++k) v += p[k] * (x[order[k]] - lse);
        out.push_back(v);
      }
    };

    for (std::size_t step = 0; step < burn + steps; ++step) {
      const bool measure = step >= burn;
      const std::size_t t = step - burn;
      if (step == burn) log_f(rec.log_f_start);
      if (measure && t % cfg.record_stride == 0) {
        detail::weights_from_log_caps(x, mu);
        ranked_weights();
        acc.snapshot(static_cast<double>(t) * cfg.dt, ranked);
      } else if (step % 4096 == 0) {
        detail::weights_from_log_caps(x, mu);
      }

      for (double& v : z) v = normal(rng);
      // dx and factor are rank-indexed for this step.
      double shift = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nn; ++k) {
        dx[k] = drift[k] + vol.apply(k, z);
        shift = std::max(shift, dx[k]);
      }
      double market = 0.0;
      for (std::size_t k = 0; k < nn; ++k) {
        factor[k] = std::exp(dx[k] - shift);
        market += mu[order[k]] * factor[k];
      }
      const double market_log = std::log(market) + shift;
      if (measure) {
        for (std::size_t j = 0; j < rank_weights.size(); ++j) {
          acc.add_returns(j, detail::weighted_log_return(rank_weights[j], factor, shift), market_log);
        }
        acc.add_market(market_log);
        acc.add_increments(dx);
        for (std::size_t k = 0; k + 1 < nn; ++k) {
          const double gap = x[order[k]] - x[order[k + 1]];
          if (gap < eps[k]) {
            const double dg = dx[k] - dx[k + 1];
            rec.gap_occupation[k] += dg * dg;
          }
        }
      }
      double total = 0.0;
      for (std::size_t k = 0; k < nn; ++k) {
        const std::size_t name = order[k];
        x[name] += dx[k];
        mu[name] *= factor[k] / market;
        total += mu[name];
      }
      for (double& m : mu) m /= total;
      rerank(x, order);
    }
    detail::weights_from_log_caps(x, mu);
    ranked_weights();
    acc.snapshot(static_cast<double>(steps) * cfg.dt, ranked);
    log_f(rec.log_f_end);
    return acc.finish();
  };

  RunReport report;
  report.model = ModelKind::Atlas;
  report.config = cfg;
  report.steps = steps;
  report.horizon = static_cast<double>(steps) * cfg.dt;
  report.local_time_epsilon = eps;
  for (std::size_t j = 0; j < portfolios.size(); ++j) {
    report.labels.push_back("rank_portfolio_" + std::to_string(j));
    report.tracked.push_back(portfolios[j].weights());
    report.initial_variance.push_back(
        portfolios[j].weights().dot(spec.rank_cov() * portfolios[j].weights()));
  }
  report.paths = detail::run_paths(cfg, path_fn);
  detail::aggregate(report);
  return report;
}

}  // namespace sptlab
