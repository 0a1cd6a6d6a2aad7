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
 * @file verify.hpp
 * @brief Acceptance checks shared by `sptlab verify` and the acceptance
 *        binary. Each criterion returns rows of (measured, tolerance, stderr,
 *        pass); tolerances are fixed here and never relaxed at run time.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sptlab/csv.hpp"
#include "sptlab/frontier.hpp"
#include "sptlab/rank_dynamics.hpp"
#include "sptlab/report_io.hpp"
#include "sptlab/simulator.hpp"
#include "sptlab/special_markets.hpp"
#include "sptlab/two_stock.hpp"

namespace sptlab::verify {

struct CheckRow {
  int criterion = 0;
  std::string check;
  double measured = 0.0;
  double tolerance = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int criterion = 0;
  std::string title;
  std::vector<CheckRow> rows;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  }
};

/// Master seed for every randomized check unless overridden.
inline constexpr std::uint64_t kDefaultSeed = 20260301;

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// |measured| <= tol
inline CheckRow at_most(int c, std::string name, double measured, double tol, double se = 0.0) {
  return {c, std::move(name), measured, tol, se, measured <= tol};
}

/// measured >= tol
inline CheckRow at_least(int c, std::string name, double measured, double tol, double se = 0.0) {
  return {c, std::move(name), measured, tol, se, measured >= tol};
}

inline void add_runtime(CriterionResult& r, double limit) {
  r.rows.push_back(at_most(r.criterion, "runtime seconds", r.seconds, limit));
}

inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> z;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = z(rng);
  Matrix m = a * a.transpose() / static_cast<double>(n) + 0.05 * Matrix::Identity(n, n);
  return 0.5 * (m + m.transpose());
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> z(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = z(rng);
  return v;
}

inline Vector random_simplex(std::mt19937_64& rng, Eigen::Index n) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = e(rng) + 1e-6;
  return v / v.sum();
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Lemma suite
// ---------------------------------------------------------------------------

inline CriterionResult lemma_suite(std::uint64_t seed = kDefaultSeed) {
  CriterionResult r{1, "lemma suite: S >= s and nu0' Sigma nu1 = s^2", {}, 0.0};
  const auto t0 = detail::Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 10);
  double min_gap = std::numeric_limits<double>::infinity();
  double max_rel = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index n = dim(rng);
    const auto params = MarketParams::from_alpha(detail::random_vector(rng, n, 0.3), detail::random_spd(rng, n));
    const auto st = base_stats(params);
    min_gap = std::min(min_gap, st.S - st.s);
    const Portfolio nu0 = min_volatility_portfolio(params);
    const Portfolio nu1 = max_growth_portfolio(params);
    const double cross = nu0.weights().dot(params.sigma() * nu1.weights());
    max_rel = std::max(max_rel, std::abs(cross - st.s * st.s) / (st.s * st.s));
  }
  r.seconds = detail::seconds_since(t0);
  r.rows.push_back(detail::at_least(1, "min S - s over 1000 instances", min_gap, -1e-12));
  r.rows.push_back(detail::at_most(1, "max relative error nu0' Sigma nu1 vs s^2", max_rel, 1e-10));
  detail::add_runtime(r, 5.0);
  return r;
}

// ---------------------------------------------------------------------------
// 2. Frontier optimality oracle
// ---------------------------------------------------------------------------

/**
 * Samples portfolios nu0 + v with v in the sum-zero subspace, maps each to
 * the frontier point of equal variance and records how far its growth
 * exceeds gamma_p.
 */
inline CriterionResult frontier_optimality(std::uint64_t seed = kDefaultSeed) {
  CriterionResult r{2, "frontier optimality oracle (n=3, 100 x 1e4 samples)", {}, 0.0};
  const auto t0 = detail::Clock::now();
  std::mt19937_64 rng(seed + 2);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> radius(0.0, 3.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const auto params = MarketParams::from_alpha(detail::random_vector(rng, 3, 0.3), detail::random_spd(rng, 3));
    const auto st = base_stats(params);
    const Vector nu0 = min_volatility_portfolio(params).weights();
    const double spread = (max_growth_portfolio(params).weights() - nu0).norm();
    const double s2 = st.s * st.s;
    const double S2 = st.S * st.S;
    for (int j = 0; j < 10000; ++j) {
      Vector v(3);
      for (Eigen::Index i = 0; i < 3; ++i) v[i] = z(rng);
      v.array() -= v.mean();
      const double len = v.norm();
      if (len == 0.0) continue;
      v *= radius(rng) * std::max(spread, 0.1) / len;
      const Portfolio w(nu0 + v);
      const double var = portfolio_variance(params, w);
      const double p = S2 > s2 ? std::sqrt(std::max(0.0, var - s2) / (S2 - s2)) : 0.0;
      worst = std::max(worst, portfolio_growth(params, w) - frontier_growth(st, p));
    }
  }
  r.seconds = detail::seconds_since(t0);
  r.rows.push_back(detail::at_most(2, "max growth excess over gamma_p", worst, 1e-8));
  detail::add_runtime(r, 60.0);
  return r;
}

// ---------------------------------------------------------------------------
// 3. Two-stock figure
// ---------------------------------------------------------------------------

inline CriterionResult two_stock_figure() {
  CriterionResult r{3, "two-stock figure: intersections and extrema", {}, 0.0};
  const auto t0 = detail::Clock::now();
  double worst_point = 0.0;
  double worst_x = 0.0;
  for (double s12 : {0.0, -1.0, 1.0}) {
    const auto curve = two_stock_curve({0.25, 2.0, 1.0, 4.0, s12}, -1.0, 2.0, 3000);
    for (const auto& smp : curve.samples) {
      if (smp.x == 1.0) {
        worst_point = std::max({worst_point, std::abs(smp.sigma - 1.0), std::abs(smp.gamma - 0.25)});
      } else if (smp.x == 0.0) {
        worst_point = std::max({worst_point, std::abs(smp.sigma - 2.0), std::abs(smp.gamma - 2.0)});
      }
    }
    const bool has_both = std::any_of(curve.samples.begin(), curve.samples.end(), [](auto& s) { return s.x == 0.0; }) &&
                          std::any_of(curve.samples.begin(), curve.samples.end(), [](auto& s) { return s.x == 1.0; });
    if (!has_both) worst_point = std::numeric_limits<double>::infinity();
    worst_x = std::max({worst_x, std::abs(curve.sampled_growth_max.x - curve.growth_max.x),
                        std::abs(curve.sampled_variance_min.x - curve.variance_min.x)});
  }
  r.seconds = detail::seconds_since(t0);
  r.rows.push_back(detail::at_most(3, "max deviation at (1,0.25) and (2,2)", worst_point, 0.0));
  r.rows.push_back(detail::at_most(3, "max |x_sampled - x_analytic|", worst_x, 1e-3));
  return r;
}

// ---------------------------------------------------------------------------
// 4. VSM closed forms
// ---------------------------------------------------------------------------

inline CriterionResult vsm_closed_forms(std::uint64_t seed = kDefaultSeed) {
  CriterionResult r{4, "VSM closed forms (n=3)", {}, 0.0};
  const auto t0 = detail::Clock::now();
  const auto mu = MarketWeights::equal(3);
  const auto ex = vsm_extremals(mu);
  double dev = std::abs(d_minus_one(mu) - 1.0 / 9.0);
  dev = std::max({dev, std::abs(ex.stats.s - 1.0), std::abs(ex.stats.S - 1.0), std::abs(ex.gamma0 - 1.0),
                  std::abs(ex.gamma1 - 1.0)});
  const auto params = vsm_params(mu);
  for (double b : {0.0, 0.02}) {
    dev = std::max(dev, std::abs(theta_ratio(params, ex.nu0, b) - (1.0 - b)));
    dev = std::max(dev, std::abs(theta_ratio(params, ex.nu1, b) - (1.0 - b)));
  }
  r.rows.push_back(detail::at_most(4, "max deviation D, s, S, gamma0, gamma1, theta", dev, 1e-12));

  std::mt19937_64 rng(seed + 4);
  const auto grid = unit_grid(101);
  double min_weight = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const MarketWeights m(detail::random_simplex(rng, 3));
    const auto p3 = vsm_params(m);
    for (double p : grid) min_weight = std::min(min_weight, frontier_portfolio(p3, p).portfolio.weights().minCoeff());
  }
  r.seconds = detail::seconds_since(t0);
  r.rows.push_back(detail::at_least(4, "min frontier weight over 100 random mu", min_weight, -1e-12));
  return r;
}

// ---------------------------------------------------------------------------
// 5. VSM simulation
// ---------------------------------------------------------------------------

inline SimConfig vsm_acceptance_config(std::uint64_t seed = kDefaultSeed, std::size_t workers = 1) {
  SimConfig cfg;
  cfg.horizon = 50.0;
  cfg.dt = 1e-4;
  cfg.n_paths = 64;
  cfg.seed = seed;
  cfg.record_stride = 10000;
  cfg.workers = workers;
  return cfg;
}

inline CriterionResult vsm_simulation(std::uint64_t seed = kDefaultSeed, std::size_t workers = 1) {
  CriterionResult r{5, "VSM simulation (n=3, T=50, dt=1e-4, 64 paths)", {}, 0.0};
  const auto t0 = detail::Clock::now();
  const auto run = simulate_vsm(MarketWeights::equal(3), {VsmStrategy::market()}, vsm_acceptance_config(seed, workers));
  r.seconds = detail::seconds_since(t0);
  const auto& g = run.realized.market_growth;
  r.rows.push_back({5, "market growth |g - 1| in standard errors", std::abs(g.value - 1.0) / g.stderr_, 3.0, g.stderr_,
                    std::abs(g.value - 1.0) <= 3.0 * g.stderr_});
  r.rows.push_back({5, "market growth", g.value, 1.0, g.stderr_, std::abs(g.value - 1.0) <= 3.0 * g.stderr_});
  r.rows.push_back({5, "weight-floor trigger rate", run.floor_hit_rate, kVsmFloorWarnRate, 0.0,
                    run.floor_hit_rate < kVsmFloorWarnRate});
  detail::add_runtime(r, 120.0);
  return r;
}

// ---------------------------------------------------------------------------
// 6. Atlas asymptotics
// ---------------------------------------------------------------------------

inline SimConfig atlas_acceptance_config(std::uint64_t seed = kDefaultSeed, std::size_t workers = 1) {
  SimConfig cfg;
  cfg.horizon = 2000.0;
  cfg.dt = 1e-3;
  cfg.n_paths = 32;
  cfg.seed = seed;
  cfg.record_stride = 10000;
  cfg.workers = workers;
  // Start measuring from a near-stationary configuration; equal caps are the
  // maximum of ln F and would bias Delta ln F / T by -O(1/T).
  cfg.burn_in = 500.0;
  // Narrow kernel: the bias of the occupation estimator is about
  // lambda * eps / 2 for a gap with stationary rate lambda.
  cfg.local_time_epsilon = 0.05;
  return cfg;
}

inline AtlasSpec atlas_acceptance_spec() { return AtlasSpec::simple(SimpleAtlasSpec(5, 0.1, 1.0)); }

inline std::vector<RankPortfolio> atlas_acceptance_portfolios() {
  Vector nu1(5);
  nu1 << 0.1, 0.1, 0.1, 0.1, 0.6;
  return {RankPortfolio(Portfolio::equal(5)), RankPortfolio(Portfolio(nu1))};
}

inline RunReport atlas_acceptance_run(std::uint64_t seed = kDefaultSeed, std::size_t workers = 1) {
  return simulate_atlas(atlas_acceptance_spec(), atlas_acceptance_portfolios(), atlas_acceptance_config(seed, workers));
}

inline CriterionResult atlas_asymptotics(const RunReport& run, double seconds) {
  CriterionResult r{6, "Atlas asymptotics (n=5, g=0.1, T=2000, 32 paths)", {}, seconds};
  const double targets[] = {0.4, 0.5};
  const char* names[] = {"e/5", "nu1"};
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& e = run.realized.relative_growth[j];
    r.rows.push_back({6, std::string("relative growth ") + names[j] + " vs " + format_double(targets[j]), e.value,
                      targets[j], e.stderr_, std::abs(e.value - targets[j]) <= 3.0 * e.stderr_});
  }
  const double lt_targets[] = {0.2, 0.4, 0.6, 0.8};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& lt = run.local_times[k];
    const double rel = std::abs(lt.rate - lt_targets[k]) / lt_targets[k];
    r.rows.push_back({6, "local time gap " + std::to_string(k + 1) + " relative error", rel, 0.05, lt.stderr_,
                      rel <= 0.05});
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& f = run.fgp[j].dlnF_rate;
    r.rows.push_back({6, std::string("dlnF/T ") + names[j], f.value, 0.0, f.stderr_,
                      std::abs(f.value) <= 3.0 * f.stderr_});
  }
  detail::add_runtime(r, 300.0);
  return r;
}

inline CriterionResult atlas_asymptotics(std::uint64_t seed = kDefaultSeed, std::size_t workers = 1) {
  const auto t0 = detail::Clock::now();
  const auto run = atlas_acceptance_run(seed, workers);
  return atlas_asymptotics(run, detail::seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 7. Closed form vs generic
// ---------------------------------------------------------------------------

inline CriterionResult closed_form_agreement(std::uint64_t seed = kDefaultSeed) {
  CriterionResult r{7, "closed form vs generic frontier evaluation", {}, 0.0};
  const auto t0 = detail::Clock::now();
  std::mt19937_64 rng(seed + 7);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double vsm = 0.0, atlas = 0.0, entropy = 0.0, diversity = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = dim(rng);
    const MarketWeights mu(detail::random_simplex(rng, n));
    const auto params = vsm_params(mu);

    const auto ex = vsm_extremals(mu);
    const auto st = base_stats(params);
    vsm = std::max({vsm, (ex.nu0.weights() - min_volatility_portfolio(params).weights()).cwiseAbs().maxCoeff(),
                    (ex.nu1.weights() - max_growth_portfolio(params).weights()).cwiseAbs().maxCoeff(),
                    detail::relative_error(ex.stats.s, st.s), detail::relative_error(ex.stats.S, st.S),
                    detail::relative_error(ex.stats.a, st.a),
                    detail::relative_error(ex.gamma0, portfolio_growth(params, ex.nu0)),
                    detail::relative_error(ex.gamma1, portfolio_growth(params, ex.nu1))});

    const double c = unit(rng);
    const auto ent = entropy_weighted_portfolio(mu, c);
    entropy = std::max({entropy, detail::relative_error(ent.variance, portfolio_variance(params, ent.weights)),
                        detail::relative_error(ent.growth, portfolio_growth(params, ent.weights))});

    const SimpleAtlasSpec spec(n, 0.01 + 0.5 * unit(rng), 0.5 + 1.5 * unit(rng));
    const auto ax = simple_atlas_extremals(spec);
    const auto rp = simple_atlas_params(spec);
    const auto aparams = MarketParams::from_growth(rp.rank_growth, rp.rank_cov);
    const auto ast = base_stats(aparams);
    atlas = std::max({atlas, (ax.nu0.weights() - min_volatility_portfolio(aparams).weights()).cwiseAbs().maxCoeff(),
                      (ax.nu1.weights() - max_growth_portfolio(aparams).weights()).cwiseAbs().maxCoeff(),
                      detail::relative_error(ax.stats.s, ast.s), detail::relative_error(ax.stats.S, ast.S),
                      detail::relative_error(ax.stats.a, ast.a),
                      detail::relative_error(ax.gamma0, portfolio_growth(aparams, ax.nu0)),
                      detail::relative_error(ax.gamma1, portfolio_growth(aparams, ax.nu1))});

    // Diversity portfolio against the name-indexed market whose growth is
    // the rank growth of each name's current rank.
    const double p_div = unit(rng);
    const auto div = diversity_weighted_portfolio(mu, p_div, spec);
    const auto order = rank_order(std::span<const double>(mu.values().data(), static_cast<std::size_t>(n)));
    Vector named_growth(n);
    for (std::size_t kk = 0; kk < order.size(); ++kk) {
      named_growth[static_cast<Eigen::Index>(order[kk])] = rp.rank_growth[static_cast<Eigen::Index>(kk)];
    }
    const auto nparams = MarketParams::from_growth(named_growth, rp.rank_cov);
    diversity = std::max({diversity, detail::relative_error(div.variance, portfolio_variance(nparams, div.weights)),
                          detail::relative_error(div.growth, portfolio_growth(nparams, div.weights))});
  }
  r.seconds = detail::seconds_since(t0);
  r.rows.push_back(detail::at_most(7, "vsm_extremals max deviation", vsm, 1e-10));
  r.rows.push_back(detail::at_most(7, "simple_atlas_extremals max deviation", atlas, 1e-10));
  r.rows.push_back(detail::at_most(7, "entropy portfolio max deviation", entropy, 1e-10));
  r.rows.push_back(detail::at_most(7, "diversity portfolio max deviation", diversity, 1e-10));
  detail::add_runtime(r, 5.0);
  return r;
}

// ---------------------------------------------------------------------------
// 8. Determinism
// ---------------------------------------------------------------------------

inline std::string concatenated_csv(const RunReport& run) {
  const auto spec = atlas_acceptance_spec();
  std::string out;
  for (const auto& t : simulation_artifacts(run, &spec).tables) out += t.name() + "\n" + t.str();
  return out;
}

/// Compares the CSV bytes of `reference` (workers = 1) against a rerun with
/// the same seed and a rerun with `other_workers` workers.
inline CriterionResult determinism(const RunReport& reference, std::uint64_t seed = kDefaultSeed,
                                   std::size_t other_workers = 4) {
  CriterionResult r{8, "determinism of criterion 6 CSV output", {}, 0.0};
  const auto t0 = detail::Clock::now();
  const std::string base = concatenated_csv(reference);
  const std::string same = concatenated_csv(atlas_acceptance_run(seed, reference.config.workers));
  const std::string threaded = concatenated_csv(atlas_acceptance_run(seed, other_workers));
  r.seconds = detail::seconds_since(t0);
  r.rows.push_back({8, "bytes differing, identical seed", same == base ? 0.0 : 1.0, 0.0, 0.0, same == base});
  r.rows.push_back({8, "bytes differing, workers " + std::to_string(reference.config.workers) + " vs " +
                           std::to_string(other_workers),
                    threaded == base ? 0.0 : 1.0, 0.0, 0.0, threaded == base});
  return r;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemmas", "frontier", "vsm", "atlas-asymptotics"};
  return names;
}

inline std::vector<CriterionResult> run_suite(const std::string& name, std::uint64_t seed = kDefaultSeed) {
  if (name == "lemmas") return {lemma_suite(seed), closed_form_agreement(seed)};
  if (name == "frontier") return {frontier_optimality(seed), two_stock_figure()};
  if (name == "vsm") return {vsm_closed_forms(seed), vsm_simulation(seed)};
  if (name == "atlas-asymptotics") return {atlas_asymptotics(seed)};
  throw Error(ErrorCode::UnknownSuite, "unknown suite '" + name + "'");
}

inline CsvTable results_table(const std::string& file, const std::vector<CriterionResult>& results) {
  CsvTable t(file, {"criterion", "check", "measured", "tolerance", "stderr", "pass"});
  for (const auto& res : results) {
    for (const auto& row : res.rows) {
      t.add_row({std::int64_t{row.criterion}, row.check, row.measured, row.tolerance, row.stderr_,
                 std::string(row.pass ? "pass" : "fail")});
    }
  }
  return t;
}

}  // namespace sptlab::verify
