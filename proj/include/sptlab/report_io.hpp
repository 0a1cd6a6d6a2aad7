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
 * @file report_io.hpp
 * @brief Tables (and charts) for every artifact the command-line tool emits.
 *        Column names and order here are the documented CSV schema.
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sptlab/csv.hpp"
#include "sptlab/frontier.hpp"
#include "sptlab/rank_dynamics.hpp"
#include "sptlab/simulator.hpp"
#include "sptlab/special_markets.hpp"
#include "sptlab/svg.hpp"
#include "sptlab/two_stock.hpp"

namespace sptlab {

namespace detail {

inline std::vector<std::string> weight_columns(Eigen::Index n, const std::string& prefix = "w") {
  std::vector<std::string> cols;
  for (Eigen::Index i = 1; i <= n; ++i) cols.push_back(prefix + std::to_string(i));
  return cols;
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline void append_weights(std::vector<CsvTable::Cell>& row, const Vector& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) row.emplace_back(w[i]);
}

inline CsvTable frontier_table(const std::string& name, const std::vector<FrontierPoint>& curve) {
  CsvTable t(name, {"p", "sigma_p", "gamma_p"});
  for (const auto& pt : curve) t.add_row({pt.p, pt.sigma_p, pt.gamma_p});
  return t;
}

inline SvgChart frontier_chart(const std::string& title, const std::vector<FrontierPoint>& curve) {
  SvgChart chart{title, "sigma_p", "gamma_p", {{"frontier", {}}}};
  for (const auto& pt : curve) chart.series[0].points.emplace_back(pt.sigma_p, pt.gamma_p);
  return chart;
}

}  // namespace detail

struct ArtifactSet {
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, SvgChart>> charts;
};

// ---------------------------------------------------------------------------

/// frontier.csv, extremals.csv and, with benchmarks, theta.csv.
inline ArtifactSet frontier_artifacts(const MarketParams& params, const std::vector<double>& grid,
                                      const std::vector<double>& benchmarks) {
  ArtifactSet out;
  const auto curve = frontier_curve(params, grid);
  out.tables.push_back(detail::frontier_table("frontier.csv", curve));

  const auto st = base_stats(params);
  CsvTable ext("extremals.csv",
               detail::concat({"portfolio", "sigma", "gamma"}, detail::weight_columns(params.n())));
  const Portfolio nu0 = min_volatility_portfolio(params);
  const Portfolio nu1 = max_growth_portfolio(params);
  for (const auto& [label, pf] : {std::pair{"min_volatility", nu0}, std::pair{"max_growth", nu1}}) {
    std::vector<CsvTable::Cell> row{std::string(label), portfolio_volatility(params, pf),
                                    portfolio_growth(params, pf)};
    detail::append_weights(row, pf.weights());
    ext.add_row(row);
  }
  out.tables.push_back(std::move(ext));

  CsvTable stats("stats.csv", {"quantity", "value"});
  stats.add_row({std::string("s"), st.s});
  stats.add_row({std::string("a"), st.a});
  stats.add_row({std::string("S"), st.S});
  out.tables.push_back(std::move(stats));

  if (!benchmarks.empty()) {
    CsvTable theta("theta.csv", {"b", "theta0", "theta1"});
    for (double b : benchmarks) {
      const auto [t0, t1] = theta_range(st, b);
      theta.add_row({b, t0, t1});
    }
    out.tables.push_back(std::move(theta));
  }
  out.charts.emplace_back("frontier.svg", detail::frontier_chart("Efficient frontier", curve));
  return out;
}

// ---------------------------------------------------------------------------

/// two_stock.csv (one curve per s12) and extrema.csv.
inline ArtifactSet two_stock_artifacts(TwoStockInputs base, const std::vector<double>& s12_values,
                                       double x_lo, double x_hi, std::size_t steps) {
  ArtifactSet out;
  CsvTable curves("two_stock.csv", {"s12", "x", "sigma", "gamma"});
  CsvTable extrema("extrema.csv", {"s12", "kind", "x_analytic", "value_analytic", "x_sampled", "value_sampled"});
  SvgChart chart{"Two-stock portfolios", "sigma", "gamma", {}};
  for (double s12 : s12_values) {
    base.s12 = s12;
    const auto curve = two_stock_curve(base, x_lo, x_hi, steps);
    SvgSeries series{"s12 = " + format_double(s12), {}};
    for (const auto& smp : curve.samples) {
      curves.add_row({s12, smp.x, smp.sigma, smp.gamma});
      series.points.emplace_back(smp.sigma, smp.gamma);
    }
    extrema.add_row({s12, std::string("growth_max"), curve.growth_max.x, curve.growth_max.value,
                     curve.sampled_growth_max.x, curve.sampled_growth_max.value});
    extrema.add_row({s12, std::string("variance_min"), curve.variance_min.x, curve.variance_min.value,
                     curve.sampled_variance_min.x, curve.sampled_variance_min.value});
    chart.series.push_back(std::move(series));
  }
  out.tables.push_back(std::move(curves));
  out.tables.push_back(std::move(extrema));
  out.charts.emplace_back("two_stock.svg", std::move(chart));
  return out;
}

// ---------------------------------------------------------------------------

/// vsm_summary.csv, vsm_portfolios.csv, vsm_frontier.csv.
inline ArtifactSet vsm_artifacts(const MarketWeights& mu, const std::vector<double>& grid,
                                 const std::vector<double>& benchmarks, double entropy_c) {
  ArtifactSet out;
  const auto params = vsm_params(mu);
  const auto ex = vsm_extremals(mu);
  const auto ent = entropy_weighted_portfolio(mu, entropy_c);

  CsvTable summary("vsm_summary.csv", {"quantity", "value"});
  summary.add_row({std::string("d_minus_one"), d_minus_one(mu)});
  summary.add_row({std::string("s"), ex.stats.s});
  summary.add_row({std::string("a"), ex.stats.a});
  summary.add_row({std::string("S"), ex.stats.S});
  summary.add_row({std::string("gamma0"), ex.gamma0});
  summary.add_row({std::string("gamma1"), ex.gamma1});
  for (double b : benchmarks) {
    const auto [t0, t1] = theta_range(ex.stats, b);
    summary.add_row({"theta0_b=" + format_double(b), t0});
    summary.add_row({"theta1_b=" + format_double(b), t1});
  }
  out.tables.push_back(std::move(summary));

  CsvTable ports("vsm_portfolios.csv",
                 detail::concat({"portfolio", "variance", "growth"}, detail::weight_columns(mu.n())));
  auto add = [&](const std::string& label, const Portfolio& pf, double var, double growth) {
    std::vector<CsvTable::Cell> row{label, var, growth};
    detail::append_weights(row, pf.weights());
    ports.add_row(row);
  };
  add("min_volatility", ex.nu0, ex.stats.s * ex.stats.s, ex.gamma0);
  add("max_growth", ex.nu1, ex.stats.S * ex.stats.S, ex.gamma1);
  add("entropy", ent.weights, ent.variance, ent.growth);
  out.tables.push_back(std::move(ports));

  const auto curve = frontier_curve(params, grid);
  out.tables.push_back(detail::frontier_table("vsm_frontier.csv", curve));
  out.charts.emplace_back("vsm_frontier.svg",
                          detail::frontier_chart("Volatility-stabilized market frontier", curve));
  return out;
}

// ---------------------------------------------------------------------------

/// atlas_summary.csv, atlas_local_times.csv, atlas_portfolios.csv, rank_frontier.csv.
inline ArtifactSet atlas_artifacts(const AtlasSpec& spec, const std::vector<Portfolio>& portfolios,
                                   const std::vector<double>& grid) {
  ArtifactSet out;
  const auto rf = rank_frontier(spec, grid);
  const auto stab = check_stability(spec.g());

  CsvTable summary("atlas_summary.csv", {"quantity", "value"});
  summary.add_row({std::string("stable"), std::int64_t{stab.stable ? 1 : 0}});
  summary.add_row({std::string("s"), rf.stats.s});
  summary.add_row({std::string("a"), rf.stats.a});
  summary.add_row({std::string("S"), rf.stats.S});
  out.tables.push_back(std::move(summary));

  CsvTable lt("atlas_local_times.csv", {"gap", "rate"});
  const auto rates = local_time_rates(spec.g());
  for (Eigen::Index k = 0; k < rates.rates.size(); ++k) lt.add_row({std::int64_t{k + 1}, rates.rates[k]});
  out.tables.push_back(std::move(lt));

  CsvTable ports("atlas_portfolios.csv",
                 detail::concat({"portfolio", "excess_growth", "relative_growth", "theta_drift"},
                                detail::weight_columns(spec.n(), "p")));
  auto add = [&](const std::string& label, const Portfolio& p) {
    std::vector<CsvTable::Cell> row{label, rank_excess_growth(spec, p), asymptotic_relative_growth(spec, p),
                                    theta_drift(spec, p)};
    detail::append_weights(row, p.weights());
    ports.add_row(row);
  };
  add("min_volatility", rf.nu0);
  add("max_growth", rf.nu1);
  for (std::size_t j = 0; j < portfolios.size(); ++j) add("portfolio_" + std::to_string(j + 1), portfolios[j]);
  out.tables.push_back(std::move(ports));

  out.tables.push_back(detail::frontier_table("rank_frontier.csv", rf.curve));
  out.charts.emplace_back("rank_frontier.svg", detail::frontier_chart("Rank-based frontier", rf.curve));
  return out;
}

// ---------------------------------------------------------------------------

/**
 * Simulation artifacts: sim_summary.csv, sim_portfolios.csv,
 * sim_covariance.csv, sim_series.csv, and for Atlas runs
 * sim_local_times.csv and sim_fgp.csv. `spec` adds closed-form targets.
 */
inline ArtifactSet simulation_artifacts(const RunReport& run, const AtlasSpec* spec = nullptr) {
  ArtifactSet out;
  const auto& rs = run.realized;

  CsvTable summary("sim_summary.csv", {"quantity", "value", "stderr"});
  summary.add_row({std::string("horizon"), run.horizon, 0.0});
  summary.add_row({std::string("steps"), static_cast<double>(run.steps), 0.0});
  summary.add_row({std::string("n_paths"), static_cast<double>(run.paths.size()), 0.0});
  summary.add_row({std::string("market_growth"), rs.market_growth.value, rs.market_growth.stderr_});
  summary.add_row({std::string("floor_hit_rate"), run.floor_hit_rate, 0.0});
  summary.add_row({std::string("floor_warning"), run.floor_warning ? 1.0 : 0.0, 0.0});
  out.tables.push_back(std::move(summary));

  CsvTable ports("sim_portfolios.csv",
                 {"portfolio", "label", "initial_variance", "growth", "growth_se", "relative_growth",
                  "relative_growth_se", "realized_variance", "realized_variance_se"});
  for (std::size_t j = 0; j < run.labels.size(); ++j) {
    ports.add_row({static_cast<std::int64_t>(j + 1), run.labels[j], run.initial_variance[j], rs.growth[j].value,
                   rs.growth[j].stderr_, rs.relative_growth[j].value, rs.relative_growth[j].stderr_,
                   rs.variance[j].value, rs.variance[j].stderr_});
  }
  out.tables.push_back(std::move(ports));

  CsvTable cov("sim_covariance.csv", {"i", "j", "value", "stderr"});
  for (Eigen::Index i = 0; i < rs.covariance.rows(); ++i) {
    for (Eigen::Index j = 0; j < rs.covariance.cols(); ++j) {
      cov.add_row({std::int64_t{i + 1}, std::int64_t{j + 1}, rs.covariance(i, j), rs.covariance_stderr(i, j)});
    }
  }
  out.tables.push_back(std::move(cov));

  std::vector<std::string> series_cols{"time"};
  for (const auto& l : run.labels) series_cols.push_back(l);
  CsvTable series("sim_series.csv", series_cols);
  SvgChart chart{"Mean relative log performance", "t", "ln(V_pi / V_mu)", {}};
  for (const auto& l : run.labels) chart.series.push_back({l, {}});
  for (std::size_t s = 0; s < run.series_time.size(); ++s) {
    std::vector<CsvTable::Cell> row{run.series_time[s]};
    for (std::size_t j = 0; j < run.labels.size(); ++j) {
      row.emplace_back(run.series_relative_log[j][s]);
      chart.series[j].points.emplace_back(run.series_time[s], run.series_relative_log[j][s]);
    }
    series.add_row(row);
  }
  out.tables.push_back(std::move(series));
  out.charts.emplace_back("sim_series.svg", std::move(chart));

  if (run.model == ModelKind::Atlas) {
    std::optional<LocalTimeRates> targets;
    if (spec) targets = local_time_rates(spec->g());
    CsvTable lt("sim_local_times.csv", {"gap", "epsilon", "rate", "stderr", "target"});
    for (std::size_t k = 0; k < run.local_times.size(); ++k) {
      const auto& e = run.local_times[k];
      const double target = targets ? targets->rates[static_cast<Eigen::Index>(k)]
                                     : std::numeric_limits<double>::quiet_NaN();
      lt.add_row({static_cast<std::int64_t>(k + 1), e.epsilon, e.rate, e.stderr_, target});
    }
    out.tables.push_back(std::move(lt));

    CsvTable fgp("sim_fgp.csv", {"portfolio", "dlnF", "dTheta", "residual", "dlnF_rate", "dlnF_rate_se",
                                 "dTheta_rate", "dTheta_rate_se", "theta_drift_target", "relative_growth_target"});
    for (std::size_t j = 0; j < run.fgp.size(); ++j) {
      const auto& d = run.fgp[j];
      double drift_target = std::numeric_limits<double>::quiet_NaN();
      double rel_target = drift_target;
      if (spec) {
        const Portfolio p(run.tracked[j]);
        drift_target = theta_drift(*spec, p);
        rel_target = asymptotic_relative_growth(*spec, p);
      }
      fgp.add_row({static_cast<std::int64_t>(j + 1), d.dlnF, d.dTheta, d.residual, d.dlnF_rate.value,
                   d.dlnF_rate.stderr_, d.dTheta_rate.value, d.dTheta_rate.stderr_, drift_target, rel_target});
    }
    out.tables.push_back(std::move(fgp));
  }
  return out;
}

}  // namespace sptlab
