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
 * @file rank_dynamics.hpp
 * @brief Rank-based (Atlas) market: stability, local-time rates, generating
 *        functionals and the long-run relative growth of portfolios that hold
 *        fixed weights by rank.
 *
 * Ranks are 0-based in code with rank 0 the largest capitalization.
 */
#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sptlab/error.hpp"
#include "sptlab/frontier.hpp"
#include "sptlab/linalg.hpp"
#include "sptlab/market.hpp"
#include "sptlab/special_markets.hpp"

namespace sptlab {

/// Tolerance on |g_1 + ... + g_n| for the closing stability condition.
inline constexpr double kStabilitySumTolerance = 1e-12;

struct StabilityReport {
  bool stable = false;
  /// 1-based k of every failing condition; k = n is the closing sum.
  std::vector<std::size_t> violations;
};

/// Partial sums g_1 + ... + g_k strictly negative for k < n, total zero.
inline StabilityReport check_stability(std::span<const double> g) {
  if (g.size() < 2) {
    throw Error(ErrorCode::TooShort, "rank growth vector needs at least two entries");
  }
  StabilityReport report;
  double partial = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    partial += g[k];
    if (!(partial < 0.0)) {
      report.violations.push_back(k + 1);
    }
  }
  partial += g.back();
  if (!(std::abs(partial) <= kStabilitySumTolerance)) {
    report.violations.push_back(g.size());
  }
  report.stable = report.violations.empty();
  return report;
}

inline StabilityReport check_stability(const Vector& g) {
  return check_stability(std::span<const double>(g.data(), static_cast<std::size_t>(g.size())));
}

class AtlasSpec {
 public:
  AtlasSpec(Vector g, Matrix rank_cov, std::optional<Matrix> loadings = std::nullopt)
      : g_(std::move(g)), rank_cov_(std::move(rank_cov)), loadings_(std::move(loadings)) {
    if (g_.size() < 2) {
      throw Error(ErrorCode::TooShort, "Atlas model needs n >= 2");
    }
    if (rank_cov_.rows() != g_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "rank covariance does not match growth vector");
    }
    require_symmetric(rank_cov_, "rank covariance");
    SpdFactor check(rank_cov_);
    if (loadings_) {
      if (loadings_->rows() != g_.size() || loadings_->cols() < g_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "rank loadings must be n x d with d >= n");
      }
      const Matrix implied = (*loadings_) * loadings_->transpose();
      const double scale = std::max(1.0, rank_cov_.cwiseAbs().maxCoeff());
      if ((implied - rank_cov_).cwiseAbs().maxCoeff() > kLoadingsTolerance * scale) {
        throw Error(ErrorCode::InconsistentParams, "rank loadings do not reproduce covariance");
      }
    }
    const StabilityReport st = check_stability(g_);
    if (!st.stable) {
      std::string where;
      for (auto k : st.violations) {
        where += (where.empty() ? "" : ",") + std::to_string(k);
      }
      throw Error(ErrorCode::Unstable, "stability conditions fail at k = " + where);
    }
  }

  static AtlasSpec simple(const SimpleAtlasSpec& spec) {
    RankParams rp = simple_atlas_params(spec);
    return AtlasSpec(std::move(rp.rank_growth), std::move(rp.rank_cov));
  }

  [[nodiscard]] Eigen::Index n() const noexcept { return g_.size(); }
  [[nodiscard]] const Vector& g() const noexcept { return g_; }
  [[nodiscard]] const Matrix& rank_cov() const noexcept { return rank_cov_; }
  [[nodiscard]] const std::optional<Matrix>& loadings() const noexcept { return loadings_; }

  /// Loadings used for simulation: the supplied ones, else the Cholesky factor.
  [[nodiscard]] Matrix simulation_loadings() const {
    return loadings_ ? *loadings_ : SpdFactor(rank_cov_).lower();
  }

  /// Rank-coordinate market parameters, alpha = g + diag(rank_cov)/2.
  [[nodiscard]] MarketParams market_params() const {
    return MarketParams::from_growth(g_, rank_cov_);
  }

 private:
  Vector g_;
  Matrix rank_cov_;
  std::optional<Matrix> loadings_;
};

/// Fully funded weights indexed by rank.
class RankPortfolio : public Portfolio {
 public:
  using Portfolio::Portfolio;
  explicit RankPortfolio(const Portfolio& pf) : Portfolio(pf) {}
};

struct LocalTimeRates {
  Vector rates;  ///< length n - 1, per unit time
};

/// Long-run local-time rates -2 (g_1 + ... + g_i) for i = 1..n-1.
inline LocalTimeRates local_time_rates(const Vector& g) {
  if (!check_stability(g).stable) {
    throw Error(ErrorCode::Unstable, "local-time rates need a stable growth vector");
  }
  Vector rates(g.size() - 1);
  double partial = 0.0;
  for (Eigen::Index i = 0; i + 1 < g.size(); ++i) {
    partial += g[i];
    rates[i] = -2.0 * partial;
  }
  return {std::move(rates)};
}

/// F(x) = prod x_i^{p_i}, evaluated through logs.
inline double log_generating_functional(std::span<const double> x, const Portfolio& p) {
  if (static_cast<Eigen::Index>(x.size()) != p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "generating functional argument size mismatch");
  }
  double out = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveInput, "generating functional needs positive inputs");
    }
    out += p[static_cast<Eigen::Index>(i)] * std::log(x[i]);
  }
  return out;
}

inline double generating_functional(std::span<const double> x, const Portfolio& p) {
  return std::exp(log_generating_functional(x, p));
}

inline double generating_functional(const Vector& x, const Portfolio& p) {
  return generating_functional(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), p);
}

inline double rank_excess_growth(const AtlasSpec& spec, const Portfolio& p) {
  if (p.size() != spec.n()) {
    throw Error(ErrorCode::DimensionMismatch, "rank portfolio size does not match spec");
  }
  const Vector& w = p.weights();
  return 0.5 * (spec.rank_cov().diagonal().dot(w) - w.dot(spec.rank_cov() * w));
}

/// Almost-sure long-run rate of ln(V_pi / V_mu) / T: g' p + excess growth.
inline double asymptotic_relative_growth(const AtlasSpec& spec, const Portfolio& p) {
  return spec.g().dot(p.weights()) + rank_excess_growth(spec, p);
}

/// Long-run drift of Theta: excess growth + (1/2) sum (p_{i+1} - p_i) rate_i.
inline double theta_drift(const AtlasSpec& spec, const Portfolio& p) {
  const LocalTimeRates lt = local_time_rates(spec.g());
  double push = 0.0;
  for (Eigen::Index i = 0; i < lt.rates.size(); ++i) {
    push += 0.5 * (p[i + 1] - p[i]) * lt.rates[i];
  }
  return rank_excess_growth(spec, p) + push;
}

struct RankFrontier {
  RankPortfolio nu0;
  RankPortfolio nu1;
  BaseStats stats;
  std::vector<FrontierPoint> curve;
};

inline RankFrontier rank_frontier(const AtlasSpec& spec, std::span<const double> p_grid) {
  const MarketParams params = spec.market_params();
  return {RankPortfolio(min_volatility_portfolio(params)),
          RankPortfolio(max_growth_portfolio(params)), base_stats(params),
          frontier_curve(params, p_grid)};
}

inline RankFrontier rank_frontier(const AtlasSpec& spec) {
  const std::vector<double> grid = unit_grid(101);
  return rank_frontier(spec, grid);
}

}  // namespace sptlab
