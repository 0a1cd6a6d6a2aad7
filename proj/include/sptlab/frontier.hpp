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
 * @file frontier.hpp
 * @brief Closed-form analytics for a market with fixed parameters: base
 *        statistics, the two extremal portfolios, the efficient frontier
 *        between them and the risk-adjusted return.
 *
 * Notation: e is the vector of ones, Sigma the covariance, alpha the
 * arithmetic return rates.
 *
 *   s^2 = 1 / (e' Sigma^-1 e)
 *   a   = s^2 e' Sigma^-1 alpha
 *   S^2 = alpha' Sigma^-1 alpha - a^2 / s^2 + s^2
 *
 * The minimum-volatility portfolio is s^2 Sigma^-1 e, the maximum-growth one
 * Sigma^-1 (alpha + (s^2 - a) e), and the frontier portfolio for parameter p
 * is Sigma^-1 (p alpha + (s^2 - a p) e).
 */
#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "sptlab/error.hpp"
#include "sptlab/linalg.hpp"
#include "sptlab/market.hpp"

namespace sptlab {

namespace detail {

/// nu0 = s^2 Sigma^-1 e and the frontier direction Sigma^-1 (alpha - a e);
/// every frontier portfolio is nu0 + p * direction.
struct FrontierBasis {
  Vector nu0;
  Vector direction;
};

inline FrontierBasis frontier_basis(const MarketParams& params) {
  const Vector inv_e = params.factor().solve(Vector::Ones(params.n()));
  const double s2 = 1.0 / inv_e.sum();
  const double a = s2 * params.factor().solve(params.alpha()).sum();
  const Vector centred = params.alpha() - Vector::Constant(params.n(), a);
  return {s2 * inv_e, params.factor().solve(centred)};
}

}  // namespace detail

inline BaseStats base_stats(const MarketParams& params) {
  const Vector inv_e = params.factor().solve(Vector::Ones(params.n()));
  const Vector inv_alpha = params.factor().solve(params.alpha());
  const double s2 = 1.0 / inv_e.sum();
  const double a = s2 * inv_alpha.sum();
  // alpha' Sigma^-1 alpha - a^2/s^2 is the Sigma^-1 norm of (alpha - a e);
  // evaluate it through the triangular factor so it cannot go negative.
  const Vector centred = params.alpha() - Vector::Constant(params.n(), a);
  const Matrix l = params.factor().lower();
  const Vector half = l.triangularView<Eigen::Lower>().solve(centred);
  const double spread = half.squaredNorm();
  return {std::sqrt(s2), a, std::sqrt(s2 + spread)};
}

inline Portfolio min_volatility_portfolio(const MarketParams& params) {
  return Portfolio(detail::frontier_basis(params).nu0);
}

inline Portfolio max_growth_portfolio(const MarketParams& params) {
  auto [nu0, direction] = detail::frontier_basis(params);
  return Portfolio(nu0 + direction);
}

/// Frontier portfolio plus a flag for p outside [0, 1].
struct FrontierPortfolio {
  Portfolio portfolio;
  double p = 0.0;
  bool extrapolated = false;
};

inline FrontierPortfolio frontier_portfolio(const MarketParams& params, double p) {
  auto [nu0, direction] = detail::frontier_basis(params);
  return {Portfolio(nu0 + p * direction), p, p < 0.0 || p > 1.0};
}

inline double portfolio_variance(const MarketParams& params, const Portfolio& pf) {
  require_same_size(params, pf);
  return pf.weights().dot(params.sigma() * pf.weights());
}

inline double portfolio_volatility(const MarketParams& params, const Portfolio& pf) {
  return std::sqrt(portfolio_variance(params, pf));
}

/// Growth rate pi' alpha - pi' Sigma pi / 2.
inline double portfolio_growth(const MarketParams& params, const Portfolio& pf) {
  return pf.weights().dot(params.alpha()) - 0.5 * portfolio_variance(params, pf);
}

/// Excess growth (diag(Sigma)' pi - pi' Sigma pi) / 2.
inline double excess_growth(const MarketParams& params, const Portfolio& pf) {
  require_same_size(params, pf);
  return 0.5 * (params.sigma().diagonal().dot(pf.weights()) - portfolio_variance(params, pf));
}

/// Frontier volatility sqrt((1 - p^2) s^2 + p^2 S^2).
inline double frontier_volatility(const BaseStats& st, double p) {
  return std::sqrt((1.0 - p * p) * st.s * st.s + p * p * st.S * st.S);
}

/// Frontier growth a + (p - p^2/2) S^2 - (p + (1 - p^2)/2) s^2.
inline double frontier_growth(const BaseStats& st, double p) {
  return st.a + (p - 0.5 * p * p) * st.S * st.S - (p + 0.5 * (1.0 - p * p)) * st.s * st.s;
}

inline std::vector<FrontierPoint> frontier_curve(const MarketParams& params,
                                                 std::span<const double> p_grid) {
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::GridOutOfRange,
                  "frontier grid value " + std::to_string(p) + " is outside [0, 1]");
    }
  }
  const BaseStats st = base_stats(params);
  std::vector<FrontierPoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    out.push_back({p, frontier_volatility(st, p), frontier_growth(st, p)});
  }
  return out;
}

/// Uniform grid of `count` points on [0, 1].
inline std::vector<double> unit_grid(std::size_t count) {
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = 0.0;
    return grid;
  }
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

struct FrontierSlopes {
  double dsigma_dp = 0.0;
  double dgamma_dp = 0.0;
};

/// Derivatives of (sigma_p, gamma_p) with respect to p.
inline FrontierSlopes frontier_slopes(const MarketParams& params, double p) {
  const BaseStats st = base_stats(params);
  const double spread = st.S * st.S - st.s * st.s;
  return {p * spread / frontier_volatility(st, p), (1.0 - p) * spread};
}

/// Growth in excess of a riskless rate b, per unit of volatility.
inline double theta_ratio(const MarketParams& params, const Portfolio& pf, double b) {
  const double vol = portfolio_volatility(params, pf);
  if (!(vol > 0.0)) {
    throw Error(ErrorCode::ZeroVolatility, "portfolio has zero volatility");
  }
  return (portfolio_growth(params, pf) - b) / vol;
}

/// Bounds of theta along the frontier: (theta at p = 0, theta at p = 1).
inline std::pair<double, double> theta_range(const BaseStats& st, double b) {
  const double lo = (st.a - b) / st.s - 0.5 * st.s;
  const double hi = (st.a - b) / st.S + 0.5 * st.S - st.s * st.s / st.S;
  return {lo, hi};
}

}  // namespace sptlab
