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
 * @file special_markets.hpp
 * @brief Closed forms for the volatility-stabilized market and the simple
 *        Atlas model, plus the entropy- and diversity-weighted portfolios.
 */
#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sptlab/error.hpp"
#include "sptlab/frontier.hpp"
#include "sptlab/linalg.hpp"
#include "sptlab/market.hpp"
#include "sptlab/ranks.hpp"

namespace sptlab {

/// Tolerance for market weights summing to one.
inline constexpr double kMarketWeightTolerance = 1e-12;

/// Strictly positive market weights summing to one.
class MarketWeights {
 public:
  explicit MarketWeights(Vector mu) : mu_(std::move(mu)) {
    if (mu_.size() < 2) {
      throw Error(ErrorCode::TooShort, "market needs at least two weights");
    }
    for (Eigen::Index i = 0; i < mu_.size(); ++i) {
      if (!(mu_[i] > 0.0)) {
        throw Error(ErrorCode::NonPositiveWeight,
                    "market weight " + std::to_string(i) + " is not positive");
      }
    }
    if (std::abs(mu_.sum() - 1.0) > kMarketWeightTolerance) {
      throw Error(ErrorCode::NonPositiveWeight, "market weights do not sum to 1");
    }
  }

  static MarketWeights equal(Eigen::Index n) {
    return MarketWeights(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  }

  [[nodiscard]] const Vector& values() const noexcept { return mu_; }
  [[nodiscard]] Eigen::Index n() const noexcept { return mu_.size(); }
  [[nodiscard]] double operator[](Eigen::Index i) const { return mu_[i]; }

 private:
  Vector mu_;
};

// ---------------------------------------------------------------------------
// Volatility-stabilized market: d ln V_i = dW_i / sqrt(mu_i)
// ---------------------------------------------------------------------------

/// Instantaneous parameters: sigma = diag(1/mu), alpha = 1/(2 mu).
inline MarketParams vsm_params(const MarketWeights& mu) {
  const Vector inv = mu.values().cwiseInverse();
  return MarketParams::from_alpha(0.5 * inv, Matrix(inv.asDiagonal()));
}

/// D_{-1} = 1 / sum(1/mu_i); at most 1/n^2.
inline double d_minus_one(const MarketWeights& mu) {
  return 1.0 / mu.values().cwiseInverse().sum();
}

struct ExtremalSummary {
  Portfolio nu0;
  Portfolio nu1;
  BaseStats stats;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
};

inline ExtremalSummary vsm_extremals(const MarketWeights& mu) {
  const auto n = static_cast<double>(mu.n());
  const double inv_d = 1.0 / d_minus_one(mu);
  Vector nu1 = Vector::Constant(mu.n(), 0.5) + (1.0 - 0.5 * n) * mu.values();
  BaseStats stats{1.0, 0.5 * n, 0.5 * std::sqrt(inv_d + 4.0 - n * n)};
  return {Portfolio(mu.values()), Portfolio(std::move(nu1)), stats, 0.5 * (n - 1.0),
          (4.0 * n + inv_d - n * n - 4.0) / 8.0};
}

/// Portfolio together with its instantaneous variance and growth rate.
struct WeightedPortfolio {
  Portfolio weights;
  double variance = 0.0;
  double growth = 0.0;
};

/**
 * Entropy-weighted portfolio zeta_i = mu_i (c - ln mu_i) / Z with
 * Z = c - sum mu_i ln mu_i. Requires c > ln mu_i for every i.
 */
inline WeightedPortfolio entropy_weighted_portfolio(const MarketWeights& mu, double c = 0.0) {
  const Vector& m = mu.values();
  const Vector logs = m.array().log().matrix();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!(c - logs[i] > 0.0)) {
      throw Error(ErrorCode::InvalidOffset,
                  "entropy offset c must exceed ln mu_" + std::to_string(i));
    }
  }
  const double z = c - m.dot(logs);
  Vector zeta = (m.array() * (c - logs.array())).matrix() / z;
  const double log_sq = m.dot(logs.cwiseAbs2());
  const double variance = (log_sq + 2.0 * c * z - c * c) / (z * z);
  const auto n = static_cast<double>(m.size());
  const double growth = (n * c - logs.sum()) / (2.0 * z) - 0.5 * variance;
  return {Portfolio(std::move(zeta)), variance, growth};
}

/// Frontier points of the n = 3 volatility-stabilized market.
inline std::vector<FrontierPoint> vsm_n3_frontier(const MarketWeights& mu,
                                                  std::span<const double> p_grid) {
  if (mu.n() != 3) {
    throw Error(ErrorCode::WrongDimension, "the n = 3 frontier needs exactly three weights");
  }
  return frontier_curve(vsm_params(mu), p_grid);
}

// ---------------------------------------------------------------------------
// Simple Atlas model: d ln V_i = (-g + n g 1[r_i = n]) dt + sigma dW_i
// ---------------------------------------------------------------------------

class SimpleAtlasSpec {
 public:
  SimpleAtlasSpec(Eigen::Index n, double g, double sigma) : n_(n), g_(g), sigma_(sigma) {
    if (n < 2) {
      throw Error(ErrorCode::TooShort, "simple Atlas needs n >= 2");
    }
    if (!(g > 0.0) || !(sigma > 0.0)) {
      throw Error(ErrorCode::InconsistentParams, "simple Atlas needs g > 0 and sigma > 0");
    }
  }

  [[nodiscard]] Eigen::Index n() const noexcept { return n_; }
  [[nodiscard]] double g() const noexcept { return g_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }
  [[nodiscard]] double lambda() const noexcept { return g_ / (sigma_ * sigma_); }

 private:
  Eigen::Index n_;
  double g_;
  double sigma_;
};

struct RankParams {
  Vector rank_growth;
  Matrix rank_cov;
};

inline RankParams simple_atlas_params(const SimpleAtlasSpec& spec) {
  const auto n = spec.n();
  Vector growth = Vector::Constant(n, -spec.g());
  growth[n - 1] = static_cast<double>(n - 1) * spec.g();
  return {std::move(growth), spec.sigma() * spec.sigma() * Matrix::Identity(n, n)};
}

struct AtlasExtremals {
  Portfolio nu0;
  Portfolio nu1;
  BaseStats stats;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  bool all_long = false;
};

/// Extremal portfolios in rank coordinates (index 0 = largest capitalization).
inline AtlasExtremals simple_atlas_extremals(const SimpleAtlasSpec& spec) {
  const auto n = static_cast<double>(spec.n());
  const double lambda = spec.lambda();
  const double var = spec.sigma() * spec.sigma();
  Vector nu1 = Vector::Constant(spec.n(), 1.0 / n - lambda);
  nu1[spec.n() - 1] += lambda * n;
  const double s = spec.sigma() / std::sqrt(n);
  const double big_s = s * std::sqrt(1.0 + n * n * (n - 1.0) * lambda * lambda);
  return {Portfolio::equal(spec.n()),
          Portfolio(std::move(nu1)),
          {s, 0.5 * var, big_s},
          0.5 * var * (1.0 - 1.0 / n),
          0.5 * var * (1.0 - 1.0 / n + n * (n - 1.0) * lambda * lambda),
          lambda <= 1.0 / n};
}

/**
 * Diversity-weighted portfolio zeta_i = mu_i^p / sum_j mu_j^p in the simple
 * Atlas model. Weights come back in name order; growth is the rank-weighted
 * drift plus the excess growth under covariance sigma^2 I.
 */
inline WeightedPortfolio diversity_weighted_portfolio(const MarketWeights& mu, double p_div,
                                                      const SimpleAtlasSpec& spec) {
  if (!(p_div >= 0.0 && p_div <= 1.0)) {
    throw Error(ErrorCode::InconsistentParams, "diversity parameter must lie in [0, 1]");
  }
  if (mu.n() != spec.n()) {
    throw Error(ErrorCode::DimensionMismatch, "market weights and Atlas spec differ in size");
  }
  const Vector& m = mu.values();
  const Vector powered = m.array().pow(p_div).matrix();
  const double norm = powered.sum();
  Vector zeta = powered / norm;
  const double var = spec.sigma() * spec.sigma();
  const double variance = var * m.array().pow(2.0 * p_div).sum() / (norm * norm);

  const RankParams rp = simple_atlas_params(spec);
  const std::vector<std::size_t> order = rank_order({m.data(), static_cast<std::size_t>(m.size())});
  double drift = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    drift += zeta[static_cast<Eigen::Index>(order[k])] * rp.rank_growth[static_cast<Eigen::Index>(k)];
  }
  const double excess = 0.5 * (var - var * zeta.squaredNorm());
  return {Portfolio(std::move(zeta)), variance, drift + excess};
}

}  // namespace sptlab
