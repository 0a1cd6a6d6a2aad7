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
 * @file market.hpp
 * @brief Fixed-parameter market description and the portfolio value types.
 *
 * A market is described by arithmetic return rates alpha and a covariance
 * matrix sigma (both per unit time). Growth rates gamma relate to them through
 * alpha = gamma + diag(sigma) / 2, and either parameterization may be given.
 */
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "sptlab/error.hpp"
#include "sptlab/linalg.hpp"

namespace sptlab {

/// Tolerance for alpha/growth consistency when both are supplied.
inline constexpr double kParamConsistencyTolerance = 1e-10;
/// Tolerance for loadings * loadings^T reproducing the covariance.
inline constexpr double kLoadingsTolerance = 1e-10;
/// Fully-funded tolerance for portfolio weights.
inline constexpr double kFundingTolerance = 1e-12;

class MarketParams {
 public:
  /// Market from arithmetic return rates.
  static MarketParams from_alpha(Vector alpha, Matrix sigma) {
    return MarketParams(std::move(alpha), std::move(sigma), std::nullopt, std::nullopt);
  }

  /// Market from log growth rates; alpha is derived.
  static MarketParams from_growth(const Vector& growth, Matrix sigma) {
    if (growth.size() != sigma.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "growth length does not match covariance");
    }
    Vector alpha = growth + 0.5 * sigma.diagonal();
    return MarketParams(std::move(alpha), std::move(sigma), growth, std::nullopt);
  }

  /**
   * General constructor. At least one of alpha/growth must be present; when
   * both are, they must satisfy alpha = growth + diag(sigma)/2. When loadings
   * (n x d, d >= n) are present, sigma may be omitted and is then built as
   * loadings * loadings^T.
   */
  static MarketParams make(std::optional<Vector> alpha, std::optional<Vector> growth,
                           std::optional<Matrix> sigma, std::optional<Matrix> loadings) {
    if (!sigma && !loadings) {
      throw Error(ErrorCode::InconsistentParams, "either sigma or loadings is required");
    }
    Matrix cov = sigma ? *sigma : Matrix((*loadings) * loadings->transpose());
    if (!alpha && !growth) {
      throw Error(ErrorCode::InconsistentParams, "either alpha or growth is required");
    }
    if (growth && growth->size() != cov.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "growth length does not match covariance");
    }
    Vector a = alpha ? *alpha : Vector(*growth + 0.5 * cov.diagonal());
    return MarketParams(std::move(a), std::move(cov), std::move(growth), std::move(loadings));
  }

  [[nodiscard]] Eigen::Index n() const noexcept { return alpha_.size(); }
  [[nodiscard]] const Vector& alpha() const noexcept { return alpha_; }
  [[nodiscard]] const Matrix& sigma() const noexcept { return sigma_; }
  [[nodiscard]] const std::optional<Matrix>& loadings() const noexcept { return loadings_; }
  [[nodiscard]] const SpdFactor& factor() const noexcept { return factor_; }

  /// Growth rates gamma = alpha - diag(sigma)/2 (or the supplied ones).
  [[nodiscard]] Vector growth() const {
    return growth_ ? *growth_ : Vector(alpha_ - 0.5 * sigma_.diagonal());
  }

 private:
  MarketParams(Vector alpha, Matrix sigma, std::optional<Vector> growth,
               std::optional<Matrix> loadings)
      : alpha_(std::move(alpha)),
        sigma_(checked(sigma)),
        growth_(std::move(growth)),
        loadings_(std::move(loadings)),
        factor_(sigma_) {
    if (sigma_.rows() < 2) {
      throw Error(ErrorCode::TooShort, "universe needs at least two stocks");
    }
    if (alpha_.size() != sigma_.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "alpha length does not match covariance");
    }
    if (growth_) {
      const Vector implied = *growth_ + 0.5 * sigma_.diagonal();
      if ((implied - alpha_).cwiseAbs().maxCoeff() > kParamConsistencyTolerance) {
        throw Error(ErrorCode::InconsistentParams,
                    "alpha and growth disagree: alpha != growth + diag(sigma)/2");
      }
    }
    if (loadings_) {
      if (loadings_->rows() != sigma_.rows() || loadings_->cols() < loadings_->rows()) {
        throw Error(ErrorCode::DimensionMismatch, "loadings must be n x d with d >= n");
      }
      const Matrix implied = (*loadings_) * loadings_->transpose();
      const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
      if ((implied - sigma_).cwiseAbs().maxCoeff() > kLoadingsTolerance * scale) {
        throw Error(ErrorCode::InconsistentParams, "loadings do not reproduce sigma");
      }
    }
  }

  static const Matrix& checked(const Matrix& m) {
    require_symmetric(m, "sigma");
    return m;
  }

  Vector alpha_;
  Matrix sigma_;
  std::optional<Vector> growth_;
  std::optional<Matrix> loadings_;
  SpdFactor factor_;
};

/// Minimum volatility s, scalar a and maximum-growth volatility S.
struct BaseStats {
  double s = 0.0;
  double a = 0.0;
  double S = 0.0;
};

/// Fully funded weight vector; short positions allowed.
class Portfolio {
 public:
  explicit Portfolio(Vector weights) : weights_(std::move(weights)) {
    const double total = weights_.sum();
    const double scale = std::max(1.0, weights_.cwiseAbs().sum());
    if (!std::isfinite(total) || std::abs(total - 1.0) > kFundingTolerance * scale) {
      throw Error(ErrorCode::InconsistentParams,
                  "portfolio weights sum to " + std::to_string(total) + ", not 1");
    }
  }

  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return weights_.size(); }
  [[nodiscard]] double operator[](Eigen::Index i) const { return weights_[i]; }

  /// All-in portfolio on stock `i` of an n-stock universe.
  static Portfolio single(Eigen::Index n, Eigen::Index i) {
    Vector w = Vector::Zero(n);
    w[i] = 1.0;
    return Portfolio(std::move(w));
  }

  static Portfolio equal(Eigen::Index n) {
    return Portfolio(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  }

 private:
  Vector weights_;
};

struct FrontierPoint {
  double p = 0.0;
  double sigma_p = 0.0;
  double gamma_p = 0.0;
};

inline void require_same_size(const MarketParams& params, const Portfolio& pf) {
  if (pf.size() != params.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "portfolio has " + std::to_string(pf.size()) + " weights for a " +
                    std::to_string(params.n()) + "-stock market");
  }
}

}  // namespace sptlab
