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
 * @file two_stock.hpp
 * @brief Portfolio x * stock1 + (1 - x) * stock2 traced over a range of x.
 *
 * Growth is concave in x and variance convex, with
 *   growth max at   x = 1/2 + (g1 - g2) / d
 *   variance min at x = (s22 - s12) / d,      d = s11 + s22 - 2 s12.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sptlab/error.hpp"

namespace sptlab {

struct TwoStockInputs {
  double g1 = 0.0;
  double g2 = 0.0;
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
};

struct TwoStockSample {
  double x = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
};

struct TwoStockExtremum {
  double x = 0.0;
  double value = 0.0;  ///< growth at the growth max, variance at the variance min
};

struct TwoStockCurve {
  std::vector<TwoStockSample> samples;
  TwoStockExtremum growth_max;
  TwoStockExtremum variance_min;
  TwoStockExtremum sampled_growth_max;
  TwoStockExtremum sampled_variance_min;
};

inline double two_stock_variance(const TwoStockInputs& in, double x) {
  return x * x * in.s11 + (1.0 - x) * (1.0 - x) * in.s22 + 2.0 * x * (1.0 - x) * in.s12;
}

inline double two_stock_growth(const TwoStockInputs& in, double x) {
  const double d = in.s11 + in.s22 - 2.0 * in.s12;
  return x * in.g1 + (1.0 - x) * in.g2 + 0.5 * x * (1.0 - x) * d;
}

/// `steps` intervals on [x_lo, x_hi]; grid points are x_lo + (x_hi - x_lo) k / steps.
inline TwoStockCurve two_stock_curve(const TwoStockInputs& in, double x_lo, double x_hi,
                                     std::size_t steps) {
  const double d = in.s11 + in.s22 - 2.0 * in.s12;
  if (!(d > 0.0)) {
    throw Error(ErrorCode::DegenerateCovariance, "s11 + s22 - 2 s12 must be positive");
  }
  if (!(in.s11 > 0.0 && in.s22 > 0.0 && in.s11 * in.s22 > in.s12 * in.s12)) {
    throw Error(ErrorCode::NotPositiveDefinite, "two-stock covariance is not positive-definite");
  }
  if (steps == 0 || !(x_hi > x_lo)) {
    throw Error(ErrorCode::GridOutOfRange, "two-stock range must be non-empty with steps >= 1");
  }

  TwoStockCurve curve;
  const double xg = 0.5 + (in.g1 - in.g2) / d;
  const double xv = (in.s22 - in.s12) / d;
  curve.growth_max = {xg, two_stock_growth(in, xg)};
  curve.variance_min = {xv, two_stock_variance(in, xv)};

  curve.samples.reserve(steps + 1);
  const double width = x_hi - x_lo;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double x = x_lo + (width * static_cast<double>(k)) / static_cast<double>(steps);
    const double var = two_stock_variance(in, x);
    const double growth = two_stock_growth(in, x);
    curve.samples.push_back({x, std::sqrt(var), growth});
    if (k == 0 || growth > curve.sampled_growth_max.value) {
      curve.sampled_growth_max = {x, growth};
    }
    if (k == 0 || var < curve.sampled_variance_min.value) {
      curve.sampled_variance_min = {x, var};
    }
  }
  return curve;
}

}  // namespace sptlab
