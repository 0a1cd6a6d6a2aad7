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
 * @file linalg.hpp
 * @brief Dense vector/matrix aliases and the SPD factorization used for every
 *        covariance solve.
 */
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sptlab/error.hpp"

namespace sptlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cholesky pivots smaller than this fraction of the largest diagonal entry
/// are treated as a degenerate covariance.
inline constexpr double kSpdPivotTolerance = 1e-12;

/// Relative symmetry tolerance for covariance inputs.
inline constexpr double kSymmetryTolerance = 1e-12;

inline Vector to_vector(std::span<const double> values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline std::vector<double> to_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

inline void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > kSymmetryTolerance * scale) {
        throw Error(ErrorCode::NotSymmetric, std::string(what) + " is not symmetric");
      }
    }
  }
}

/**
 * Cholesky factor of a symmetric positive-definite matrix.
 *
 * Construction fails with NotPositiveDefinite when the factorization breaks
 * down or when the smallest pivot L_ii^2 falls below
 * kSpdPivotTolerance * max(diag). The inverse is never formed.
 */
class SpdFactor {
 public:
  explicit SpdFactor(const Matrix& m) : llt_(m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "covariance must be a non-empty square matrix");
    }
    if (llt_.info() != Eigen::Success) {
      throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
    }
    const double max_diag = m.diagonal().maxCoeff();
    if (!(max_diag > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite, "covariance has no positive diagonal entry");
    }
    const Matrix l = llt_.matrixL();
    const double min_pivot = l.diagonal().array().square().minCoeff();
    if (!(min_pivot >= kSpdPivotTolerance * max_diag)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "smallest Cholesky pivot " + std::to_string(min_pivot) +
                      " is below tolerance");
    }
  }

  [[nodiscard]] Vector solve(const Vector& rhs) const {
    if (rhs.size() != size()) {
      throw Error(ErrorCode::DimensionMismatch, "right-hand side length does not match covariance");
    }
    return llt_.solve(rhs);
  }

  [[nodiscard]] Eigen::Index size() const noexcept { return llt_.matrixLLT().rows(); }

  /// Lower-triangular factor L with L L^T = covariance.
  [[nodiscard]] Matrix lower() const { return llt_.matrixL(); }

 private:
  Eigen::LLT<Matrix> llt_;
};

}  // namespace sptlab
