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
 * @file error.hpp
 * @brief Error type shared by every sptlab module.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sptlab {

enum class ErrorCode {
  NotPositiveDefinite,
  NotSymmetric,
  InconsistentParams,
  DimensionMismatch,
  GridOutOfRange,
  ZeroVolatility,
  DegenerateCovariance,
  NonPositiveWeight,
  InvalidOffset,
  WrongDimension,
  TooShort,
  Unstable,
  NonPositiveInput,
  ConfigInvalid,
  WeightCollapse,
  MissingGapRecord,
  MissingSnapshots,
  ConfigParse,
  UnknownSuite,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::InconsistentParams: return "InconsistentParams";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GridOutOfRange: return "GridOutOfRange";
    case ErrorCode::ZeroVolatility: return "ZeroVolatility";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::InvalidOffset: return "InvalidOffset";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::WeightCollapse: return "WeightCollapse";
    case ErrorCode::MissingGapRecord: return "MissingGapRecord";
    case ErrorCode::MissingSnapshots: return "MissingSnapshots";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sptlab
