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
 * @file ranks.hpp
 * @brief Capitalization ranks with lexicographic tie-breaking.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace sptlab {

/// Name indices ordered by descending value; equal values keep ascending index.
/// Element k of the result is the name holding rank k (0 = largest).
inline std::vector<std::size_t> rank_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  return order;
}

/**
 * Restore descending order of `order` in place after a small perturbation of
 * `values`. Insertion sort: near-linear when few ranks changed, which is the
 * common case between consecutive simulation steps.
 */
inline void rerank(std::span<const double> values, std::span<std::size_t> order) {
  auto before = [&](std::size_t i, std::size_t j) {
    return values[i] > values[j] || (values[i] == values[j] && i < j);
  };
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t name = order[k];
    std::size_t m = k;
    while (m > 0 && before(name, order[m - 1])) {
      order[m] = order[m - 1];
      --m;
    }
    order[m] = name;
  }
}

}  // namespace sptlab
