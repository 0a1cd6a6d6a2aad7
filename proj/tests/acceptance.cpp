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
// Acceptance runner: one line per criterion, exit status 0 iff all pass.
// Measured values for every check go to acceptance_report.csv in the
// working directory.
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "sptlab/verify.hpp"

int main(int argc, char** argv) {
  using namespace sptlab::verify;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : kDefaultSeed;

  std::vector<CriterionResult> results;
  auto report = [&](CriterionResult r) {
    std::string detail;
    for (const auto& row : r.rows) {
      if (!detail.empty()) detail += "; ";
      detail += row.check + "=" + sptlab::format_double(row.measured);
      if (row.stderr_ > 0.0) detail += " (se " + sptlab::format_double(row.stderr_) + ")";
      if (!row.pass) detail += " [tolerance " + sptlab::format_double(row.tolerance) + "]";
    }
    std::printf("[%s] criterion %d: %s | %s\n", r.passed() ? "PASS" : "FAIL", r.criterion, r.title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    results.push_back(std::move(r));
  };

  report(lemma_suite(seed));
  report(frontier_optimality(seed));
  report(two_stock_figure());
  report(vsm_closed_forms(seed));
  report(vsm_simulation(seed));
  const auto t0 = detail::Clock::now();
  const auto atlas = atlas_acceptance_run(seed, 1);
  report(atlas_asymptotics(atlas, detail::seconds_since(t0)));
  report(closed_form_agreement(seed));
  report(determinism(atlas, seed, 4));

  results_table("acceptance_report.csv", results).write(".");
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed() ? 1 : 0;
  std::printf("%zu/%zu criteria passed\n", passed, results.size());
  return passed == results.size() ? 0 : 1;
}
