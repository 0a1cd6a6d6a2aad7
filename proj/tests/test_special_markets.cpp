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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sptlab/frontier.hpp"
#include "sptlab/special_markets.hpp"
#include "test_support.hpp"

namespace sptlab {
namespace {

using testing::vec;

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

TEST(MarketWeights, Validation) {
  EXPECT_THROW(MarketWeights(vec({0.5, 0.5, 0.0})), Error);
  EXPECT_THROW(MarketWeights(vec({0.6, 0.5})), Error);
  EXPECT_THROW(MarketWeights(vec({1.0})), Error);
  try {
    MarketWeights(vec({1.2, -0.2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveWeight);
  }
}

TEST(Vsm, Params) {
  const auto eq = vsm_params(MarketWeights(vec({0.5, 0.5})));
  EXPECT_EQ(eq.sigma()(0, 0), 2.0);
  EXPECT_EQ(eq.sigma()(1, 1), 2.0);
  EXPECT_EQ(eq.sigma()(0, 1), 0.0);
  EXPECT_EQ(eq.alpha()[0], 1.0);

  const MarketWeights mu(vec({0.5, 0.3, 0.2}));
  const auto params = vsm_params(mu);
  EXPECT_NEAR(params.sigma()(1, 1), 10.0 / 3.0, 1e-14);
  EXPECT_NEAR(params.sigma()(2, 2), 5.0, 1e-14);
  EXPECT_NEAR(params.alpha()[1], 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(params.alpha()[2], 2.5, 1e-14);
  EXPECT_LT(max_abs_diff(min_volatility_portfolio(params).weights(), mu.values()), 1e-15);
}

TEST(Vsm, DMinusOne) {
  EXPECT_NEAR(d_minus_one(MarketWeights::equal(3)), 1.0 / 9.0, 1e-16);
  EXPECT_NEAR(d_minus_one(MarketWeights(vec({0.5, 0.3, 0.2}))), 3.0 / 31.0, 1e-16);
  EXPECT_NEAR(d_minus_one(MarketWeights::equal(2)), 0.25, 1e-16);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + trial % 8;
    const MarketWeights mu(testing::random_simplex(rng, n));
    EXPECT_LE(d_minus_one(mu), 1.0 / static_cast<double>(n * n) + 1e-14);
  }
}

TEST(Vsm, ExtremalsClosedForms) {
  const auto eq = vsm_extremals(MarketWeights::equal(3));
  EXPECT_LT(max_abs_diff(eq.nu1.weights(), eq.nu0.weights()), 1e-15);
  EXPECT_NEAR(eq.stats.s, 1.0, 1e-15);
  EXPECT_NEAR(eq.stats.S, 1.0, 1e-14);
  EXPECT_NEAR(eq.gamma0, 1.0, 1e-15);
  EXPECT_NEAR(eq.gamma1, 1.0, 1e-14);

  const auto ex = vsm_extremals(MarketWeights(vec({0.5, 0.3, 0.2})));
  EXPECT_LT(max_abs_diff(ex.nu1.weights(), vec({0.25, 0.35, 0.4})), 1e-15);
  EXPECT_NEAR(ex.stats.S, 1.1547005383792515, 1e-12);
  EXPECT_NEAR(ex.gamma1, 7.0 / 6.0, 1e-12);

  const auto two = vsm_extremals(MarketWeights::equal(2));
  EXPECT_LT(max_abs_diff(two.nu1.weights(), vec({0.5, 0.5})), 1e-15);
}

TEST(Vsm, ClosedFormsMatchGenericSolver) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 6;
    const MarketWeights mu(testing::random_simplex(rng, n));
    const auto closed = vsm_extremals(mu);
    const auto params = vsm_params(mu);
    const BaseStats st = base_stats(params);
    const Portfolio nu0 = min_volatility_portfolio(params);
    const Portfolio nu1 = max_growth_portfolio(params);
    EXPECT_LT(max_abs_diff(closed.nu0.weights(), nu0.weights()), 1e-10);
    EXPECT_LT(max_abs_diff(closed.nu1.weights(), nu1.weights()), 1e-10);
    EXPECT_NEAR(closed.stats.s, st.s, 1e-10);
    EXPECT_NEAR(closed.stats.a, st.a, 1e-10);
    EXPECT_NEAR(closed.stats.S, st.S, 1e-10);
    EXPECT_NEAR(closed.gamma0, portfolio_growth(params, nu0), 1e-10);
    EXPECT_NEAR(closed.gamma1, portfolio_growth(params, nu1), 1e-10);
  }
}

TEST(Entropy, FixtureValues) {
  const MarketWeights mu(vec({0.5, 0.3, 0.2}));
  const auto ent = entropy_weighted_portfolio(mu);
  // Frozen from direct numerical evaluation of zeta, zeta' Sigma zeta and growth.
  EXPECT_LT(max_abs_diff(ent.weights.weights(), vec({0.33659261, 0.35078986, 0.31261753})), 5e-9);
  EXPECT_NEAR(ent.variance, 1.125416195419864, 1e-12);
  EXPECT_NEAR(ent.growth, 1.1400781076534563, 1e-12);

  const auto params = vsm_params(mu);
  EXPECT_NEAR(ent.variance, portfolio_variance(params, ent.weights), 1e-12);
  EXPECT_NEAR(ent.growth, portfolio_growth(params, ent.weights), 1e-12);
  // growth = zeta' gamma + excess growth with gamma = 0 in the log-driftless model
  EXPECT_NEAR(ent.growth, excess_growth(params, ent.weights), 1e-12);

  const auto eq = entropy_weighted_portfolio(MarketWeights::equal(3));
  EXPECT_LT(max_abs_diff(eq.weights.weights(), Vector::Constant(3, 1.0 / 3.0)), 1e-15);
}

TEST(Entropy, OffsetValidation) {
  const MarketWeights mu(vec({0.5, 0.3, 0.2}));
  try {
    entropy_weighted_portfolio(mu, std::log(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidOffset);
  }
  EXPECT_NO_THROW(entropy_weighted_portfolio(mu, std::log(0.5) + 1e-9));
}

TEST(Entropy, PositiveWeightsAndGenericAgreementOnRandomMarkets) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> offset(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const MarketWeights mu(testing::random_simplex(rng, n));
    const double c = offset(rng);
    const auto ent = entropy_weighted_portfolio(mu, c);
    EXPECT_GT(ent.weights.weights().minCoeff(), 0.0);
    const auto params = vsm_params(mu);
    EXPECT_NEAR(ent.variance, portfolio_variance(params, ent.weights), 1e-10);
    EXPECT_NEAR(ent.growth, portfolio_growth(params, ent.weights), 1e-10);
  }
}

TEST(VsmN3, FrontierFixtures) {
  const auto grid = unit_grid(11);
  const auto eq = vsm_n3_frontier(MarketWeights::equal(3), grid);
  for (const auto& pt : eq) {
    EXPECT_NEAR(pt.sigma_p, 1.0, 1e-14);
    EXPECT_NEAR(pt.gamma_p, 1.0, 1e-14);
  }
  const MarketWeights mu(vec({0.5, 0.3, 0.2}));
  const auto curve = vsm_n3_frontier(mu, grid);
  EXPECT_NEAR(curve.front().sigma_p, 1.0, 1e-14);
  EXPECT_NEAR(curve.front().gamma_p, 1.0, 1e-14);
  EXPECT_NEAR(curve.back().sigma_p, 1.1547005383792515, 1e-12);
  EXPECT_NEAR(curve.back().gamma_p, 7.0 / 6.0, 1e-12);

  const auto generic = frontier_curve(vsm_params(mu), grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(curve[k].sigma_p, generic[k].sigma_p);
    EXPECT_EQ(curve[k].gamma_p, generic[k].gamma_p);
    // gamma component of the displayed n = 3 expression
    const double p = grid[k];
    const double inv_d = 1.0 / d_minus_one(mu);
    EXPECT_NEAR(curve[k].gamma_p, 1.0 + (0.5 * p * p - p) * (9.0 - inv_d) / 4.0, 1e-12);
  }
  EXPECT_THROW(vsm_n3_frontier(MarketWeights::equal(4), grid), Error);
}

TEST(VsmN3, FrontierPortfoliosAreLongOnly) {
  std::mt19937_64 rng(24);
  const auto grid = unit_grid(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const MarketWeights mu(testing::random_simplex(rng, 3));
    const auto params = vsm_params(mu);
    for (double p : grid) {
      EXPECT_GE(frontier_portfolio(params, p).portfolio.weights().minCoeff(), -1e-12);
    }
  }
}

TEST(SimpleAtlas, Params) {
  const auto rp = simple_atlas_params(SimpleAtlasSpec(5, 0.1, 1.0));
  EXPECT_LT(max_abs_diff(rp.rank_growth, vec({-0.1, -0.1, -0.1, -0.1, 0.4})), 1e-16);
  EXPECT_NEAR(rp.rank_growth.sum(), 0.0, 1e-15);
  EXPECT_EQ(rp.rank_cov, Matrix::Identity(5, 5));
  const auto two = simple_atlas_params(SimpleAtlasSpec(2, 1.0, 0.5));
  EXPECT_LT(max_abs_diff(two.rank_growth, vec({-1.0, 1.0})), 1e-16);
  EXPECT_EQ(two.rank_cov(0, 0), 0.25);
  EXPECT_THROW(SimpleAtlasSpec(1, 0.1, 1.0), Error);
  EXPECT_THROW(SimpleAtlasSpec(3, 0.0, 1.0), Error);
  EXPECT_THROW(SimpleAtlasSpec(3, 0.1, -1.0), Error);
}

TEST(SimpleAtlas, Extremals) {
  const auto ex = simple_atlas_extremals(SimpleAtlasSpec(5, 0.1, 1.0));
  EXPECT_LT(max_abs_diff(ex.nu0.weights(), Vector::Constant(5, 0.2)), 1e-16);
  EXPECT_LT(max_abs_diff(ex.nu1.weights(), vec({0.1, 0.1, 0.1, 0.1, 0.6})), 1e-15);
  EXPECT_NEAR(ex.stats.S, std::sqrt(0.4), 1e-15);
  EXPECT_NEAR(ex.gamma1, 0.5, 1e-15);
  EXPECT_NEAR(ex.gamma0, 0.4, 1e-15);
  EXPECT_TRUE(ex.all_long);

  const auto edge = simple_atlas_extremals(SimpleAtlasSpec(4, 0.25, 1.0));
  EXPECT_LT(max_abs_diff(edge.nu1.weights(), vec({0.0, 0.0, 0.0, 1.0})), 1e-15);
  EXPECT_TRUE(edge.all_long);
  EXPECT_FALSE(simple_atlas_extremals(SimpleAtlasSpec(4, 0.3, 1.0)).all_long);

  const auto tiny = simple_atlas_extremals(SimpleAtlasSpec(5, 1e-14, 1.0));
  EXPECT_LT(max_abs_diff(tiny.nu1.weights(), tiny.nu0.weights()), 1e-12);
}

TEST(SimpleAtlas, ClosedFormsMatchGenericSolver) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> g(0.01, 1.0);
  std::uniform_real_distribution<double> vol(0.2, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const SimpleAtlasSpec spec(2 + trial % 9, g(rng), vol(rng));
    const auto ex = simple_atlas_extremals(spec);
    const auto rp = simple_atlas_params(spec);
    const auto params = MarketParams::from_growth(rp.rank_growth, rp.rank_cov);
    const BaseStats st = base_stats(params);
    EXPECT_LT(max_abs_diff(ex.nu0.weights(), min_volatility_portfolio(params).weights()), 1e-10);
    EXPECT_LT(max_abs_diff(ex.nu1.weights(), max_growth_portfolio(params).weights()), 1e-10);
    EXPECT_NEAR(ex.stats.s, st.s, 1e-10);
    EXPECT_NEAR(ex.stats.S, st.S, 1e-10);
    EXPECT_NEAR(ex.gamma0, portfolio_growth(params, ex.nu0), 1e-10);
    EXPECT_NEAR(ex.gamma1, portfolio_growth(params, ex.nu1), 1e-10);
  }
}

TEST(Diversity, FixturesAndLimits) {
  const SimpleAtlasSpec spec(5, 0.1, 1.0);
  for (double p : {0.0, 0.3, 1.0}) {
    const auto eq = diversity_weighted_portfolio(MarketWeights::equal(5), p, spec);
    EXPECT_LT(max_abs_diff(eq.weights.weights(), Vector::Constant(5, 0.2)), 1e-15);
    EXPECT_NEAR(eq.variance, 0.2, 1e-15);
    EXPECT_NEAR(eq.growth, 0.4, 1e-15);
  }
  const MarketWeights mu(vec({0.4, 0.25, 0.2, 0.1, 0.05}));
  EXPECT_LT(max_abs_diff(diversity_weighted_portfolio(mu, 1.0, spec).weights.weights(), mu.values()),
            1e-15);
  EXPECT_LT(max_abs_diff(diversity_weighted_portfolio(mu, 0.0, spec).weights.weights(),
                         Vector::Constant(5, 0.2)),
            1e-15);
  EXPECT_THROW(diversity_weighted_portfolio(mu, 1.5, spec), Error);
}

TEST(Diversity, MatchesGenericRankEvaluation) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const SimpleAtlasSpec spec(n, 0.05 + unit(rng), 0.3 + unit(rng));
    const MarketWeights mu(testing::random_simplex(rng, n));
    const double p = unit(rng);
    const auto div = diversity_weighted_portfolio(mu, p, spec);
    const Vector& w = div.weights.weights();
    EXPECT_NEAR(div.variance, spec.sigma() * spec.sigma() * w.squaredNorm(), 1e-12);

    // Generic: rank-coordinate market with weights arranged by descending mu.
    const auto rp = simple_atlas_params(spec);
    const auto params = MarketParams::from_growth(rp.rank_growth, rp.rank_cov);
    std::vector<double> m(mu.values().data(), mu.values().data() + n);
    const auto order = rank_order(m);
    Vector ranked(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      ranked[k] = w[static_cast<Eigen::Index>(order[static_cast<std::size_t>(k)])];
    }
    const Portfolio by_rank(ranked);
    EXPECT_NEAR(div.variance, portfolio_variance(params, by_rank), 1e-10);
    EXPECT_NEAR(div.growth, portfolio_growth(params, by_rank), 1e-10);
  }
}

}  // namespace
}  // namespace sptlab
