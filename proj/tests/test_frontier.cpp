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
#include <vector>

#include "sptlab/frontier.hpp"
#include "test_support.hpp"

namespace sptlab {
namespace {

using testing::diag2;
using testing::vec;

MarketParams two_stock_fixture() {
  return MarketParams::from_alpha(vec({0.1, 0.3}), diag2(1.0, 4.0));
}

TEST(MarketParams, RejectsAsymmetricAndIndefinite) {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  EXPECT_THROW(MarketParams::from_alpha(vec({0.1, 0.1}), asym), Error);

  Matrix singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  try {
    MarketParams::from_alpha(vec({0.1, 0.1}), singular);
    FAIL() << "singular covariance accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
  EXPECT_THROW(MarketParams::from_alpha(vec({0.1, 0.1}), Matrix::Zero(2, 2)), Error);
}

TEST(MarketParams, PivotToleranceIsRelativeToLargestDiagonal) {
  Matrix near(2, 2);
  near << 1.0, 1.0, 1.0, 1.0 + 1e-13;
  EXPECT_THROW(MarketParams::from_alpha(vec({0.0, 0.0}), near), Error);
  Matrix fine(2, 2);
  fine << 1.0, 1.0, 1.0, 1.0 + 1e-10;
  EXPECT_NO_THROW(MarketParams::from_alpha(vec({0.0, 0.0}), fine));
}

TEST(MarketParams, GrowthAndAlphaParameterizations) {
  const auto from_growth = MarketParams::from_growth(vec({-0.4, -1.7}), diag2(1.0, 4.0));
  EXPECT_NEAR(from_growth.alpha()[0], 0.1, 1e-15);
  EXPECT_NEAR(from_growth.alpha()[1], 0.3, 1e-15);

  EXPECT_NO_THROW(MarketParams::make(vec({0.1, 0.3}), vec({-0.4, -1.7}), diag2(1.0, 4.0),
                                     std::nullopt));
  try {
    MarketParams::make(vec({0.1, 0.3}), vec({-0.4, -1.6}), diag2(1.0, 4.0), std::nullopt);
    FAIL() << "inconsistent alpha/growth accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentParams);
  }
}

TEST(MarketParams, LoadingsReproduceCovariance) {
  Matrix xi(2, 3);
  xi << 1.0, 0.0, 0.0, 0.5, 1.0, 0.5;
  const Matrix sigma = xi * xi.transpose();
  EXPECT_NO_THROW(MarketParams::make(vec({0.1, 0.2}), std::nullopt, sigma, xi));
  EXPECT_NO_THROW(MarketParams::make(vec({0.1, 0.2}), std::nullopt, std::nullopt, xi));
  Matrix wrong = sigma;
  wrong(0, 0) += 1e-6;
  EXPECT_THROW(MarketParams::make(vec({0.1, 0.2}), std::nullopt, wrong, xi), Error);
  Matrix narrow(2, 1);
  narrow << 1.0, 1.0;
  EXPECT_THROW(MarketParams::make(vec({0.1, 0.2}), std::nullopt, diag2(1.0, 1.0), narrow), Error);
}

TEST(Portfolio, MustBeFullyFunded) {
  EXPECT_THROW(Portfolio(vec({0.5, 0.4})), Error);
  EXPECT_NO_THROW(Portfolio(vec({1.5, -0.5})));
}

TEST(BaseStats, TwoStockFixtureMatchesGridOracle) {
  const auto params = two_stock_fixture();
  const BaseStats st = base_stats(params);
  // Frozen from hand evaluation of the defining equations.
  EXPECT_NEAR(st.s * st.s, 0.8, 1e-14);
  EXPECT_NEAR(st.a, 0.14, 1e-14);
  EXPECT_NEAR(st.S * st.S, 0.808, 1e-14);

  const auto oracle = testing::two_asset_grid_search(params.alpha(), params.sigma(), -2.0, 3.0, 500000);
  EXPECT_NEAR(st.s * st.s, oracle.min_var, 1e-9);
  const double growth_max = st.a + 0.5 * st.S * st.S - st.s * st.s;
  EXPECT_NEAR(growth_max, oracle.max_growth, 1e-9);
}

TEST(BaseStats, SymmetricCaseHasSEqualToBigS) {
  const auto params = MarketParams::from_alpha(vec({0.5, 0.5}), Matrix::Identity(2, 2));
  const BaseStats st = base_stats(params);
  EXPECT_NEAR(st.s, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(st.a, 0.5, 1e-15);
  EXPECT_NEAR(st.S, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(BaseStats, VolatilityStabilizedInputs) {
  const Vector mu = vec({0.5, 0.3, 0.2});
  const Vector inv = mu.cwiseInverse();
  const auto params = MarketParams::from_alpha(0.5 * inv, Matrix(inv.asDiagonal()));
  const BaseStats st = base_stats(params);
  EXPECT_NEAR(st.s, 1.0, 1e-14);
  EXPECT_NEAR(st.a, 1.5, 1e-14);
  EXPECT_NEAR(st.S, 0.5 * std::sqrt((2.0 + 10.0 / 3.0 + 5.0) + 4.0 - 9.0),
              1e-13);
  EXPECT_NEAR(st.S, 1.1547005383792515, 1e-12);
}

TEST(BaseStats, LemmaBigSAtLeastSOverRandomInstances) {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> dim(2, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto params = testing::random_market(rng, dim(rng));
    const BaseStats st = base_stats(params);
    EXPECT_GE(st.S, st.s - 1e-12);
    // Literal route: alpha' Sigma^-1 alpha - a^2/s^2 + s^2.
    const Vector inv_alpha = params.factor().solve(params.alpha());
    const double literal = params.alpha().dot(inv_alpha) - st.a * st.a / (st.s * st.s) + st.s * st.s;
    EXPECT_NEAR(st.S * st.S, literal, 1e-9 * std::max(1.0, literal));
  }
}

TEST(Extremals, MinVolatilityPortfolio) {
  const auto params = two_stock_fixture();
  const Portfolio nu0 = min_volatility_portfolio(params);
  EXPECT_NEAR(nu0[0], 0.8, 1e-14);
  EXPECT_NEAR(nu0[1], 0.2, 1e-14);
  const auto oracle = testing::two_asset_grid_search(params.alpha(), params.sigma(), -2.0, 3.0, 500000);
  EXPECT_NEAR(nu0[0], oracle.x_min_var, 1e-5);

  const BaseStats st = base_stats(params);
  EXPECT_NEAR(portfolio_volatility(params, nu0), st.s, 1e-14);
  EXPECT_NEAR(portfolio_growth(params, nu0), st.a - 0.5 * st.s * st.s, 1e-14);
  EXPECT_NEAR(portfolio_growth(params, nu0), -0.26, 1e-14);

  const auto iso = MarketParams::from_alpha(vec({0.1, 0.2, 0.3, 0.4}), Matrix::Identity(4, 4));
  const Portfolio eq = min_volatility_portfolio(iso);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(eq[i], 0.25, 1e-15);
  }
}

TEST(Extremals, MaxGrowthPortfolio) {
  const auto params = two_stock_fixture();
  const Portfolio nu1 = max_growth_portfolio(params);
  EXPECT_NEAR(nu1[0], 0.76, 1e-14);
  EXPECT_NEAR(nu1[1], 0.24, 1e-14);
  const auto oracle = testing::two_asset_grid_search(params.alpha(), params.sigma(), -2.0, 3.0, 500000);
  EXPECT_NEAR(nu1[0], oracle.x_max_growth, 1e-5);

  const BaseStats st = base_stats(params);
  EXPECT_NEAR(portfolio_volatility(params, nu1), st.S, 1e-14);
  EXPECT_NEAR(portfolio_growth(params, nu1), st.a + 0.5 * st.S * st.S - st.s * st.s, 1e-14);
  EXPECT_NEAR(nu1.weights().sum(), 1.0, 1e-14);
}

TEST(Extremals, ProportionalAlphaMakesExtremalsCoincide) {
  std::mt19937_64 rng(7);
  const Matrix sigma = testing::random_spd(rng, 5);
  const auto params = MarketParams::from_alpha(Vector::Constant(5, 0.07), sigma);
  const Portfolio nu0 = min_volatility_portfolio(params);
  const Portfolio nu1 = max_growth_portfolio(params);
  EXPECT_LT((nu0.weights() - nu1.weights()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Extremals, SimpleAtlasRankCoordinates) {
  // alpha = g + sigma^2/2 with g = (-0.1, ..., -0.1, 0.4), sigma = 1.
  const auto params = MarketParams::from_growth(vec({-0.1, -0.1, -0.1, -0.1, 0.4}),
                                                Matrix::Identity(5, 5));
  const Portfolio nu1 = max_growth_portfolio(params);
  const Vector expected = vec({0.1, 0.1, 0.1, 0.1, 0.6});
  EXPECT_LT((nu1.weights() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Extremals, CovarianceOfExtremalsEqualsMinVariance) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(2, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto params = testing::random_market(rng, dim(rng));
    const Portfolio nu0 = min_volatility_portfolio(params);
    const Portfolio nu1 = max_growth_portfolio(params);
    const double s2 = std::pow(base_stats(params).s, 2);
    const double cross = nu0.weights().dot(params.sigma() * nu1.weights());
    const double self = nu0.weights().dot(params.sigma() * nu0.weights());
    EXPECT_LE(std::abs(cross - s2), 1e-10 * s2);
    EXPECT_LE(std::abs(self - s2), 1e-10 * s2);
  }
}

TEST(Frontier, PortfolioInterpolatesExtremals) {
  const auto params = two_stock_fixture();
  const auto mid = frontier_portfolio(params, 0.5);
  EXPECT_NEAR(mid.portfolio[0], 0.78, 1e-14);
  EXPECT_NEAR(mid.portfolio[1], 0.22, 1e-14);
  EXPECT_FALSE(mid.extrapolated);
  EXPECT_NEAR(portfolio_volatility(params, mid.portfolio), std::sqrt(0.802), 1e-14);
  EXPECT_NEAR(portfolio_growth(params, mid.portfolio), -0.257, 1e-14);

  const auto lo = frontier_portfolio(params, 0.0);
  const auto hi = frontier_portfolio(params, 1.0);
  EXPECT_EQ(lo.portfolio.weights(), min_volatility_portfolio(params).weights());
  EXPECT_EQ(hi.portfolio.weights(), max_growth_portfolio(params).weights());

  EXPECT_TRUE(frontier_portfolio(params, 1.5).extrapolated);
  EXPECT_TRUE(frontier_portfolio(params, -0.1).extrapolated);
}

TEST(Frontier, InterpolationAndClosedFormConsistencyOnRandomMarkets) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto params = testing::random_market(rng, dim(rng));
    const Vector nu0 = min_volatility_portfolio(params).weights();
    const Vector nu1 = max_growth_portfolio(params).weights();
    const BaseStats st = base_stats(params);
    const double p = unit(rng);
    const Portfolio pf = frontier_portfolio(params, p).portfolio;
    const Vector mixed = (1.0 - p) * nu0 + p * nu1;
    const double scale = std::max(1.0, mixed.cwiseAbs().maxCoeff());
    EXPECT_LT((pf.weights() - mixed).cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_NEAR(portfolio_volatility(params, pf), frontier_volatility(st, p), 1e-10 * scale * scale);
    EXPECT_NEAR(portfolio_growth(params, pf), frontier_growth(st, p), 1e-10 * scale * scale);
  }
}

TEST(Frontier, NoSameVariancePortfolioBeatsTheFrontier) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int instance = 0; instance < 5; ++instance) {
    const auto params = testing::random_market(rng, 3);
    const double p = unit(rng);
    const Vector nu = frontier_portfolio(params, p).portfolio.weights();
    const double var_p = nu.dot(params.sigma() * nu);
    const double growth_p = nu.dot(params.alpha()) - 0.5 * var_p;
    for (int k = 0; k < 10000; ++k) {
      Vector d = testing::random_vector(rng, 3, 1.0);
      d.array() -= d.mean();
      const double t = -2.0 * nu.dot(params.sigma() * d) / d.dot(params.sigma() * d);
      const Vector xi = nu + t * d;
      const double var_xi = xi.dot(params.sigma() * xi);
      ASSERT_LT(std::abs(std::sqrt(var_xi) - std::sqrt(var_p)), 1e-6);
      EXPECT_LE(xi.dot(params.alpha()) - 0.5 * var_xi, growth_p + 1e-8);
    }
  }
}

TEST(Frontier, ExcessGrowth) {
  const auto iso = MarketParams::from_alpha(Vector::Zero(5), 2.0 * Matrix::Identity(5, 5));
  EXPECT_NEAR(excess_growth(iso, Portfolio::equal(5)), 0.5 * 2.0 * (1.0 - 1.0 / 5.0), 1e-15);
  const auto unit = MarketParams::from_alpha(Vector::Zero(5), Matrix::Identity(5, 5));
  EXPECT_NEAR(excess_growth(unit, Portfolio::equal(5)), 0.4, 1e-15);
  EXPECT_EQ(excess_growth(unit, Portfolio::single(5, 3)), 0.0);

  const auto params = two_stock_fixture();
  const Portfolio e0 = Portfolio::single(2, 0);
  EXPECT_EQ(portfolio_volatility(params, e0), 1.0);
  EXPECT_NEAR(portfolio_growth(params, e0), params.growth()[0], 1e-15);
  // growth = pi' gamma + excess growth
  const Portfolio mid = frontier_portfolio(params, 0.3).portfolio;
  EXPECT_NEAR(portfolio_growth(params, mid),
              mid.weights().dot(params.growth()) + excess_growth(params, mid), 1e-14);

  try {
    excess_growth(params, Portfolio::equal(3));
    FAIL() << "dimension mismatch accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Frontier, CurveEndpointsAndMonotonicity) {
  const auto params = two_stock_fixture();
  const std::vector<double> ends{0.0, 1.0};
  const auto pts = frontier_curve(params, ends);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].sigma_p, std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(pts[0].gamma_p, -0.26, 1e-15);
  EXPECT_NEAR(pts[1].sigma_p, std::sqrt(0.808), 1e-15);
  EXPECT_NEAR(pts[1].gamma_p, -0.256, 1e-15);

  const auto grid = unit_grid(101);
  const auto curve = frontier_curve(params, grid);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    EXPECT_GE(curve[k].sigma_p, curve[k - 1].sigma_p);
    EXPECT_GE(curve[k].gamma_p, curve[k - 1].gamma_p);
  }

  const std::vector<double> bad{0.5, 1.2};
  try {
    frontier_curve(params, bad);
    FAIL() << "grid value outside [0,1] accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridOutOfRange);
  }
}

TEST(Frontier, DegenerateFrontierWhenAlphaProportionalToOnes) {
  std::mt19937_64 rng(5);
  const auto params = MarketParams::from_alpha(Vector::Constant(4, 0.2), testing::random_spd(rng, 4));
  const auto grid = unit_grid(11);
  const auto curve = frontier_curve(params, grid);
  for (const auto& pt : curve) {
    EXPECT_NEAR(pt.sigma_p, curve.front().sigma_p, 1e-12);
    EXPECT_NEAR(pt.gamma_p, curve.front().gamma_p, 1e-12);
  }
  for (double p : grid) {
    const auto sl = frontier_slopes(params, p);
    EXPECT_NEAR(sl.dsigma_dp, 0.0, 1e-12);
    EXPECT_NEAR(sl.dgamma_dp, 0.0, 1e-12);
  }
}

TEST(Frontier, SlopesAtEndpoints) {
  const auto params = two_stock_fixture();
  const auto at0 = frontier_slopes(params, 0.0);
  EXPECT_EQ(at0.dsigma_dp, 0.0);
  EXPECT_NEAR(at0.dgamma_dp, 0.008, 1e-14);
  const auto at1 = frontier_slopes(params, 1.0);
  EXPECT_NEAR(at1.dsigma_dp, 0.008 / std::sqrt(0.808), 1e-14);
  EXPECT_EQ(at1.dgamma_dp, 0.0);
}

TEST(Frontier, SlopesMatchCentralDifferences) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> dim(2, 8);
  std::uniform_real_distribution<double> interior(0.01, 0.99);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const auto params = testing::random_market(rng, dim(rng));
    const BaseStats st = base_stats(params);
    const double p = interior(rng);
    const auto sl = frontier_slopes(params, p);
    const double fd_sigma = (frontier_volatility(st, p + h) - frontier_volatility(st, p - h)) / (2 * h);
    const double fd_gamma = (frontier_growth(st, p + h) - frontier_growth(st, p - h)) / (2 * h);
    EXPECT_NEAR(sl.dsigma_dp, fd_sigma, 1e-6);
    EXPECT_NEAR(sl.dgamma_dp, fd_gamma, 1e-6);
  }
}

TEST(Theta, EndpointValues) {
  const auto params = two_stock_fixture();
  const BaseStats st = base_stats(params);
  const auto [lo, hi] = theta_range(st, 0.0);
  EXPECT_NEAR(theta_ratio(params, min_volatility_portfolio(params), 0.0), lo, 1e-14);
  EXPECT_NEAR(theta_ratio(params, max_growth_portfolio(params), 0.0), hi, 1e-14);
  EXPECT_NEAR(lo, -0.26 / std::sqrt(0.8), 1e-14);
  EXPECT_NEAR(hi, -0.256 / std::sqrt(0.808), 1e-14);
  EXPECT_NEAR(lo, -0.290689, 1e-6);
  EXPECT_NEAR(hi, -0.284797, 1e-6);
}

TEST(Theta, FrontierValuesStayWithinEndpointRange) {
  // The endpoint bracket holds whenever the benchmark rate is at least the
  // growth of the maximum-growth portfolio: theta is then increasing in p.
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> above(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto params = testing::random_market(rng, dim(rng));
    const BaseStats st = base_stats(params);
    const double b = frontier_growth(st, 1.0) + above(rng);
    const auto [lo, hi] = theta_range(st, b);
    double prev = -INFINITY;
    for (double p : unit_grid(21)) {
      const double th = (frontier_growth(st, p) - b) / frontier_volatility(st, p);
      EXPECT_GE(th, lo - 1e-10);
      EXPECT_LE(th, hi + 1e-10);
      EXPECT_GE(th, prev - 1e-12);
      prev = th;
    }
  }
}

TEST(Theta, LowBenchmarkHasInteriorTangencyMaximum) {
  // With b below the maximum growth rate theta peaks strictly inside the
  // frontier; the endpoints still bound it from below.
  const auto params = two_stock_fixture();
  const BaseStats st = base_stats(params);
  const double b = -1.0;
  const auto [lo, hi] = theta_range(st, b);
  double peak = -INFINITY;
  for (double p : unit_grid(101)) {
    const double th = (frontier_growth(st, p) - b) / frontier_volatility(st, p);
    EXPECT_GE(th, std::min(lo, hi) - 1e-10);
    peak = std::max(peak, th);
  }
  EXPECT_GT(peak, hi + 1e-3);
}

}  // namespace
}  // namespace sptlab
