#include "gfbm/errors.hpp"
#include "gfbm/girsanov.hpp"
#include "gfbm/market.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gfbm;

TEST(MarketParams, Theta)
{
    const MarketParams m = MarketParams::make(0.05, 0.2, 0.01, 1.0);
    EXPECT_EQ(m.theta, (0.05 - 0.01) / 0.2);
    EXPECT_THROW(MarketParams::make(0.05, 0.0, 0.01, 1.0), DomainError);
    EXPECT_THROW(MarketParams::make(0.05, 0.2, -0.01, 1.0), DomainError);
    EXPECT_THROW(MarketParams::make(0.05, 0.2, 0.01, 0.0), DomainError);
    MarketParams bad = m;
    bad.theta = 0.0;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(PricePath, ZeroPathAndDeterminism)
{
    const MarketParams m = MarketParams::make(0.07, 0.3, 0.0, 2.0);
    GaussianPath y;
    y.grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_grid(1.0, 4));
    y.values.assign(5, 0.0);
    const auto p = price_path(m, y);
    for (int k = 0; k <= 4; ++k)
        EXPECT_NEAR(p[k], 2.0 * std::exp((0.07 - 0.045) * 0.25 * k), 1e-15);

    const PathSet ys = sample_bm(*y.grid, 1, 8);
    EXPECT_EQ(price_path(m, ys.paths[0]), price_path(m, ys.paths[0]));
}

TEST(PricePath, LogNormalMoment)
{
    // alpha = gamma = 0: Var Y(T) = 2T, so E P(T) = p0 exp(mu T + sigma^2 T / 2).
    const MarketParams m = MarketParams::make(0.05, 0.3, 0.01, 1.0);
    const PathSet y = sample_mixed(make_params(0.0, 0.0), TimeGrid::uniform_grid(1.0, 8), 20000, 17);
    double s = 0.0, s2 = 0.0;
    for (const auto& p : y.paths) {
        const double v = price_path(m, p).back();
        s += v;
        s2 += v * v;
    }
    const double n = 20000.0, mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
    EXPECT_LT(std::abs(mean - std::exp(0.05 + 0.045)), 3.0 * se);
}

TEST(Martingale, PureBrownianBlackScholes)
{
    const MarketParams m = MarketParams::make(0.02, 0.25, 0.02, 1.0);
    const auto wh = wiener_hopf_from_function([](double, double) { return 0.0; }, 1.0);
    const TimeGrid g = TimeGrid::uniform_grid(1.0, 16);
    const InnovationOperator op(wh, g);
    const MartingaleReport r = martingale_check(m, op, sample_bm(g, 10000, 21));
    EXPECT_LT(r.deviation_se, 3.0);
    EXPECT_NEAR(r.mean_weight, 1.0, 1e-12);
    EXPECT_GT(r.call_estimate, 0.0);
    EXPECT_GT(r.call_std_error, 0.0);
}

TEST(Martingale, MixedGfbmThreeSeeds)
{
    const auto tab = std::make_shared<const CovarianceTable>(make_params(0.4, 0.3));
    const auto wh = solve_wiener_hopf(tab, 1.0, 64);
    const MarketParams m = MarketParams::make(0.05, 0.2, 0.01, 1.0);
    for (std::uint64_t seed : {31, 32, 33}) {
        const MartingaleReport r = martingale_check(m, *tab, wh, 64, 4000, seed);
        EXPECT_LT(r.deviation_se, 3.0) << seed;
        EXPECT_LT(std::abs(r.mean_weight - 1.0), 3.0 * r.weight_std_error) << seed;
        EXPECT_EQ(r.n_paths, 4000);
        EXPECT_EQ(r.seed, seed);
    }
}

TEST(Arbitrage, BachelierRegionII1)
{
    const ArbitrageReport r =
        arbitrage_demo(make_params(0.2, 0.3), TimeGrid::uniform_grid(1.0, 4096), 100, 41, PriceModel::Bachelier);
    ASSERT_EQ(r.paths.size(), 100u);
    EXPECT_EQ(r.paths[0].steps, (std::vector<int>{256, 1024, 4096}));
    EXPECT_GE(r.monotone_fraction, 0.9);
    EXPECT_LT(r.max_identity_error, 1e-12);
    EXPECT_TRUE(r.nonnegative);
    EXPECT_TRUE(r.terminal_positive);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Arbitrage, BlackScholesWithRate)
{
    const ArbitrageReport r = arbitrage_demo(make_params(0.2, 0.3), TimeGrid::uniform_grid(1.0, 1024), 30, 42,
                                             PriceModel::BlackScholes, 0.03);
    EXPECT_EQ(r.model, PriceModel::BlackScholes);
    EXPECT_LT(r.max_identity_error, 1e-10);
    EXPECT_TRUE(r.nonnegative);
    EXPECT_TRUE(r.terminal_positive);
    for (const auto& p : r.paths)
        EXPECT_GE(p.min_value, 0.0);
}

TEST(Arbitrage, ZeroPathAndRoughWarning)
{
    auto g = std::make_shared<const TimeGrid>(TimeGrid::uniform_grid(1.0, 64));
    PathSet x;
    GaussianPath z;
    z.grid = g;
    z.values.assign(65, 0.0);
    z.hurst = 0.75;
    x.paths.push_back(z);
    const ArbitrageReport r = arbitrage_demo(x, PriceModel::Bachelier);
    EXPECT_EQ(r.paths[0].terminal_value, 0.0);
    EXPECT_EQ(r.paths[0].min_value, 0.0);
    EXPECT_TRUE(r.terminal_positive);

    const ArbitrageReport rough =
        arbitrage_demo(make_params(0.1, 0.5), TimeGrid::uniform_grid(1.0, 64), 2, 43, PriceModel::Bachelier);
    EXPECT_FALSE(rough.warnings.empty());
    EXPECT_THROW(arbitrage_demo(make_params(0.2, 0.3), TimeGrid::uniform_grid(1.0, 100), 2, 1, PriceModel::Bachelier),
                 DomainError);
}
