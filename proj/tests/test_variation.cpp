#include "gfbm/covariance.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/variation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gfbm;

namespace {

double gamma_moment(double p) { return std::sqrt(std::pow(2.0, p) / std::numbers::pi) * std::tgamma((1.0 + p) / 2.0); }

} // namespace

TEST(Rho, ClosedForms)
{
    EXPECT_NEAR(rho(make_params(0.0, 0.0)), 1.0, 1e-14);

    const GfbmParams p = make_params(0.7, 0.5);
    const double h = p.hurst;
    const double expect = std::pow(p.c * p.c * std::beta(2.4, 0.5), 1.0 / (2.0 * h)) * gamma_moment(1.0 / h);
    EXPECT_NEAR(rho(p), expect, 1e-12 * expect);

    for (double a : {-0.3, 0.1, 0.4}) {
        const GfbmParams q = make_params(a, 0.0);
        const double fbm = std::pow(q.c, 1.0 / q.hurst) * std::pow(1.0 + 2.0 * a, -1.0 / (2.0 * q.hurst)) *
                           gamma_moment(1.0 / q.hurst);
        EXPECT_NEAR(rho(q), fbm, 1e-12 * fbm);
    }
}

TEST(Rho, Continuous)
{
    for (auto [a, g] : {std::pair{0.2, 0.3}, {0.7, 0.5}, {-0.1, 0.4}}) {
        const double r0 = rho(make_params(a, g));
        const double r1 = rho(make_params(a + 1e-6, g));
        EXPECT_LT(std::abs(r1 - r0), 1e-3);
    }
}

TEST(Regime, Classification)
{
    EXPECT_EQ(classify_regime(2.0, 0.5), Regime::Critical);
    EXPECT_EQ(classify_regime(1.0, 0.75), Regime::Subcritical);
    EXPECT_EQ(classify_regime(2.0, 0.75), Regime::Supercritical);
    EXPECT_EQ(classify_regime(1.0 / 0.35, 0.35), Regime::Critical);
}

TEST(PVariation, ConstantPathAndValidation)
{
    auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_grid(1.0, 8));
    GaussianPath path;
    path.grid = grid;
    path.values.assign(9, 0.0);
    const GfbmParams p = make_params(0.2, 0.3);
    for (double q : {0.5, 1.0, 3.0})
        EXPECT_EQ(p_variation(path, q, p).value, 0.0);
    EXPECT_THROW(p_variation(path, 0.0, p), DomainError);
    const VariationStat crit = p_variation(path, 1.0 / p.hurst, p);
    EXPECT_EQ(crit.regime, Regime::Critical);
    EXPECT_NEAR(crit.limit_rho, rho(p), 1e-15);
    EXPECT_TRUE(std::isnan(p_variation(path, 1.0, p).limit_rho));
}

TEST(PVariation, BrownianQuadraticVariation)
{
    const PathSet ps = sample_bm(TimeGrid::uniform_grid(1.0, 1 << 14), 200, 5);
    const GfbmParams bm = make_params(0.0, 0.0);
    double m = 0.0;
    for (const auto& path : ps.paths)
        m += p_variation(path, 2.0, bm).value;
    m /= 200.0;
    EXPECT_NEAR(m, 1.0, 0.05);
}

TEST(ExpectedVariation, FbmScaling)
{
    // Normalized FBM increments: E sum |dX|^p = E|Z|^p n^{1 - pH} t^{pH}.
    const GfbmParams p = make_params(0.25, 0.0);
    const CovarianceTable table(p);
    for (double q : {1.0, 2.0, 1.0 / p.hurst}) {
        const double n = 64.0, t = 2.0;
        const double expect = gamma_moment(q) * std::pow(n, 1.0 - q * p.hurst) * std::pow(t, q * p.hurst);
        EXPECT_NEAR(expected_p_variation(table, TimeGrid::uniform_grid(t, 64), q), expect, 1e-7 * expect);
    }
}

TEST(Sweep, MeansMatchExactExpectation)
{
    for (auto [a, g] : {std::pair{0.4, 0.3}, {0.1, 0.5}}) {
        const GfbmParams p = make_params(a, g);
        const auto rows = variation_sweep(p, {1.2, 2.0, 1.0 / p.hurst}, {64, 256, 1024}, 200, 31);
        ASSERT_EQ(rows.size(), 9u);
        for (const auto& r : rows) {
            EXPECT_LT(std::abs(r.mean - r.expected), 4.0 * r.std_error) << a << " " << g << " p " << r.p << " n " << r.n;
            EXPECT_EQ(r.regime, classify_regime(r.p, p.hurst));
        }
    }
}

TEST(Sweep, MonotoneTrends)
{
    // H = 0.75: p = 2 > 1/H vanishes.
    const auto hi = variation_sweep(make_params(0.4, 0.3), {2.0}, {64, 256, 1024}, 200, 32);
    EXPECT_GT(hi[0].mean, hi[1].mean);
    EXPECT_GT(hi[1].mean, hi[2].mean);
    // H = 0.35 with gamma = 0.5: the local exponent is alpha + 1/2 = 0.6, so p = 1.2 < 1/0.6 diverges.
    const auto lo = variation_sweep(make_params(0.1, 0.5), {1.2}, {64, 256, 1024}, 200, 33);
    EXPECT_LT(lo[0].mean, lo[1].mean);
    EXPECT_LT(lo[1].mean, lo[2].mean);
    // At gamma = 0 the textbook trichotomy holds: p = 2 < 1/H grows, p = 1/H stays put.
    const GfbmParams f = make_params(-0.15, 0.0);
    const auto fb = variation_sweep(f, {2.0, 1.0 / f.hurst}, {64, 1024}, 200, 34);
    EXPECT_GT(fb[1].mean, 2.0 * fb[0].mean);
    EXPECT_NEAR(fb[3].mean / fb[2].mean, 1.0, 0.1);
    EXPECT_THROW(variation_sweep(f, {2.0}, {64, 100}, 10, 1), DomainError);
}

TEST(IncrementCovariance, DecorrelationOfDisjointIncrements)
{
    const GfbmParams p = make_params(0.2, 0.3);
    const double e = std::ldexp(1.0, -12);
    const double scale = std::pow(e, 2.0 * p.hurst);
    const double var_ratio = increment_covariance(p, 0.3, 0.3, e) / scale;
    const double cov_ratio = increment_covariance(p, 0.3, 0.7, e) / scale;
    EXPECT_GT(var_ratio, 0.0);
    EXPECT_LE(std::abs(cov_ratio), 0.1 * var_ratio);
}
