#include "gfbm/bergomi.hpp"
#include "gfbm/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gfbm;

namespace {

template <class F>
double gk(F f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

} // namespace

TEST(Table1, SideAMatchesPublished)
{
    const double f_ref[] = {0.2413, 0.3930, 0.4856, 0.4043, 0.0718, 0.0272};
    const double v_ref[] = {0.2251, 0.3666, 0.4531, 0.3772, 0.0670, 0.0254};
    const auto rows = table1('a');
    ASSERT_EQ(rows.size(), 6u);
    for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(rows[i].hurst, 0.05, 1e-14);
        EXPECT_NEAR(rows[i].f / f_ref[i], 1.0, 0.01) << i;
        EXPECT_NEAR(rows[i].v / v_ref[i], 1.0, 0.01) << i;
    }
}

TEST(Table1, SideBFColumnAndRatio)
{
    const double f_ref[] = {0.1936, 0.3008, 0.3434, 0.2455, 0.0326, 0.0118};
    const auto rows = table1('b');
    for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(rows[i].f / f_ref[i], 1.0, 0.01) << i;
        EXPECT_NEAR(rows[i].v / rows[i].f, std::pow(0.25, 0.1), 1e-12);
    }
    EXPECT_EQ(table1b_reference_v().size(), 6u);
    EXPECT_THROW(table1('c'), DomainError);
}

TEST(FAlphaGamma, GammaZeroIndependentOfB)
{
    const RlParams p = make_rl_params(-0.3, 0.0);
    EXPECT_NEAR(f_alpha_gamma(p, 0.2, 0.5), f_alpha_gamma(p, 0.2, 3.0), 1e-10);
}

TEST(FAlphaGamma, GammaZeroEqualsRoughBergomiForm)
{
    for (double h : {0.05, 0.1, 0.3}) {
        const RlParams p = make_rl_params(h - 0.5, 0.0);
        const double dh = std::sqrt(2.0 * h) / (h + 0.5);
        for (double theta : {1.0 / 6.0, 0.5, 2.0}) {
            const double in = gk([&](double x) {
                const double d = std::pow(1.0 + theta - x, 0.5 + h) - std::pow(1.0 - x, 0.5 + h);
                return d * d;
            }, 0.0, 1.0);
            const double expect = dh * dh / (theta * theta) * in;
            EXPECT_NEAR(f_alpha_gamma(p, theta, 1.0), expect, 1e-9 * expect) << h << " " << theta;
        }
    }
}

TEST(FAlphaGamma, DecreasingInB)
{
    const RlParams p = make_rl_params(-0.2, 0.5);
    double prev = f_alpha_gamma(p, 1.0 / 6.0, 0.0);
    EXPECT_TRUE(std::isfinite(prev));
    for (double b = 0.25; b <= 4.0; b += 0.25) {
        const double f = f_alpha_gamma(p, 1.0 / 6.0, b);
        EXPECT_LT(f, prev) << b;
        prev = f;
    }
    EXPECT_THROW(f_alpha_gamma(p, 0.0, 1.0), DomainError);
    EXPECT_THROW(f_alpha_gamma(p, 0.1, -1.0), DomainError);
}

TEST(Vvix, RatioIdentityRandomTuples)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double g = 0.95 * u(rng);
        const double a = 0.5 * (g - 1.0) + 0.02 + (1.0 - 0.04) * u(rng);
        const RlParams p = make_rl_params(a, g);
        BergomiParams bp;
        bp.eta = 0.5 + 2.0 * u(rng);
        bp.t = 0.05 + 0.5 * u(rng);
        bp.T = bp.t + 0.1 + u(rng);
        bp.delta = 0.02 + 0.2 * u(rng);
        const double f = f_alpha_gamma(p, bp.delta / (bp.T - bp.t), bp.t / (bp.T - bp.t));
        const double expect = 0.25 * bp.eta * bp.eta * std::pow(bp.T - bp.t, 2.0 * p.hurst) * f;
        EXPECT_NEAR(vvix_approx(p, bp), expect, 1e-12 * expect);
    }
}

TEST(Vvix, VanishingGammaLimit)
{
    BergomiParams bp;
    auto v = [&](double g) { return vvix_approx(make_rl_params(g / 2.0 - 0.45, g), bp); };
    EXPECT_LT(v(0.999), 1e-2);
    EXPECT_LT(v(0.999), v(0.9));
    EXPECT_LT(v(0.9), v(0.5));
}

TEST(Vvix, Surface)
{
    BergomiParams bp;
    const auto rows = vvix_surface(0.1, {0.0, 0.5}, {0.25, 0.5}, {0.5, 1.0}, bp);
    // (t, T) pairs with T > t: (0.25, 0.5), (0.25, 1), (0.5, 1)
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& r : rows) {
        EXPECT_NEAR(r.alpha, r.gamma / 2.0 - 0.4, 1e-14);
        EXPECT_GT(r.T, r.t);
        BergomiParams q = bp;
        q.t = r.t;
        q.T = r.T;
        EXPECT_NEAR(r.v, vvix_approx(make_rl_params(r.alpha, r.gamma), q), 1e-14);
    }
}

TEST(ForwardVariance, CompensatorAndTrivialCases)
{
    const RlParams p = make_rl_params(-0.2, 0.5);
    BergomiParams bp;
    const double u = 1.04;
    const double expect =
        p.c_rl * p.c_rl * gk([&](double s) { return std::pow(u - s, 2.0 * p.alpha) * std::pow(s, -p.gamma); }, bp.t, bp.T);
    EXPECT_NEAR(forward_compensator(p, bp, u), expect, 1e-9 * expect);
    EXPECT_NEAR(forward_variance(p, bp, u, 0.0), bp.xi0 * std::exp(-0.5 * bp.eta * bp.eta * expect), 1e-12);
    bp.eta = 0.0;
    EXPECT_EQ(forward_variance(p, bp, u, 0.7), bp.xi0);
    EXPECT_THROW(forward_variance(p, bp, 0.9, 0.0), DomainError);
}

TEST(RBergomi, ZeroVolOfVol)
{
    const RlParams p = make_rl_params(-0.43, 0.04);
    BergomiParams bp;
    bp.eta = 0.0;
    const RBergomiResult r = rbergomi_mc(p, bp, bergomi_grid(bp), 50, 3);
    for (double s : r.varsigma)
        EXPECT_NEAR(s, bp.xi0, 1e-15);
    EXPECT_NEAR(r.var_log_sqrt_varsigma, 0.0, 1e-20);
}

TEST(RBergomi, PositivityTowerAndVvixBand)
{
    const RlParams p = make_rl_params(-0.43, 0.04);
    const BergomiParams bp;
    const TimeGrid g = bergomi_grid(bp, 32);
    const int n = 8000;
    const RBergomiResult r = rbergomi_mc(p, bp, g, n, 91);
    EXPECT_GT(r.v.minCoeff(), 0.0);
    EXPECT_GT(r.forward.minCoeff(), 0.0);

    const int last = g.steps();
    const int fcol = static_cast<int>(r.forward_times.size()) - 1;
    double mv = 0.0, mv2 = 0.0, mf = 0.0, mf2 = 0.0;
    for (int i = 0; i < n; ++i) {
        mv += r.v(i, last);
        mv2 += r.v(i, last) * r.v(i, last);
        mf += r.forward(i, fcol);
        mf2 += r.forward(i, fcol) * r.forward(i, fcol);
    }
    mv /= n;
    mf /= n;
    const double se_v = std::sqrt((mv2 / n - mv * mv) / (n - 1));
    const double se_f = std::sqrt((mf2 / n - mf * mf) / (n - 1));
    EXPECT_LT(std::abs(mv - bp.xi0), 3.0 * se_v);
    EXPECT_LT(std::abs(mv - mf), 3.0 * std::hypot(se_v, se_f));

    const double v = vvix_approx(p, bp);
    EXPECT_NEAR(r.var_log_sqrt_varsigma / v, 1.0, 0.25);
}

TEST(RBergomi, Validation)
{
    const RlParams p = make_rl_params(-0.43, 0.04);
    BergomiParams bp;
    EXPECT_THROW(rbergomi_mc(p, bp, TimeGrid::uniform_grid(0.2, 8), 10, 1), DomainError);
    bp.T = 0.4;
    EXPECT_THROW(bp.validate(), DomainError);
}
