#include "gfbm/covariance.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/model.hpp"
#include "gfbm/table.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gfbm;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Admissible interior grid of n x n (alpha, gamma) pairs.
std::vector<std::pair<double, double>> admissible_grid(int n)
{
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < n; ++i) {
        const double g = 0.95 * i / (n - 1);
        const double lo = 0.5 * (g - 1.0), hi = 0.5 * (g + 1.0);
        for (int j = 0; j < n; ++j)
            out.emplace_back(lo + (hi - lo) * (j + 0.5) / n, g);
    }
    return out;
}

} // namespace

TEST(Kernel, Values)
{
    const GfbmParams bm = make_params(0.0, 0.0);
    EXPECT_EQ(kernel(bm, 1.0, 0.5).value, 1.0);
    EXPECT_EQ(kernel(bm, 1.0, 1.5).value, 0.0);
    EXPECT_EQ(kernel(bm, 1.0, -0.5).value, 0.0);

    const GfbmParams p = make_params(0.7, 0.5);
    const double s = 1.0 - 1e-6;
    const KernelEval k = kernel(p, 1.0, s);
    EXPECT_LT(rel(k.value, std::pow(1.0 - s, 0.7) * std::pow(s, -0.25)), 1e-12);
    EXPECT_NEAR(kernel(p, 1.0, -0.3).value, (std::pow(1.3, 0.7) - std::pow(0.3, 0.7)) * std::pow(0.3, -0.25), 1e-14);
    EXPECT_TRUE(kernel(p, 1.0, 0.0).singular);
    EXPECT_TRUE(kernel(p, 1.0, 1.0).singular);
    EXPECT_THROW(kernel(p, 0.0, 0.5), DomainError);
}

TEST(Kernel, DerivativeMatchesFiniteDifference)
{
    for (auto [a, g] : {std::pair{0.7, 0.5}, {0.2, 0.3}, {-0.2, 0.1}})
        for (double s : {-0.7, 0.2, 0.6}) {
            const GfbmParams p = make_params(a, g);
            const double t = 1.0, h = 1e-5;
            const double fd = (kernel(p, t + h, s).value - kernel(p, t - h, s).value) / (2.0 * h);
            EXPECT_LT(rel(kernel(p, t, s).derivative, fd), 1e-5) << a << " " << g << " " << s;
        }
}

TEST(Kernel, LemmaConstant)
{
    const GfbmParams p = make_params(0.7, 0.5);
    const double b = std::beta(0.5, 0.4) + std::beta(0.5, 0.1);
    EXPECT_LT(rel(lemma_constant(p, 1.0), 0.7 * std::sqrt(b)), 1e-13);
    EXPECT_LT(rel(lemma_constant(p, 2.0), 0.7 * std::pow(2.0, p.hurst - 1.0) * std::sqrt(b)), 1e-13);
    EXPECT_TRUE(std::isnan(lemma_constant(make_params(0.4, 0.3), 1.0)));
}

TEST(Kernel, NormalizedDerivativeHasUnitNorm)
{
    // int |dK_t/dt|^2 / C_t^2 = 1; the part within `cut` of t is added in closed form.
    const GfbmParams p = make_params(0.7, 0.5);
    for (double t : {0.5, 1.0, 2.0}) {
        const double cut = 1e-9 * t;
        const double a = p.alpha;
        const double near = a * a * std::pow(t, -p.gamma) * std::pow(cut, 2.0 * a - 1.0) / (2.0 * a - 1.0);
        const double total = kernel_derivative_sq_norm(p, t, cut, QuadratureSpec::tight()) + near;
        const double ct = lemma_constant(p, t);
        EXPECT_NEAR(total / (ct * ct), 1.0, 1e-6) << t;
    }
}

TEST(Kernel, DerivativeNormDivergesOutsideRegionI)
{
    const GfbmParams p = make_params(0.4, 0.3);
    double prev = kernel_derivative_sq_norm(p, 1.0, 1e-2);
    for (double cut : {1e-4, 1e-6, 1e-8}) {
        const double v = kernel_derivative_sq_norm(p, 1.0, cut);
        EXPECT_GT(v, 2.0 * prev);
        prev = v;
    }
}

TEST(Phi, SpotValues)
{
    const GfbmParams p = make_params(0.2, 0.3);
    EXPECT_EQ(phi(p, 0.7, 0.7), 0.0);
    for (double t : {0.3, 1.0, 4.0})
        EXPECT_LT(rel(phi(p, 0.0, t), std::pow(t, 2.0 * p.hurst)), 1e-9);
    EXPECT_GT(phi(p, 0.3, 0.31), 0.0);
}

TEST(Phi, GammaZeroIsStationary)
{
    // Normalized FBM: Phi(s,t) = |t-s|^{2H}.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0), al(-0.45, 0.45);
    for (int i = 0; i < 20; ++i) {
        const GfbmParams p = make_params(al(rng), 0.0);
        double s = u(rng), t = u(rng);
        if (s > t)
            std::swap(s, t);
        EXPECT_NEAR(phi(p, s, t), std::pow(t - s, 2.0 * p.hurst), 1e-7) << p.alpha << " " << s << " " << t;
    }
}

TEST(Psi, Properties)
{
    const GfbmParams p = make_params(0.2, 0.3);
    EXPECT_EQ(psi(p, 0.0, 0.8), 0.0);
    EXPECT_LT(rel(psi(p, 0.8, 0.8), std::pow(0.8, 2.0 * p.hurst)), 1e-9);
    EXPECT_EQ(psi(p, 0.3, 0.9), psi(p, 0.9, 0.3));
    for (auto [s, t] : {std::pair{0.1, 0.9}, {0.5, 0.51}, {0.02, 3.0}}) {
        const double polar = psi(p, t, t) + psi(p, s, s) - 2.0 * psi(p, s, t);
        EXPECT_NEAR(phi(p, s, t), polar, 1e-8);
    }
    EXPECT_THROW(psi(p, -0.1, 0.5), DomainError);
}

TEST(Psi, GammaZeroIsFbmCovariance)
{
    for (double a : {-0.3, 0.0, 0.25, 0.4}) {
        const GfbmParams p = make_params(a, 0.0);
        const double h2 = 2.0 * p.hurst;
        for (auto [s, t] : {std::pair{0.2, 0.7}, {0.5, 1.0}, {1.3, 2.0}}) {
            const double fbm = 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(t - s, h2));
            EXPECT_NEAR(psi(p, s, t), fbm, 1e-7);
        }
    }
}

TEST(Psi, NormalizationOnGrid)
{
    for (auto [a, g] : admissible_grid(10))
        EXPECT_NEAR(psi(make_params(a, g), 1.0, 1.0), 1.0, 1e-8) << a << " " << g;
}

TEST(Psi, SelfSimilarity)
{
    for (auto [a, g] : {std::pair{0.2, 0.3}, {0.7, 0.5}, {-0.1, 0.6}}) {
        const GfbmParams p = make_params(a, g);
        for (double k : {0.5, 2.0, 10.0}) {
            const double base = psi(p, 0.3, 0.8);
            EXPECT_LT(rel(psi(p, k * 0.3, k * 0.8), std::pow(k, 2.0 * p.hurst) * base), 1e-7);
        }
    }
}

TEST(Psi, PositiveSemidefinite)
{
    for (auto [a, g] : {std::pair{0.2, 0.3}, {-0.1, 0.6}, {0.7, 0.5}}) {
        const CovarianceTable table(make_params(a, g));
        const int n = 64;
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = table.psi((i + 1.0) / n, (j + 1.0) / n);
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
        EXPECT_GE(lmin, -1e-8 * m.trace());
    }
}

TEST(PsiRl, Values)
{
    const RlParams p = make_rl_params(0.3, 0.4);
    EXPECT_EQ(psi_rl(p, 0.0, 1.0), 0.0);
    EXPECT_LT(rel(psi_rl(p, 0.6, 0.6), std::pow(0.6, 2.0 * p.hurst)), 1e-10);

    // Midpoint Riemann sum of c^2 int_0^{1/2} (1-u)^a (1/2-u)^a du at gamma = 0.
    const RlParams q = make_rl_params(0.3, 0.0);
    const int n = 1000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = 0.5 * (i + 0.5) / n;
        sum += std::pow(1.0 - u, 0.3) * std::pow(0.5 - u, 0.3);
    }
    sum *= 0.5 / n * q.c_rl * q.c_rl;
    EXPECT_NEAR(psi_rl(q, 0.5, 1.0), sum, 1e-7);
}

TEST(KSecond, SymmetryAndFiniteDifference)
{
    const GfbmParams p = make_params(0.4, 0.3);
    EXPECT_EQ(k_second(p, 0.3, 0.8), k_second(p, 0.8, 0.3));
    for (auto [u, v] : {std::pair{0.3, 0.8}, {0.5, 1.2}, {1.0, 2.0}}) {
        const double h = 1e-4 * std::max({u, v, 1.0});
        const double fd = (psi(p, u + h, v + h) - psi(p, u + h, v - h) - psi(p, u - h, v + h) + psi(p, u - h, v - h)) /
                          (4.0 * h * h);
        EXPECT_LT(rel(k_second(p, u, v), fd), 1e-3) << u << " " << v;
    }
    EXPECT_THROW(k_second(p, 0.5, 0.5), DomainError);
}

TEST(KSecond, FbmClosedForm)
{
    // At gamma = 0 the normalized covariance gives K = H(2H-1)|u-v|^{2H-2}.
    const GfbmParams p = make_params(0.35, 0.0);
    const double h = p.hurst;
    for (auto [u, v] : {std::pair{0.2, 0.7}, {0.9, 1.0}})
        EXPECT_LT(rel(k_second(p, u, v), h * (2.0 * h - 1.0) * std::pow(v - u, 2.0 * h - 2.0)), 1e-8);
}

TEST(KSecond, SquareIntegrabilityTrend)
{
    // Off-diagonal midpoint sums of K^2 on [0,1]^2 under refinement.
    auto sums = [](double a, double g) {
        const CovarianceTable table(make_params(a, g));
        std::vector<double> out;
        for (int n : {16, 32, 64, 128}) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) {
                        const double k = table.k((i + 0.5) / n, (j + 0.5) / n);
                        s += k * k;
                    }
            out.push_back(s / (double(n) * n));
        }
        return out;
    };
    const auto conv = sums(0.4, 0.3);
    for (std::size_t i = 2; i < conv.size(); ++i)
        EXPECT_LT(std::abs(conv[i] - conv[i - 1]), std::abs(conv[i - 1] - conv[i - 2]));
    const auto div = sums(0.1, 0.5);
    for (std::size_t i = 1; i < div.size(); ++i)
        EXPECT_GT(div[i], 1.2 * div[i - 1]);
}

TEST(DpsiDt, FiniteDifference)
{
    const GfbmParams p = make_params(0.4, 0.3);
    for (auto [s, t] : {std::pair{0.3, 0.8}, {0.0, 1.0}, {0.5, 0.5}}) {
        const double h = 1e-5;
        const double fd = (psi(p, s, t + h) - psi(p, s, t - h)) / (2.0 * h);
        EXPECT_NEAR(dpsi_dt(p, s, t), fd, 1e-5 * std::max(1.0, std::abs(fd))) << s << " " << t;
    }
}

TEST(Table, MatchesDirect)
{
    const GfbmParams p = make_params(0.4, 0.3);
    const CovarianceTable table(p);
    for (auto [s, t] : {std::pair{0.1, 0.9}, {0.5, 0.5001}, {1e-5, 1.0}, {0.7, 3.0}}) {
        EXPECT_NEAR(table.psi(s, t), psi(p, s, t), 1e-11);
        EXPECT_NEAR(table.phi(s, t), phi(p, s, t), 1e-11);
        EXPECT_LT(rel(table.k(s, t), k_second(p, s, t)), 1e-9);
        EXPECT_NEAR(table.dpsi(s, t), dpsi_dt(p, s, t), 1e-10);
    }
}
