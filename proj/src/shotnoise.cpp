#include "gfbm/shotnoise.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/parallel.hpp"
#include "gfbm/quadrature.hpp"
#include "gfbm/rng.hpp"

#include <cmath>
#include <sstream>

namespace gfbm {

void ShotNoiseParams::validate() const
{
    if (!(rate > 0.0))
        throw DomainError("shot-noise rate must be positive");
    if (!(alpha > 0.0 && alpha < 0.5))
        throw DomainError("shot-noise alpha must lie in (0, 1/2)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError("shot-noise gamma must lie in (0, 1)");
    if (!(epsilon > 0.0))
        throw DomainError("shot-noise epsilon must be positive");
    if (!(window > 0.0))
        throw DomainError("shot-noise window must be positive");
    if (!(mark_scale >= 0.0))
        throw DomainError("shot-noise mark_scale must be non-negative");
}

double shot_noise_variance(const ShotNoiseParams& sn, double t)
{
    sn.validate();
    const GfbmParams p = make_params(sn.alpha, sn.gamma);
    return sn.rate * sn.mark_scale * sn.mark_scale * std::pow(t, 2.0 * sn.hurst()) / (sn.alpha * sn.alpha * p.c * p.c);
}

double shot_noise_truncation_fraction(const ShotNoiseParams& sn, double t)
{
    sn.validate();
    if (!(t > 0.0))
        return 0.0;
    const GfbmParams p = make_params(sn.alpha, sn.gamma);
    const double a = sn.alpha, g = sn.gamma;
    // c^2 int_k^inf ((1+x)^a - x^a)^2 x^{-g} dx with k = window / (t/epsilon), via x = k/w.
    const double k = sn.window * sn.epsilon / t;
    auto q = [a](double y) { return y < 1e-300 ? a : std::expm1(a * std::log1p(y)) / y; };
    const double v = integrate_weighted(
                         [&](double, double w, double) {
                             const double r = q(w / k);
                             return r * r;
                         },
                         0.0, 1.0, g - 2.0 * a, 0.0, QuadratureSpec{})
                         .value;
    return p.c * p.c * std::pow(k, 2.0 * a - g - 1.0) * v;
}

PathSet sample_shot_noise_prelimit(const ShotNoiseParams& sn, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    sn.validate();
    grid.validate();
    if (n_paths < 1)
        throw DomainError("n_paths must be at least 1");
    const double horizon = grid.horizon();
    if (horizon > sn.window * sn.epsilon)
        throw DomainError("shot-noise grid must lie within [0, window*epsilon]");
    auto g = std::make_shared<const TimeGrid>(grid);
    const double a = sn.alpha, gam = sn.gamma, eps = sn.epsilon;
    const double h = sn.hurst();
    const double lo = -sn.window, hi = horizon / eps;
    const std::size_t m = grid.points.size();
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i)
        u[i] = grid.points[i] / eps;
    const double scale = std::pow(eps, h);

    PathSet out;
    out.paths.resize(n_paths);
    parallel_for(n_paths, [&](std::size_t p) {
        auto rng = make_rng(seed, kStreamMarks, p);
        std::poisson_distribution<long> count(sn.rate * (hi - lo));
        std::uniform_real_distribution<double> where(lo, hi);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> v(m, 0.0);
        const long n = count(rng);
        for (long j = 0; j < n; ++j) {
            const double tau = where(rng);
            const double mark = sn.mark_scale * std::pow(std::abs(tau), -0.5 * gam) * z(rng);
            if (mark == 0.0)
                continue;
            const double base = tau < 0.0 ? std::pow(-tau, a) : 0.0;
            for (std::size_t i = 1; i < m; ++i) {
                if (u[i] <= tau)
                    continue;
                v[i] += (std::pow(u[i] - tau, a) - base) * mark;
            }
        }
        GaussianPath& path = out.paths[p];
        path.grid = g;
        path.seed = seed;
        path.index = p;
        path.label = PathLabel::ShotNoise;
        path.hurst = h;
        path.values.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            path.values[i] = scale * v[i] / a;
    });
    const double frac = shot_noise_truncation_fraction(sn, horizon);
    if (frac > 0.01) {
        std::ostringstream os;
        os << "arrival window truncation removes " << 100.0 * frac << "% of the variance at t = " << horizon;
        out.warnings.push_back(os.str());
    }
    return out;
}

} // namespace gfbm
