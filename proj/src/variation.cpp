#include "gfbm/variation.hpp"

#include "gfbm/covariance.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gfbm {

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    }
    return "unknown";
}

Regime classify_regime(double p, double hurst)
{
    const double ph = p * hurst;
    if (std::abs(ph - 1.0) <= 1e-12)
        return Regime::Critical;
    return ph < 1.0 ? Regime::Subcritical : Regime::Supercritical;
}

double rho(const GfbmParams& params)
{
    check_admissible(params.alpha, params.gamma);
    const double h = params.hurst;
    const double v = params.c * params.c * beta(1.0 + 2.0 * params.alpha, 1.0 - params.gamma);
    return std::pow(v, 1.0 / (2.0 * h)) * abs_normal_moment(1.0 / h);
}

VariationStat p_variation(const GaussianPath& path, double p, const GfbmParams& params)
{
    if (!(p > 0.0))
        throw DomainError("p must be positive");
    if (path.values.size() < 2 || !path.grid || path.grid->points.size() != path.values.size())
        throw DomainError("path needs at least two points on its grid");
    VariationStat st;
    st.p = p;
    st.partition_n = static_cast<int>(path.values.size()) - 1;
    double s = 0.0;
    for (std::size_t i = 1; i < path.values.size(); ++i)
        s += std::pow(std::abs(path.values[i] - path.values[i - 1]), p);
    st.value = s;
    st.regime = classify_regime(p, params.hurst);
    st.limit_rho = st.regime == Regime::Critical ? rho(params) * path.grid->horizon()
                                                 : std::numeric_limits<double>::quiet_NaN();
    return st;
}

double expected_p_variation(const CovarianceTable& table, const TimeGrid& grid, double p)
{
    double s = 0.0;
    for (int i = 0; i < grid.steps(); ++i)
        s += std::pow(table.phi(grid.points[i], grid.points[i + 1]), 0.5 * p);
    return abs_normal_moment(p) * s;
}

double increment_covariance(const GfbmParams& params, double u, double v, double e, const QuadratureSpec& spec)
{
    if (!(u >= 0.0) || !(v >= 0.0) || !(e > 0.0))
        throw DomainError("increment_covariance requires u, v >= 0 and e > 0");
    if (u == v)
        return phi(params, u, u + e, spec);
    return 0.5 * (phi(params, u, v + e, spec) + phi(params, u + e, v, spec) - phi(params, u, v, spec) -
                  phi(params, u + e, v + e, spec));
}

std::vector<SweepRow> variation_sweep(const GfbmParams& params, const std::vector<double>& p_list,
                                      const std::vector<int>& n_list, int n_paths, std::uint64_t seed,
                                      double horizon)
{
    if (p_list.empty() || n_list.empty())
        throw DomainError("variation_sweep needs non-empty p and n lists");
    for (double p : p_list)
        if (!(p > 0.0))
            throw DomainError("p must be positive");
    const int n_max = *std::max_element(n_list.begin(), n_list.end());
    for (int n : n_list)
        if (n < 1 || n_max % n != 0)
            throw DomainError("every n must divide the largest n");
    CovarianceTable table(params);
    const TimeGrid fine = TimeGrid::uniform_grid(horizon, n_max);
    const PathSet paths = sample_gfbm(table, fine, n_paths, seed);
    std::vector<SweepRow> rows;
    for (double p : p_list) {
        for (int n : n_list) {
            const int stride = n_max / n;
            double m = 0.0, m2 = 0.0;
            for (const auto& path : paths.paths) {
                double s = 0.0;
                for (int i = stride; i <= n_max; i += stride)
                    s += std::pow(std::abs(path.values[i] - path.values[i - stride]), p);
                m += s;
                m2 += s * s;
            }
            m /= n_paths;
            m2 /= n_paths;
            SweepRow r;
            r.p = p;
            r.n = n;
            r.mean = m;
            r.std_error = n_paths > 1 ? std::sqrt(std::max(m2 - m * m, 0.0) / (n_paths - 1)) : 0.0;
            r.expected = expected_p_variation(table, fine.subsample(stride), p);
            r.regime = classify_regime(p, params.hurst);
            rows.push_back(r);
        }
    }
    return rows;
}

} // namespace gfbm
