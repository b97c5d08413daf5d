#include "gfbm/market.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gfbm {

MarketParams MarketParams::make(double mu, double sigma, double r, double p0)
{
    MarketParams m;
    m.mu = mu;
    m.sigma = sigma;
    m.r = r;
    m.p0 = p0;
    m.theta = (mu - r) / sigma;
    m.validate();
    return m;
}

void MarketParams::validate() const
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("market volatility sigma must be positive");
    if (!(r >= 0.0) || !std::isfinite(r))
        throw DomainError("interest rate r must be non-negative");
    if (!(p0 > 0.0) || !std::isfinite(p0))
        throw DomainError("initial price p0 must be positive");
    if (!std::isfinite(mu))
        throw DomainError("drift mu must be finite");
    if (!(std::abs(theta - (mu - r) / sigma) <= 1e-12 * std::max(1.0, std::abs(theta))))
        throw DomainError("theta must equal (mu - r) / sigma");
}

std::vector<double> price_path(const MarketParams& mkt, const GaussianPath& y)
{
    const auto& t = y.grid->points;
    std::vector<double> p(y.values.size());
    const double drift = mkt.mu - 0.5 * mkt.sigma * mkt.sigma;
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = mkt.p0 * std::exp(drift * t[k] + mkt.sigma * y.values[k]);
    return p;
}

namespace {

struct Moments {
    double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    Moments m;
    const double n = static_cast<double>(v.size());
    for (double x : v)
        m.mean += x;
    m.mean /= n;
    double ss = 0.0;
    for (double x : v)
        ss += (x - m.mean) * (x - m.mean);
    m.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return m;
}

} // namespace

MartingaleReport martingale_check(const MarketParams& mkt, const InnovationOperator& op, const PathSet& y)
{
    mkt.validate();
    const int n = static_cast<int>(y.paths.size());
    if (n < 2)
        throw DomainError("martingale check needs at least two paths");
    const double horizon = op.grid().horizon();
    std::vector<double> disc(n), call(n), weight(n);
    parallel_for(n, [&](std::size_t k) {
        const GaussianPath& path = y.paths[k];
        const double lw = emm_density(op, path, mkt).log_density;
        if (lw > 700.0)
            throw NumericalError("density weight overflow");
        const double w = std::exp(lw);
        const double pt = price_path(mkt, path).back();
        const double df = std::exp(-mkt.r * horizon);
        weight[k] = w;
        disc[k] = w * df * pt;
        call[k] = w * df * std::max(pt - mkt.p0, 0.0);
    });
    MartingaleReport r;
    const Moments d = moments(disc), c = moments(call), w = moments(weight);
    r.estimate = d.mean;
    r.std_error = d.se;
    r.deviation_se = d.se > 0.0 ? std::abs(d.mean - mkt.p0) / d.se : 0.0;
    r.call_estimate = c.mean;
    r.call_std_error = c.se;
    r.mean_weight = w.mean;
    r.weight_std_error = w.se;
    r.horizon = horizon;
    r.n_paths = n;
    r.seed = y.paths.front().seed;
    r.market = mkt;
    return r;
}

MartingaleReport martingale_check(const MarketParams& mkt, const CovarianceTable& table, const WienerHopfGrid& wh,
                                  int n_steps, int n_paths, std::uint64_t seed)
{
    const TimeGrid grid = TimeGrid::uniform_grid(wh.horizon, n_steps);
    const InnovationOperator op(wh, grid);
    const PathSet y = sample_mixed(table, grid, n_paths, seed);
    MartingaleReport r = martingale_check(mkt, op, y);
    r.seed = seed;
    return r;
}

std::string to_string(PriceModel m)
{
    return m == PriceModel::Bachelier ? "bachelier" : "black_scholes";
}

namespace {

// Bachelier with P = 1 + X, zero rate: beta = -X^2 - 2X, gamma = 2X, V = X^2.
// Black-Scholes with P = exp(rt + X): beta = 1 - e^{2X}, gamma = 2(e^X - 1), V = e^{rt}(e^X - 1)^2.
struct Portfolio {
    PriceModel model;
    double r;

    double price(double t, double x) const { return model == PriceModel::Bachelier ? 1.0 + x : std::exp(r * t + x); }
    double bond(double t) const { return model == PriceModel::Bachelier ? 1.0 : std::exp(r * t); }
    double beta(double x) const { return model == PriceModel::Bachelier ? -x * x - 2.0 * x : 1.0 - std::exp(2.0 * x); }
    double gamma(double x) const { return model == PriceModel::Bachelier ? 2.0 * x : 2.0 * std::expm1(x); }
    double value(double t, double x) const
    {
        if (model == PriceModel::Bachelier)
            return x * x;
        const double e = std::expm1(x);
        return std::exp(r * t) * e * e;
    }
};

ArbitragePath run_path(const Portfolio& pf, const GaussianPath& x)
{
    const auto& t = x.grid->points;
    const auto& v = x.values;
    const int n = static_cast<int>(v.size()) - 1;
    ArbitragePath ap;
    ap.min_value = pf.value(t[0], v[0]);
    for (int k = 0; k <= n; ++k) {
        const double val = pf.value(t[k], v[k]);
        const double port = pf.beta(v[k]) * pf.bond(t[k]) + pf.gamma(v[k]) * pf.price(t[k], v[k]);
        ap.identity_error = std::max(ap.identity_error, std::abs(port - val));
        ap.min_value = std::min(ap.min_value, val);
    }
    ap.terminal_value = pf.value(t[n], v[n]);
    for (int stride : {16, 4, 1}) {
        double sum = 0.0;
        for (int k = 0; k + stride <= n; k += stride) {
            const int j = k + stride;
            sum += pf.beta(v[k]) * (pf.bond(t[j]) - pf.bond(t[k])) +
                   pf.gamma(v[k]) * (pf.price(t[j], v[j]) - pf.price(t[k], v[k]));
        }
        ap.steps.push_back(n / stride);
        ap.sum_error.push_back(std::abs(sum + pf.value(t[0], v[0]) - ap.terminal_value));
    }
    ap.monotone = ap.sum_error[0] > ap.sum_error[1] && ap.sum_error[1] > ap.sum_error[2];
    return ap;
}

} // namespace

ArbitrageReport arbitrage_demo(const PathSet& x, PriceModel model, double rate)
{
    if (x.paths.empty())
        throw DomainError("arbitrage demo needs at least one path");
    const int n = x.paths.front().grid->steps();
    if (n < 16 || n % 16 != 0)
        throw DomainError("arbitrage demo needs a grid whose step count is a multiple of 16");
    if (model == PriceModel::Bachelier && rate != 0.0)
        throw DomainError("the Bachelier demo uses a zero interest rate");
    ArbitrageReport rep;
    rep.model = model;
    rep.rate = rate;
    if (!(x.paths.front().hurst > 0.5))
        rep.warnings.push_back("H <= 1/2: Riemann-Stieltjes sums need not converge");
    const Portfolio pf{model, rate};
    rep.paths.resize(x.paths.size());
    parallel_for(x.paths.size(), [&](std::size_t k) { rep.paths[k] = run_path(pf, x.paths[k]); });
    int mono = 0;
    for (std::size_t k = 0; k < rep.paths.size(); ++k) {
        const ArbitragePath& ap = rep.paths[k];
        mono += ap.monotone ? 1 : 0;
        rep.max_identity_error = std::max(rep.max_identity_error, ap.identity_error);
        if (ap.min_value < 0.0)
            rep.nonnegative = false;
        if (x.paths[k].values.back() != 0.0 && !(ap.terminal_value > 0.0))
            rep.terminal_positive = false;
    }
    rep.monotone_fraction = static_cast<double>(mono) / rep.paths.size();
    return rep;
}

ArbitrageReport arbitrage_demo(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed,
                               PriceModel model, double rate)
{
    return arbitrage_demo(sample_gfbm(params, grid, n_paths, seed), model, rate);
}

} // namespace gfbm
