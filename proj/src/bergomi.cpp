#include "gfbm/bergomi.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/parallel.hpp"
#include "gfbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gfbm {

void BergomiParams::validate() const
{
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw DomainError("eta must be non-negative");
    if (!(xi0 > 0.0) || !std::isfinite(xi0))
        throw DomainError("xi0 must be positive");
    if (!(t >= 0.0) || !(T > t) || !std::isfinite(T))
        throw DomainError("Bergomi times must satisfy 0 <= t < T");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw DomainError("delta must be positive");
    if (!(rho > -1.0 && rho < 1.0))
        throw DomainError("rho must lie in (-1, 1)");
}

double f_alpha_gamma(const RlParams& p, double a, double b, const QuadratureSpec& spec)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("f_alpha_gamma requires a > 0");
    if (!(b >= 0.0) || !std::isfinite(b))
        throw DomainError("f_alpha_gamma requires b >= 0");
    const double e = p.alpha + 1.0, g = p.gamma;
    const double w0 = (b == 0.0) ? -g : 0.0;
    auto h = [&](double, double dl, double dr) {
        // dr = 1 - u
        const double d = std::pow(dr + a, e) - std::pow(dr, e);
        double v = d * d;
        if (g != 0.0)
            v *= (b == 0.0) ? 1.0 : std::pow(b + dl, -g);
        return v;
    };
    const auto br = b > 0.0 ? grade_toward_left(0.0, 1.0, b) : std::vector<double>{};
    const QuadResult q = integrate_weighted(h, 0.0, 1.0, w0, 0.0, spec, br);
    const double k = p.c_rl / e;
    return k * k * q.value / (a * a);
}

double vvix_approx(const RlParams& p, const BergomiParams& bp)
{
    bp.validate();
    const double tau = bp.T - bp.t;
    const double f = f_alpha_gamma(p, bp.delta / tau, bp.t / tau);
    return 0.25 * bp.eta * bp.eta * std::pow(tau, 2.0 * p.hurst) * f;
}

namespace {

// int_lo^hi (u-s)^pu (w-s)^pw s^{-g} ds for u, w >= hi > lo >= 0.
double volterra_integral(double u, double w, double lo, double hi, double pu, double pw, double g)
{
    if (!(hi > lo))
        return 0.0;
    const double gu = u - hi, gw = w - hi;
    const double pa = (lo == 0.0) ? -g : 0.0;
    const double pb = (gu == 0.0 ? pu : 0.0) + (gw == 0.0 ? pw : 0.0);
    auto h = [&](double s, double, double dr) {
        double v = 1.0;
        if (gu != 0.0)
            v *= std::pow(gu + dr, pu);
        if (gw != 0.0)
            v *= std::pow(gw + dr, pw);
        if (g != 0.0 && lo != 0.0)
            v *= std::pow(s, -g);
        return v;
    };
    double gap = std::numeric_limits<double>::infinity();
    if (gu > 0.0)
        gap = gu;
    if (gw > 0.0)
        gap = std::min(gap, gw);
    std::vector<double> br;
    if (std::isfinite(gap) && gap < hi - lo)
        br = grade_toward_right(lo, hi, gap);
    return integrate_weighted(h, lo, hi, pa, pb, QuadratureSpec::tight(), br).value;
}

} // namespace

double forward_compensator(const RlParams& p, const BergomiParams& bp, double u)
{
    bp.validate();
    if (!(u >= bp.T))
        throw DomainError("forward variance needs u >= T");
    return p.c_rl * p.c_rl * volterra_integral(u, u, bp.t, bp.T, p.alpha, p.alpha, p.gamma);
}

double forward_variance(const RlParams& p, const BergomiParams& bp, double u, double g)
{
    return bp.xi0 * std::exp(bp.eta * g - 0.5 * bp.eta * bp.eta * forward_compensator(p, bp, u));
}

TimeGrid bergomi_grid(const BergomiParams& bp, int n_forward)
{
    bp.validate();
    if (n_forward < 2)
        throw DomainError("need at least two forward points");
    const double h = bp.delta / (n_forward - 1);
    const double tau = bp.T - bp.t;
    const int n_before = std::max(1, static_cast<int>(std::lround(tau / h)));
    std::vector<double> pts;
    for (int k = 0; k < n_before; ++k)
        pts.push_back(tau * k / n_before);
    for (int k = 0; k < n_forward; ++k)
        pts.push_back(tau + bp.delta * k / (n_forward - 1));
    return TimeGrid::from_points(std::move(pts));
}

RBergomiResult rbergomi_mc(const RlParams& p, const BergomiParams& bp, const TimeGrid& grid, int n_paths,
                           std::uint64_t seed)
{
    bp.validate();
    grid.validate();
    if (n_paths < 2)
        throw DomainError("rbergomi_mc needs at least two paths");
    const double tau = bp.T - bp.t;
    const auto& pts = grid.points;
    if (std::abs(grid.horizon() - (tau + bp.delta)) > 1e-12 * (tau + bp.delta))
        throw DomainError("grid must span [t, T + delta]");
    const int n = grid.steps();
    std::vector<int> fwd;
    for (int k = 0; k <= n; ++k)
        if (pts[k] >= tau * (1.0 - 1e-14))
            fwd.push_back(k);
    if (fwd.size() < 32)
        throw DomainError("grid needs at least 32 points on [T, T + delta]");
    if (std::abs(pts[fwd.front()] - tau) > 1e-12 * tau)
        throw DomainError("grid must contain the maturity T");

    const double a = p.alpha, g = p.gamma, c = p.c_rl;
    const double t0 = bp.t, T = bp.T;
    auto abs_time = [&](int k) { return k == fwd.front() ? T : t0 + pts[k]; };
    // Layout: Z(u_k) for k = 1..n, G(u_j) for forward points, dB on each cell.
    const int nz = n, ng = static_cast<int>(fwd.size()), nb = n;
    const int dim = nz + ng + nb;
    auto cov_zz = [&](double u, double w) {
        const double m = std::min(u, w);
        return c * c * volterra_integral(u, w, t0, m, a, a, g);
    };
    auto cov_zg = [&](double u, double w) { // Z(u), G(w)
        return c * c * volterra_integral(u, w, t0, std::min(u, T), a, a, g);
    };
    auto cov_gg = [&](double u, double w) { return c * c * volterra_integral(u, w, t0, T, a, a, g); };
    // Cov(Z(u), B(hi) - B(lo)) = c int_{[lo,hi] cap [t,u]} (u-s)^alpha s^{-gamma/2} ds
    auto cov_zb = [&](double u, double lo, double hi, double top) {
        const double h2 = std::min(hi, top);
        if (!(h2 > lo))
            return 0.0;
        return c * volterra_integral(u, h2, lo, h2, a, 0.0, 0.5 * g);
    };
    auto f = GaussianFactor::factorize(dim, [&](Eigen::MatrixXd& m) {
        m.setZero(dim, dim);
        parallel_for(dim, [&](std::size_t ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j <= i; ++j) {
                double v = 0.0;
                if (i < nz) {
                    v = cov_zz(t0 + pts[i + 1], t0 + pts[j + 1]);
                } else if (i < nz + ng) {
                    const double ui = abs_time(fwd[i - nz]);
                    v = j < nz ? cov_zg(t0 + pts[j + 1], ui) : cov_gg(ui, abs_time(fwd[j - nz]));
                } else {
                    const int cell = i - nz - ng;
                    const double lo = t0 + pts[cell], hi = t0 + pts[cell + 1];
                    if (j < nz) {
                        const double u = t0 + pts[j + 1];
                        v = cov_zb(u, lo, hi, u);
                    } else if (j < nz + ng) {
                        v = cov_zb(abs_time(fwd[j - nz]), lo, hi, T);
                    } else {
                        v = (j == i) ? hi - lo : 0.0;
                    }
                }
                m(i, j) = m(j, i) = v;
            }
        });
    });
    const Eigen::MatrixXd x = f.sample(n_paths, seed, kStreamB);

    RBergomiResult r;
    r.grid = grid;
    r.jitter = f.jitter();
    for (int k : fwd)
        r.forward_times.push_back(abs_time(k));
    std::vector<double> var_z(n + 1, 0.0), comp(ng);
    for (int k = 1; k <= n; ++k)
        var_z[k] = cov_zz(t0 + pts[k], t0 + pts[k]);
    for (int j = 0; j < ng; ++j)
        comp[j] = cov_gg(r.forward_times[j], r.forward_times[j]);
    const double eta = bp.eta, rho = bp.rho, rho_perp = std::sqrt(1.0 - rho * rho);
    r.v.resize(n_paths, n + 1);
    r.forward.resize(n_paths, ng);
    r.log_price.resize(n_paths, n + 1);
    r.varsigma.resize(n_paths);
    parallel_for(n_paths, [&](std::size_t pp) {
        const int q = static_cast<int>(pp);
        auto rng = make_rng(seed, kStreamBPerp, q);
        std::normal_distribution<double> nd;
        r.v(q, 0) = bp.xi0;
        for (int k = 1; k <= n; ++k)
            r.v(q, k) = bp.xi0 * std::exp(eta * x(k - 1, q) - 0.5 * eta * eta * var_z[k]);
        for (int j = 0; j < ng; ++j)
            r.forward(q, j) = bp.xi0 * std::exp(eta * x(nz + j, q) - 0.5 * eta * eta * comp[j]);
        double s = 0.0;
        for (int j = 0; j + 1 < ng; ++j)
            s += 0.5 * (r.forward_times[j + 1] - r.forward_times[j]) * (r.forward(q, j) + r.forward(q, j + 1));
        r.varsigma[q] = s / bp.delta;
        r.log_price(q, 0) = 0.0;
        for (int k = 0; k < n; ++k) {
            const double dt = pts[k + 1] - pts[k];
            const double dw = rho * x(nz + ng + k, q) + rho_perp * std::sqrt(dt) * nd(rng);
            r.log_price(q, k + 1) = r.log_price(q, k) + std::sqrt(r.v(q, k)) * dw - 0.5 * r.v(q, k) * dt;
        }
    });
    double m = 0.0, ss = 0.0;
    for (double v : r.varsigma)
        m += 0.5 * std::log(v);
    m /= n_paths;
    for (double v : r.varsigma)
        ss += (0.5 * std::log(v) - m) * (0.5 * std::log(v) - m);
    r.var_log_sqrt_varsigma = ss / (n_paths - 1);
    return r;
}

namespace {

const double kTable1[6][2] = {{-0.45, 0.0}, {-0.4, 0.1}, {-0.325, 0.25}, {-0.2, 0.5}, {0.0, 0.9}, {0.03, 0.96}};

} // namespace

std::vector<Table1Row> table1(char side)
{
    if (side != 'a' && side != 'b')
        throw DomainError("table side must be 'a' or 'b'");
    BergomiParams bp;
    bp.t = side == 'a' ? 0.5 : 0.75;
    bp.T = 1.0;
    bp.delta = 1.0 / 12.0;
    bp.eta = 2.0;
    std::vector<Table1Row> rows(6);
    parallel_for(6, [&](std::size_t i) {
        const RlParams p = make_rl_params(kTable1[i][0], kTable1[i][1]);
        const double tau = bp.T - bp.t;
        rows[i] = {p.alpha, p.gamma, p.hurst, f_alpha_gamma(p, bp.delta / tau, bp.t / tau), vvix_approx(p, bp)};
    });
    return rows;
}

std::vector<double> table1b_reference_v()
{
    return {0.2100, 0.3421, 0.4227, 0.3520, 0.0625, 0.0237};
}

std::vector<SurfaceRow> vvix_surface(double hurst, const std::vector<double>& gammas, const std::vector<double>& ts,
                                     const std::vector<double>& Ts, const BergomiParams& base)
{
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("surface H must lie in (0, 1)");
    struct Job {
        double g, t, T;
    };
    std::vector<Job> jobs;
    for (double g : gammas)
        for (double t : ts)
            for (double T : Ts)
                if (T > t)
                    jobs.push_back({g, t, T});
    std::vector<SurfaceRow> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        const double a = 0.5 * j.g + hurst - 0.5;
        const RlParams p = make_rl_params(a, j.g);
        BergomiParams bp = base;
        bp.t = j.t;
        bp.T = j.T;
        rows[i] = {a, j.g, j.t, j.T, vvix_approx(p, bp)};
    });
    return rows;
}

} // namespace gfbm
