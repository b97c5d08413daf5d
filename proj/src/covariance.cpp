#include "gfbm/covariance.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/specialfn.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace gfbm {

namespace {

double quad(const WeightedIntegrand& h, double a, double b, double pa, double pb, const QuadratureSpec& spec,
            const std::vector<double>& breaks = {})
{
    return integrate_weighted(h, a, b, pa, pb, spec, breaks).value;
}

// (x+u)^a - u^a for x, u > 0 without cancellation.
double pow_diff(double a, double x, double u)
{
    return std::pow(u, a) * std::expm1(a * std::log1p(x / u));
}

// ((1+w)^a - 1)/w, finite at w -> 0.
double expm1_ratio(double a, double w)
{
    if (w < 1e-300)
        return a;
    return std::expm1(a * std::log1p(w)) / w;
}

void check_unit(double r, double d)
{
    if (!(r >= 0.0) || !(d >= 0.0) || r > 1.0 || d > 1.0)
        throw DomainError("unit-time argument r must lie in [0, 1]");
}

// int_0^r (1-u)^a (r-u)^b u^{-g} du, with both endpoint singularities and the near singularity at 1.
double one_sided(double a, double b, double g, double r, double d, const QuadratureSpec& spec)
{
    if (r == 0.0)
        return 0.0;
    if (d == 0.0)
        return quad([](double, double, double) { return 1.0; }, 0.0, 1.0, -g, a + b, spec);
    const double m = 0.5 * r;
    double s = quad([a, b, r](double u, double, double) { return std::pow(1.0 - u, a) * std::pow(r - u, b); }, 0.0,
                    m, -g, 0.0, spec);
    s += quad([a, g, d](double u, double, double dr) { return std::pow(d + dr, a) * std::pow(u, -g); }, m, r, 0.0, b,
              spec, grade_toward_right(m, r, d));
    return s;
}

// int_0^inf ((1+u)^a - u^a)((r+u)^a - u^a) u^{-g} du
double two_sided_psi(double a, double g, double r, const QuadratureSpec& spec)
{
    if (a == 0.0 || r == 0.0)
        return 0.0;
    double s = quad([a, r](double u, double, double) { return std::pow(1.0 + u, a) * std::pow(r + u, a); }, 0.0, r,
                    -g, 0.0, spec);
    s -= quad([a, r](double u, double, double) { return std::pow(1.0 + u, a) + std::pow(r + u, a); }, 0.0, r, a - g,
              0.0, spec);
    const double e = 2.0 * a - g + 1.0;
    s += std::pow(r, e) / e;
    if (r < 1.0)
        s += quad([a, g, r](double u, double, double) { return pow_diff(a, 1.0, u) * pow_diff(a, r, u) * std::pow(u, -g); },
                  r, 1.0, 0.0, 0.0, spec, grade_toward_left(r, 1.0, r));
    s += quad([a, r](double, double w, double) { return expm1_ratio(a, w) * expm1_ratio(a, r * w) * r; }, 0.0, 1.0,
              g - 2.0 * a, 0.0, spec);
    return s;
}

} // namespace

KernelEval kernel(const GfbmParams& p, double t, double s)
{
    if (!(t > 0.0))
        throw DomainError("kernel requires t > 0");
    KernelEval k;
    k.t = t;
    k.s = s;
    k.singular = (s == 0.0 || s == t);
    const double a = p.alpha, g = p.gamma;
    const double w = s == 0.0 ? (g == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : std::pow(std::abs(s), -0.5 * g);
    if (s < t) {
        const double first = std::pow(t - s, a);
        const double second = s < 0.0 ? std::pow(-s, a) : 0.0;
        k.value = s < 0.0 ? pow_diff(a, t, -s) * w : (first - second) * w;
        k.derivative = a == 0.0 ? 0.0 : a * std::pow(t - s, a - 1.0) * w;
    }
    k.c_t = lemma_constant(p, t);
    return k;
}

double lemma_constant(const GfbmParams& p, double t)
{
    const double a = p.alpha, g = p.gamma;
    if (!(a > 0.5 && g > 0.0 && 1.0 - 2.0 * a + g > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return a * std::pow(t, p.hurst - 1.0) * std::sqrt(beta(1.0 - g, 2.0 * a - 1.0) + beta(1.0 - g, 1.0 - 2.0 * a + g));
}

double kernel_derivative_sq_norm(const GfbmParams& p, double t, double cutoff, const QuadratureSpec& spec)
{
    if (!(t > 0.0) || !(cutoff > 0.0) || cutoff >= t)
        throw DomainError("kernel_derivative_sq_norm requires 0 < cutoff < t");
    const double a = p.alpha, g = p.gamma;
    if (a == 0.0)
        return 0.0;
    const double e = 2.0 * a - 2.0;
    // (0, t - cutoff)
    double s = quad([e, t](double u, double, double) { return std::pow(t - u, e); }, 0.0, t - cutoff, -g, 0.0, spec,
                    grade_toward_right(0.0, t - cutoff, cutoff));
    // (-inf, 0): u = -s, then u = t/w on (t, inf)
    s += quad([e, t](double u, double, double) { return std::pow(t + u, e); }, 0.0, t, -g, 0.0, spec);
    const double tail_pow = g - e - 2.0;
    if (tail_pow <= -1.0)
        return std::numeric_limits<double>::infinity();
    s += std::pow(t, e - g + 1.0) *
         quad([e](double, double w, double) { return std::pow(1.0 + w, e); }, 0.0, 1.0, tail_pow, 0.0, spec);
    return a * a * s;
}

double unit_psi_rl(const RlParams& p, double r, double d, const QuadratureSpec& spec)
{
    check_unit(r, d);
    return p.c_rl * p.c_rl * one_sided(p.alpha, p.alpha, p.gamma, r, d, spec);
}

double unit_psi(const GfbmParams& p, double r, double d, const QuadratureSpec& spec)
{
    check_unit(r, d);
    const double a = p.alpha, g = p.gamma;
    return p.c * p.c * (one_sided(a, a, g, r, d, spec) + two_sided_psi(a, g, r, spec));
}

double unit_phi(const GfbmParams& p, double r, double d, const QuadratureSpec& spec)
{
    check_unit(r, d);
    if (d == 0.0)
        return 0.0;
    if (r == 0.0)
        return 1.0;
    const double a = p.alpha, g = p.gamma;
    // int_r^1 (1-u)^{2a} u^{-g} du
    double s = r < 0.5 ? boost::math::betac(1.0 - g, 2.0 * a + 1.0, r) : boost::math::beta(2.0 * a + 1.0, 1.0 - g, d);
    if (a != 0.0) {
        // int_0^r ((1-u)^a - (r-u)^a)^2 u^{-g} du; near u = r use x = r - u and expand the square.
        const double len = std::min(0.5 * r, d);
        const double top = r - len;
        s += quad([a, d, len](double, double, double x) {
                      const double q = pow_diff(a, d, x + len);
                      return q * q;
                  },
                  0.0, top, -g, 0.0, spec, grade_toward_right(0.0, top, len));
        s += quad([a, g, d, r](double, double x, double) { return std::pow(d + x, 2.0 * a) * std::pow(r - x, -g); },
                  0.0, len, 0.0, 0.0, spec);
        s -= 2.0 * quad([a, g, d, r](double, double x, double) { return std::pow(d + x, a) * std::pow(r - x, -g); },
                        0.0, len, a, 0.0, spec);
        s += quad([g, r](double, double x, double) { return std::pow(r - x, -g); }, 0.0, len, 2.0 * a, 0.0, spec);
        // int_0^inf ((1+u)^a - (r+u)^a)^2 u^{-g} du
        auto sq = [a, d, r](double u) {
            const double q = pow_diff(a, d, r + u);
            return q * q;
        };
        s += quad([sq](double u, double, double) { return sq(u); }, 0.0, r, -g, 0.0, spec);
        if (r < 1.0)
            s += quad([sq, g](double u, double, double) { return sq(u) * std::pow(u, -g); }, r, 1.0, 0.0, 0.0, spec,
                      grade_toward_left(r, 1.0, r));
        s += quad([a, d, r](double, double w, double) {
                      const double base = 1.0 + r * w;
                      const double q = std::pow(base, a) * std::expm1(a * std::log1p(d * w / base)) / w;
                      return q * q;
                  },
                  0.0, 1.0, g - 2.0 * a, 0.0, spec);
    }
    return p.c * p.c * s;
}

double unit_k(const GfbmParams& p, double r, double d, const QuadratureSpec& spec)
{
    check_unit(r, d);
    const double a = p.alpha, g = p.gamma;
    if (a < 0.0)
        throw DomainError("K(u,v) requires alpha >= 0");
    if (a == 0.0)
        return 0.0;
    if (!(r > 0.0))
        throw DomainError("K(u,v) requires u, v > 0");
    if (d == 0.0 && !(a > 0.5))
        throw DomainError("K(u,v) is singular on the diagonal");
    const double e = a - 1.0;
    double s = one_sided(e, e, g, r, d, spec);
    s += quad([e, r](double u, double, double) { return std::pow(1.0 + u, e) * std::pow(r + u, e); }, 0.0, r, -g, 0.0,
              spec);
    if (r < 1.0)
        s += quad([e, g, r](double u, double, double) { return std::pow(1.0 + u, e) * std::pow(r + u, e) * std::pow(u, -g); },
                  r, 1.0, 0.0, 0.0, spec, grade_toward_left(r, 1.0, r));
    s += quad([e, r](double, double w, double) { return std::pow(1.0 + w, e) * std::pow(1.0 + r * w, e); }, 0.0, 1.0,
              g - 2.0 * a, 0.0, spec);
    return p.c * p.c * a * a * s;
}

double unit_dpsi(const GfbmParams& p, double r, double d, const QuadratureSpec& spec)
{
    check_unit(r, d);
    const double a = p.alpha, g = p.gamma;
    if (a < 0.0)
        throw DomainError("dPsi/dt requires alpha >= 0");
    if (a == 0.0 || r == 0.0)
        return 0.0;
    double s = one_sided(a - 1.0, a, g, r, d, spec);
    s += quad([a, r](double u, double, double) { return std::pow(1.0 + u, a - 1.0) * std::pow(r + u, a); }, 0.0, r, -g,
              0.0, spec);
    s -= quad([a](double u, double, double) { return std::pow(1.0 + u, a - 1.0); }, 0.0, r, a - g, 0.0, spec);
    if (r < 1.0)
        s += quad([a, g, r](double u, double, double) {
                      return std::pow(1.0 + u, a - 1.0) * pow_diff(a, r, u) * std::pow(u, -g);
                  },
                  r, 1.0, 0.0, 0.0, spec, grade_toward_left(r, 1.0, r));
    s += quad([a, r](double, double w, double) { return std::pow(1.0 + w, a - 1.0) * expm1_ratio(a, r * w) * r; }, 0.0,
              1.0, g - 2.0 * a, 0.0, spec);
    return p.c * p.c * a * s;
}

namespace {

struct Scaled {
    double r, d, t;
};

Scaled order(double s, double t)
{
    if (!(s >= 0.0) || !(t >= 0.0) || !std::isfinite(s) || !std::isfinite(t))
        throw DomainError("times must be finite and non-negative");
    if (s > t)
        std::swap(s, t);
    return {s / t, (t - s) / t, t};
}

} // namespace

double phi(const GfbmParams& p, double s, double t, const QuadratureSpec& spec)
{
    if (s == t)
        return 0.0;
    const Scaled x = order(s, t);
    return std::pow(x.t, 2.0 * p.hurst) * unit_phi(p, x.r, x.d, spec);
}

double psi(const GfbmParams& p, double s, double t, const QuadratureSpec& spec)
{
    if (s == 0.0 || t == 0.0) {
        order(s, t);
        return 0.0;
    }
    const Scaled x = order(s, t);
    return std::pow(x.t, 2.0 * p.hurst) * unit_psi(p, x.r, x.d, spec);
}

double psi_rl(const RlParams& p, double s, double t, const QuadratureSpec& spec)
{
    if (s == 0.0 || t == 0.0) {
        order(s, t);
        return 0.0;
    }
    const Scaled x = order(s, t);
    return std::pow(x.t, 2.0 * p.hurst) * unit_psi_rl(p, x.r, x.d, spec);
}

double k_second(const GfbmParams& p, double u, double v, const QuadratureSpec& spec)
{
    if (!(u > 0.0) || !(v > 0.0))
        throw DomainError("k_second requires u, v > 0");
    if (std::abs(u - v) <= 1e-14 * std::max(u, v))
        throw DomainError("k_second: diagonal singularity at u = v");
    const Scaled x = order(u, v);
    return std::pow(x.t, 2.0 * p.hurst - 2.0) * unit_k(p, x.r, x.d, spec);
}

double dpsi_dt(const GfbmParams& p, double s, double t, const QuadratureSpec& spec)
{
    if (!(t > 0.0) || !(s >= 0.0) || s > t)
        throw DomainError("dpsi_dt requires 0 <= s <= t, t > 0");
    return std::pow(t, 2.0 * p.hurst - 1.0) * unit_dpsi(p, s / t, (t - s) / t, spec);
}

} // namespace gfbm
