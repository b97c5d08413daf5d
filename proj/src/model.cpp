#include "gfbm/model.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/specialfn.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gfbm {

void check_admissible(double alpha, double gamma)
{
    std::ostringstream os;
    if (!std::isfinite(alpha) || !std::isfinite(gamma))
        throw DomainError("alpha and gamma must be finite");
    if (gamma < 0.0) {
        os << "gamma = " << gamma << " violates gamma >= 0";
        throw DomainError(os.str());
    }
    if (gamma >= 1.0) {
        os << "gamma = " << gamma << " violates gamma < 1";
        throw DomainError(os.str());
    }
    if (!(alpha > 0.5 * (gamma - 1.0))) {
        os << "alpha = " << alpha << " violates alpha > (gamma-1)/2 = " << 0.5 * (gamma - 1.0);
        throw DomainError(os.str());
    }
    if (!(alpha < 0.5 * (gamma + 1.0))) {
        os << "alpha = " << alpha << " violates alpha < (1+gamma)/2 = " << 0.5 * (gamma + 1.0);
        throw DomainError(os.str());
    }
}

double hurst_index(double alpha, double gamma)
{
    return alpha - gamma / 2.0 + 0.5;
}

NormalizationTerms normalization_terms(double alpha, double gamma, const QuadratureSpec& spec)
{
    NormalizationTerms t;
    const double a = alpha, g = gamma;
    t.near = integrate_weighted([](double, double, double) { return 1.0; }, 0.0, 1.0, -g, 2.0 * a, spec).value;
    if (a == 0.0)
        return t;
    // [0, 1/2]: expand ((1+v)^a - v^a)^2 so that each term carries a single endpoint power.
    const double half = 0.5;
    double s = integrate_weighted([a](double, double dl, double) { return std::pow(1.0 + dl, 2.0 * a); }, 0.0,
                                  half, -g, 0.0, spec)
                   .value;
    s -= 2.0 * integrate_weighted([a](double, double dl, double) { return std::pow(1.0 + dl, a); }, 0.0, half,
                                  a - g, 0.0, spec)
                   .value;
    const double e = 2.0 * a - g + 1.0;
    s += std::pow(half, e) / e;
    // [1/2, 1]
    s += integrate_weighted(
             [a, g](double v, double, double) {
                 const double d = std::pow(v, a) * std::expm1(a * std::log1p(1.0 / v));
                 return d * d * std::pow(v, -g);
             },
             half, 1.0, 0.0, 0.0, spec)
             .value;
    // [1, inf) with v = 1/w
    s += integrate_weighted(
             [a](double, double w, double) {
                 const double q = std::expm1(a * std::log1p(w)) / w;
                 return q * q;
             },
             0.0, 1.0, g - 2.0 * a, 0.0, spec)
             .value;
    t.far = s;
    return t;
}

double normalization_closed_form(double alpha, double gamma, double pole_guard)
{
    const double a = alpha, g = gamma;
    const double args[] = {-2.0 * a, -a, -1.0 - 2.0 * a + g};
    for (double x : args)
        if (pole_distance(x) < pole_guard)
            return std::numeric_limits<double>::quiet_NaN();
    return beta(1.0 - g, 2.0 * a + 1.0) +
           (gamma_pos(1.0 - g) / gamma_fn(-2.0 * a) - 2.0 * gamma_pos(1.0 + a - g) / gamma_fn(-a)) *
               gamma_fn(-1.0 - 2.0 * a + g);
}

GfbmParams make_params(double alpha, double gamma, const QuadratureSpec& spec)
{
    check_admissible(alpha, gamma);
    spec.validate();
    GfbmParams p;
    p.alpha = alpha;
    p.gamma = gamma;
    p.hurst = hurst_index(alpha, gamma);
    const NormalizationTerms t = normalization_terms(alpha, gamma, spec);
    const double inv2 = t.near + t.far;
    if (!(inv2 > 0.0) || !std::isfinite(inv2))
        throw NumericalError("normalization integral is not positive and finite");
    p.c = 1.0 / std::sqrt(inv2);
    const double cf = normalization_closed_form(alpha, gamma);
    p.c_closed_form = std::isnan(cf) ? cf : 1.0 / std::sqrt(cf);
    if (!std::isnan(cf) && std::abs(p.c_closed_form - p.c) > 1e-8 * p.c) {
        std::ostringstream os;
        os.precision(17);
        os << "normalization constant mismatch at (" << alpha << ", " << gamma << "): quadrature " << p.c
           << ", closed form " << p.c_closed_form;
        throw NumericalError(os.str());
    }
    return p;
}

RlParams make_rl_params(double alpha, double gamma)
{
    check_admissible(alpha, gamma);
    RlParams p;
    p.alpha = alpha;
    p.gamma = gamma;
    p.hurst = hurst_index(alpha, gamma);
    p.c_rl = 1.0 / std::sqrt(beta(1.0 - gamma, 2.0 * alpha + 1.0));
    return p;
}

RegionClass classify(const GfbmParams& params)
{
    check_admissible(params.alpha, params.gamma);
    const double a = params.alpha, g = params.gamma;
    RegionClass rc;
    rc.hurst = hurst_index(a, g);
    if (g == 0.0) {
        if (a == 0.0) {
            rc.region = Region::BrownianMotion;
            rc.x_is_semimartingale = TriState::Yes;
            rc.y_is_semimartingale = TriState::Yes;
        } else {
            // Standard FBM with H = a + 1/2; the mixed process is a semimartingale iff H > 3/4.
            rc.region = Region::FbmLine;
            rc.x_is_semimartingale = TriState::No;
            rc.y_is_semimartingale = a > 0.25 ? TriState::Yes : TriState::No;
        }
        return rc;
    }
    const bool on_half_line = std::abs(2.0 * a - g) <= 1e-14;
    if (a > 0.5) {
        rc.region = Region::RegionI;
        rc.x_is_semimartingale = TriState::Yes;
        rc.x_finite_variation = true;
        rc.x_differentiable = true;
        rc.y_is_semimartingale = TriState::Yes;
    } else if (a > 0.5 * g && !on_half_line) {
        rc.region = Region::RegionII1;
        rc.x_is_semimartingale = TriState::No;
        rc.y_is_semimartingale = TriState::Yes;
    } else {
        rc.region = Region::RegionII2;
        rc.fake_brownian_line = on_half_line;
        rc.x_is_semimartingale = TriState::No;
        rc.y_is_semimartingale = TriState::ConjecturedNo;
    }
    return rc;
}

std::string to_string(Region r)
{
    switch (r) {
    case Region::BrownianMotion: return "BrownianMotion";
    case Region::FbmLine: return "FbmLine";
    case Region::RegionI: return "I";
    case Region::RegionII1: return "II-1";
    case Region::RegionII2: return "II-2";
    }
    return "unknown";
}

std::string to_string(TriState t)
{
    switch (t) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    case TriState::NotApplicable: return "not-applicable";
    case TriState::ConjecturedNo: return "conjectured-no";
    }
    return "unknown";
}

} // namespace gfbm
