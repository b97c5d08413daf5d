#include "gfbm/specialfn.hpp"

#include "gfbm/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gfbm {

namespace {

constexpr double kPoleGuard = 1e-8;

void check_pole(double x)
{
    if (pole_distance(x) < kPoleGuard)
        throw DomainError("Gamma pole at x = " + std::to_string(x));
}

} // namespace

double pole_distance(double x)
{
    if (x > 0.5)
        return std::numeric_limits<double>::infinity();
    double n = std::round(x);
    if (n > 0.0)
        n = 0.0;
    return std::abs(x - n);
}

double log_gamma(double x)
{
    if (!(x > 0.0))
        throw DomainError("log_gamma requires x > 0");
    return boost::math::lgamma(x);
}

double gamma_pos(double x)
{
    if (!(x > 0.0))
        throw DomainError("gamma_pos requires x > 0");
    return boost::math::tgamma(x);
}

double gamma_neg(double x)
{
    if (!(x < 0.0))
        throw DomainError("gamma_neg requires x < 0");
    check_pole(x);
    double scale = 1.0;
    while (x < 0.0) {
        scale *= x;
        x += 1.0;
    }
    return gamma_pos(x) / scale;
}

double gamma_fn(double x)
{
    return x > 0.0 ? gamma_pos(x) : gamma_neg(x);
}

double beta(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("beta requires a > 0 and b > 0");
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

double abs_normal_moment(double p)
{
    return std::pow(2.0, 0.5 * p) * gamma_pos(0.5 * (p + 1.0)) / std::sqrt(std::numbers::pi);
}

} // namespace gfbm
