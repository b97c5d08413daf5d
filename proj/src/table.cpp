#include "gfbm/table.hpp"

#include "gfbm/covariance.hpp"
#include "gfbm/errors.hpp"

#include <cmath>
#include <numbers>

namespace gfbm {

UnitTable::UnitTable(Fn direct) : direct_(std::move(direct))
{
    left_.reserve(kLevels);
    right_.reserve(kLevels);
    for (int k = 0; k < kLevels; ++k) {
        const double lo = std::ldexp(1.0, -(k + 2));
        left_.push_back(fit(direct_, lo, false));
        right_.push_back(fit(direct_, lo, true));
    }
}

UnitTable::Cell UnitTable::fit(const Fn& f, double lo, bool in_d)
{
    std::array<double, kNodes> vals{};
    for (int j = 0; j < kNodes; ++j) {
        const double y = std::cos(std::numbers::pi * (j + 0.5) / kNodes);
        const double x = lo * (1.5 + 0.5 * y);
        vals[j] = in_d ? f(1.0 - x, x) : f(x, 1.0 - x);
    }
    Cell c{};
    for (int k = 0; k < kNodes; ++k) {
        double s = 0.0;
        for (int j = 0; j < kNodes; ++j)
            s += vals[j] * std::cos(std::numbers::pi * k * (j + 0.5) / kNodes);
        c[k] = 2.0 * s / kNodes;
    }
    c[0] *= 0.5;
    return c;
}

double UnitTable::clenshaw(const Cell& c, double y)
{
    double b1 = 0.0, b2 = 0.0;
    for (int k = kNodes - 1; k >= 1; --k) {
        const double b0 = 2.0 * y * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return y * b1 - b2 + c[0];
}

double UnitTable::operator()(double r, double d) const
{
    if (r < 0.5) {
        int e = 0;
        std::frexp(r, &e); // r in [2^(e-1), 2^e)
        const int k = -e - 1;
        if (r <= 0.0 || k >= kLevels)
            return direct_(r, d);
        const double lo = std::ldexp(1.0, e - 1);
        return clenshaw(left_[k], 2.0 * r / lo - 3.0);
    }
    int e = 0;
    std::frexp(d, &e);
    if (e > -1)
        e = -1;
    const int k = -e - 1;
    if (d <= 0.0 || k >= kLevels)
        return direct_(r, d);
    const double lo = std::ldexp(1.0, e - 1);
    return clenshaw(right_[k], std::min(1.0, 2.0 * d / lo - 3.0));
}

CovarianceTable::CovarianceTable(const GfbmParams& p, const QuadratureSpec& spec)
    : p_(p), spec_(spec), psi_(std::make_unique<Lazy>()), phi_(std::make_unique<Lazy>()), k_(std::make_unique<Lazy>()),
      dpsi_(std::make_unique<Lazy>())
{
    spec_.validate();
}

const UnitTable& CovarianceTable::get(Lazy& l, UnitTable::Fn f) const
{
    std::call_once(l.once, [&] { l.table = UnitTable(std::move(f)); });
    return l.table;
}

double CovarianceTable::unit_psi(double r, double d) const
{
    if (d == 0.0)
        return 1.0;
    return get(*psi_, [this](double r, double d) { return gfbm::unit_psi(p_, r, d, spec_); })(r, d);
}

double CovarianceTable::unit_phi(double r, double d) const
{
    return get(*phi_, [this](double r, double d) { return gfbm::unit_phi(p_, r, d, spec_); })(r, d);
}

double CovarianceTable::unit_k(double r, double d) const
{
    return get(*k_, [this](double r, double d) { return gfbm::unit_k(p_, r, d, spec_); })(r, d);
}

double CovarianceTable::unit_dpsi(double r, double d) const
{
    return get(*dpsi_, [this](double r, double d) { return gfbm::unit_dpsi(p_, r, d, spec_); })(r, d);
}

double CovarianceTable::psi(double s, double t) const
{
    if (s > t)
        std::swap(s, t);
    if (!(s >= 0.0))
        throw DomainError("times must be non-negative");
    if (s == 0.0)
        return 0.0;
    return std::pow(t, 2.0 * p_.hurst) * unit_psi(s / t, (t - s) / t);
}

double CovarianceTable::phi(double s, double t) const
{
    if (s > t)
        std::swap(s, t);
    if (!(s >= 0.0))
        throw DomainError("times must be non-negative");
    if (s == t)
        return 0.0;
    return std::pow(t, 2.0 * p_.hurst) * unit_phi(s / t, (t - s) / t);
}

double CovarianceTable::k(double u, double v) const
{
    if (u > v)
        std::swap(u, v);
    if (!(u > 0.0))
        throw DomainError("K(u,v) requires u, v > 0");
    if (u == v)
        throw DomainError("K(u,v): diagonal singularity at u = v");
    return std::pow(v, 2.0 * p_.hurst - 2.0) * unit_k(u / v, (v - u) / v);
}

double CovarianceTable::k_gap(double u, double v, double gap) const
{
    if (u > v)
        std::swap(u, v);
    if (!(u > 0.0))
        throw DomainError("K(u,v) requires u, v > 0");
    if (!(gap > 0.0))
        throw DomainError("K(u,v): diagonal singularity at u = v");
    return std::pow(v, 2.0 * p_.hurst - 2.0) * unit_k(u / v, gap / v);
}

double CovarianceTable::dpsi(double s, double t) const
{
    if (!(t > 0.0) || !(s >= 0.0) || s > t)
        throw DomainError("dpsi requires 0 <= s <= t, t > 0");
    if (s == 0.0 || p_.alpha == 0.0)
        return 0.0;
    return std::pow(t, 2.0 * p_.hurst - 1.0) * unit_dpsi(s / t, (t - s) / t);
}

RlCovarianceTable::RlCovarianceTable(const RlParams& p, const QuadratureSpec& spec)
    : p_(p), table_([p, spec](double r, double d) { return unit_psi_rl(p, r, d, spec); })
{
}

double RlCovarianceTable::psi(double s, double t) const
{
    if (s > t)
        std::swap(s, t);
    if (!(s >= 0.0))
        throw DomainError("times must be non-negative");
    if (s == 0.0)
        return 0.0;
    if (s == t)
        return std::pow(t, 2.0 * p_.hurst);
    return std::pow(t, 2.0 * p_.hurst) * table_(s / t, (t - s) / t);
}

} // namespace gfbm
