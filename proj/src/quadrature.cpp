#include "gfbm/quadrature.hpp"

#include "gfbm/errors.hpp"
#include "gfbm/specialfn.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <sstream>
#include <tuple>

namespace gfbm {

void QuadratureSpec::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw DomainError("quadrature tolerances must be positive");
    if (max_subdivisions < 64)
        throw DomainError("max_subdivisions must be at least 64");
}

QuadratureSpec QuadratureSpec::tight()
{
    QuadratureSpec s;
    s.abs_tol = 1e-15;
    s.rel_tol = 1e-13;
    s.max_subdivisions = 2000;
    return s;
}

namespace {

GaussRule golub_welsch(int n, double a, double b)
{
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            diag(k) = (b - a) / (ab + 2.0);
        else {
            double s = 2.0 * k + ab;
            diag(k) = (b * b - a * a) / (s * (s + 2.0));
        }
    }
    for (int k = 1; k < n; ++k) {
        double v;
        if (k == 1)
            v = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else {
            double s = 2.0 * k + ab;
            v = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        sub(k - 1) = std::sqrt(v);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + log_gamma(a + 1.0) + log_gamma(b + 1.0) -
                                log_gamma(ab + 2.0));
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int k = 0; k < n; ++k) {
        r.x[k] = es.eigenvalues()(k);
        double v0 = es.eigenvectors()(0, k);
        r.w[k] = mu0 * v0 * v0;
    }
    return r;
}

constexpr int kLow = 10;
constexpr int kHigh = 20;

struct Panel {
    double lo, hi;
    bool wl, wr;
    double value, err, l1;
    bool operator<(const Panel& o) const { return err < o.err; }
};

class Engine {
public:
    Engine(const WeightedIntegrand& h, double a, double b, double pa, double pb, const QuadratureSpec& spec)
        : h_(h), a_(a), b_(b), pa_(pa), pb_(pb), spec_(spec)
    {
    }

    Panel make(double lo, double hi, bool wl, bool wr) const
    {
        Panel p{lo, hi, wl && pa_ != 0.0, wr && pb_ != 0.0, 0.0, 0.0, 0.0};
        if (spec_.singular_endpoint_rule == EndpointRule::TanhSinh && (p.wl || p.wr))
            tanh_sinh_panel(p);
        else
            gauss_panel(p);
        return p;
    }

private:
    double explicit_weight(const Panel& p, double dl, double dr) const
    {
        double f = 1.0;
        if (!p.wl && pa_ != 0.0)
            f *= std::pow(dl, pa_);
        if (!p.wr && pb_ != 0.0)
            f *= std::pow(dr, pb_);
        return f;
    }

    void gauss_panel(Panel& p) const
    {
        const double ea = p.wl ? pa_ : 0.0;
        const double eb = p.wr ? pb_ : 0.0;
        const double len = p.hi - p.lo;
        const double off_l = p.lo - a_;
        const double off_r = b_ - p.hi;
        const double scale = std::pow(0.5 * len, 1.0 + ea + eb);
        auto eval = [&](const GaussRule& r, double& l1) {
            double s = 0.0;
            l1 = 0.0;
            for (std::size_t k = 0; k < r.x.size(); ++k) {
                const double up = 0.5 * len * (1.0 + r.x[k]);
                const double dn = 0.5 * len * (1.0 - r.x[k]);
                const double dl = off_l + up;
                const double dr = off_r + dn;
                const double x = p.lo + up;
                const double f = explicit_weight(p, dl, dr) * h_(x, dl, dr);
                s += r.w[k] * f;
                l1 += r.w[k] * std::abs(f);
            }
            return scale * s;
        };
        double l1a = 0.0, l1b = 0.0;
        const double q1 = eval(gauss_jacobi(kLow, eb, ea), l1a);
        const double q2 = eval(gauss_jacobi(kHigh, eb, ea), l1b);
        p.value = q2;
        p.err = std::abs(q2 - q1);
        p.l1 = scale * l1b;
        if (!std::isfinite(p.value))
            throw NumericalError("non-finite integrand value in quadrature");
    }

    // Power substitution x - lo = z^(1/(1+pa)) removes the endpoint weight, then tanh-sinh.
    void tanh_sinh_panel(Panel& p) const
    {
        static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
        const double mid = (p.wl && p.wr) ? 0.5 * (p.lo + p.hi) : (p.wl ? p.hi : p.lo);
        const double off_l = p.lo - a_;
        const double off_r = b_ - p.hi;
        double total = 0.0, err = 0.0, l1 = 0.0;
        const double tol = std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-3;
        if (p.wl) {
            const double e = pa_ + 1.0;
            const double zmax = std::pow(mid - p.lo, e);
            auto g = [&](double z) {
                const double up = std::pow(z, 1.0 / e);
                if (!(up > 0.0))
                    return 0.0; // node underflowed onto the singular endpoint
                const double dl = off_l + up;
                const double dr = off_r + (p.hi - p.lo - up);
                double f = h_(p.lo + up, dl, dr);
                if (pb_ != 0.0)
                    f *= std::pow(dr, pb_);
                return f;
            };
            double er = 0.0, ll = 0.0;
            total += ts.integrate(g, 0.0, zmax, tol, &er, &ll) / e;
            err += er / e;
            l1 += ll / e;
        }
        if (p.wr) {
            const double e = pb_ + 1.0;
            const double zmax = std::pow(p.hi - mid, e);
            auto g = [&](double z) {
                const double dn = std::pow(z, 1.0 / e);
                if (!(dn > 0.0))
                    return 0.0;
                const double dr = off_r + dn;
                const double dl = off_l + (p.hi - p.lo - dn);
                double f = h_(p.hi - dn, dl, dr);
                if (pa_ != 0.0)
                    f *= std::pow(dl, pa_);
                return f;
            };
            double er = 0.0, ll = 0.0;
            total += ts.integrate(g, 0.0, zmax, tol, &er, &ll) / e;
            err += er / e;
            l1 += ll / e;
        }
        p.value = total;
        p.err = err;
        p.l1 = l1;
        if (!std::isfinite(p.value))
            throw NumericalError("non-finite integrand value in quadrature");
    }

    const WeightedIntegrand& h_;
    double a_, b_, pa_, pb_;
    const QuadratureSpec& spec_;
};

} // namespace

const GaussRule& gauss_jacobi(int n, double a, double b)
{
    static thread_local std::map<std::tuple<int, double, double>, GaussRule> cache;
    auto key = std::make_tuple(n, a, b);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    if (!(a > -1.0) || !(b > -1.0))
        throw DomainError("Gauss-Jacobi exponents must exceed -1");
    return cache.emplace(key, golub_welsch(n, a, b)).first->second;
}

const GaussRule& gauss_legendre(int n)
{
    return gauss_jacobi(n, 0.0, 0.0);
}

QuadResult integrate_weighted(const WeightedIntegrand& h, double a, double b, double pa, double pb,
                              const QuadratureSpec& spec, std::span<const double> breaks)
{
    if (!(b > a)) {
        if (a == b)
            return {};
        throw DomainError("integration interval must satisfy a <= b");
    }
    if (!(pa > -1.0) || !(pb > -1.0))
        throw DomainError("endpoint exponents must exceed -1");
    Engine eng(h, a, b, pa, pb, spec);

    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b)
            pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::priority_queue<Panel> heap;
    double value = 0.0, err = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Panel p = eng.make(pts[i], pts[i + 1], i == 0, i + 2 == pts.size());
        value += p.value;
        err += p.err;
        l1 += p.l1;
        heap.push(p);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    int count = static_cast<int>(heap.size());
    auto done = [&] {
        return err <= std::max({spec.abs_tol, spec.rel_tol * std::abs(value), 64.0 * eps * l1});
    };
    while (!done()) {
        if (count >= spec.max_subdivisions) {
            std::ostringstream os;
            os << "quadrature did not converge on [" << a << ", " << b << "]: value " << value
               << ", error estimate " << err << " after " << count << " subdivisions";
            throw NumericalError(os.str());
        }
        Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) {
            // Panel cannot be split further in floating point; accept it.
            err -= p.err;
            p.err = 0.0;
            heap.push(p);
            continue;
        }
        Panel left = eng.make(p.lo, mid, p.wl, false);
        Panel right = eng.make(mid, p.hi, false, p.wr);
        value += left.value + right.value - p.value;
        err += left.err + right.err - p.err;
        l1 += left.l1 + right.l1 - p.l1;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    return {value, std::max(err, 0.0), count};
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec,
                     std::span<const double> breaks)
{
    WeightedIntegrand h = [&f](double x, double, double) { return f(x); };
    return integrate_weighted(h, a, b, 0.0, 0.0, spec, breaks);
}

std::vector<double> grade_toward_right(double a, double b, double gap)
{
    std::vector<double> out;
    const double lim = a + 0.25 * (b - a);
    for (double g = gap; b - g > lim; g *= 4.0)
        out.push_back(b - g);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<double> grade_toward_left(double a, double b, double gap)
{
    std::vector<double> out;
    const double lim = b - 0.25 * (b - a);
    for (double g = gap; a + g < lim; g *= 4.0)
        out.push_back(a + g);
    return out;
}

} // namespace gfbm
