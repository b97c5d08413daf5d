#include "gfbm/girsanov.hpp"

#include "gfbm/covariance.hpp"
#include "gfbm/errors.hpp"
#include "gfbm/parallel.hpp"
#include "gfbm/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gfbm {

namespace detail {

struct WienerHopfImpl {
    virtual ~WienerHopfImpl() = default;
    // s -> L(s, t) for one slice t
    virtual std::function<double(double)> slice(double t, double* condition = nullptr) const = 0;
};

} // namespace detail

namespace {

constexpr int kPanelNodes = 8;

// Barycentric Lagrange interpolation on one panel.
struct Panel {
    double a, b;
    std::vector<double> x, bw;

    double basis(int j, double t) const
    {
        double den = 0.0, num = 0.0;
        for (int k = 0; k < kPanelNodes; ++k) {
            const double d = t - x[k];
            if (d == 0.0)
                return k == j ? 1.0 : 0.0;
            const double q = bw[k] / d;
            den += q;
            if (k == j)
                num = q;
        }
        return num / den;
    }

    double interp(const double* f, double t) const
    {
        double den = 0.0, num = 0.0;
        for (int k = 0; k < kPanelNodes; ++k) {
            const double d = t - x[k];
            if (d == 0.0)
                return f[k];
            const double q = bw[k] / d;
            den += q;
            num += q * f[k];
        }
        return num / den;
    }
};

std::vector<Panel> graded_panels(int n)
{
    const int count = n / kPanelNodes;
    const int half = count / 2;
    // Geometric grading toward both ends, ratio 4.
    const double q = 4.0;
    std::vector<double> br{0.0};
    for (int k = 1; k <= half; ++k)
        br.push_back(0.5 * std::pow(q, k - half));
    for (int k = half - 1; k >= 0; --k)
        br.push_back(1.0 - br[k]);
    const GaussRule& gl = gauss_legendre(kPanelNodes);
    std::vector<Panel> panels;
    for (int p = 0; p < count; ++p) {
        Panel pn;
        pn.a = br[p];
        pn.b = br[p + 1];
        for (int k = 0; k < kPanelNodes; ++k)
            pn.x.push_back(pn.a + 0.5 * (pn.b - pn.a) * (1.0 + gl.x[k]));
        pn.bw.resize(kPanelNodes);
        for (int k = 0; k < kPanelNodes; ++k) {
            double w = 1.0;
            for (int j = 0; j < kPanelNodes; ++j)
                if (j != k)
                    w /= (pn.x[k] - pn.x[j]);
            pn.bw[k] = w;
        }
        panels.push_back(std::move(pn));
    }
    return panels;
}

QuadratureSpec residual_spec()
{
    QuadratureSpec s;
    s.abs_tol = 1e-12;
    s.rel_tol = 1e-10;
    s.max_subdivisions = 4000;
    return s;
}

class GfbmWienerHopf : public detail::WienerHopfImpl {
public:
    GfbmWienerHopf(std::shared_ptr<const CovarianceTable> table, int n) : table_(std::move(table)), n_(n)
    {
        const GfbmParams& p = table_->params();
        a_ = p.alpha;
        g_ = p.gamma;
        h_ = p.hurst;
        panels_ = graded_panels(n);
        for (const auto& pn : panels_)
            nodes_.insert(nodes_.end(), pn.x.begin(), pn.x.end());
        kvals_.resize(n);
        for (int i = 0; i < n; ++i)
            kvals_[i] = table_->unit_k(nodes_[i], 1.0 - nodes_[i]);
        a_mat_ = assemble_matrix();
        b_ = assemble_rhs();
    }

    const std::vector<double>& nodes() const { return nodes_; }
    const CovarianceTable& table() const { return *table_; }
    double hurst() const { return h_; }

    Eigen::VectorXd solve_m(double t, double* condition) const
    {
        const double lambda = std::pow(t, 2.0 * h_ - 1.0);
        Eigen::MatrixXd s = lambda * a_mat_;
        s.diagonal().array() += 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
        const double rc = lu.rcond();
        const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
        if (condition)
            *condition = cond;
        if (cond > 1e12) {
            std::ostringstream os;
            os << "Wiener-Hopf system ill-conditioned at t = " << t << " (condition estimate " << cond << ")";
            throw NumericalError(os.str());
        }
        return lu.solve(lambda * b_);
    }

    double interp(const Eigen::VectorXd& m, double sigma) const
    {
        int p = 0;
        while (p + 1 < static_cast<int>(panels_.size()) && sigma > panels_[p].b)
            ++p;
        return panels_[p].interp(m.data() + p * kPanelNodes, sigma);
    }

    // s -> t^{2H-2} M(s/t), the part of L beyond -K.
    std::function<double(double)> m_slice(double t, double* condition = nullptr) const
    {
        Eigen::VectorXd m = solve_m(t, condition);
        const double f = std::pow(t, 2.0 * h_ - 2.0);
        return [this, m = std::move(m), f, t](double s) { return f * interp(m, s / t); };
    }

    std::function<double(double)> slice(double t, double* condition) const override
    {
        auto ms = m_slice(t, condition);
        return [this, ms = std::move(ms), t](double s) { return ms(s) - table_->k_gap(s, t, t - s); };
    }

    // Residual of the unit-slice equation at the nodes and (with M interpolated) halfway between
    // neighbouring nodes. Integrals are recomputed by adaptive quadrature of the interpolated
    // solution, independent of the product-integration weights.
    struct Residual {
        double raw = 0.0, scaled = 0.0, offnode = 0.0;
    };
    Residual residual(const std::vector<double>& times) const
    {
        std::vector<double> pts = nodes_;
        for (const auto& pn : panels_)
            for (int k = 0; k + 1 < kPanelNodes; ++k)
                pts.push_back(0.5 * (pn.x[k] + pn.x[k + 1]));
        const std::size_t np = pts.size();
        const QuadratureSpec spec = residual_spec();
        std::vector<Eigen::VectorXd> ms;
        for (double t : times)
            ms.push_back(solve_m(t, nullptr));
        Eigen::VectorXd b2(np);
        Eigen::MatrixXd am(np, times.size());
        std::vector<double> kmax(np, 0.0);
        parallel_for(np, [&](std::size_t i) {
            const double sg = pts[i];
            b2(i) = adaptive(sg, [&](double rho, double omr, double gap) {
                return table_->unit_k(rho, omr) * table_->k_gap(rho, sg, gap);
            }, 2.0 * (a_ - g_), 2.0 * a_ - 1.0, spec);
            for (std::size_t j = 0; j < times.size(); ++j) {
                const Eigen::VectorXd& m = ms[j];
                am(i, j) = adaptive(sg, [&](double rho, double, double gap) {
                    return interp(m, rho) * table_->k_gap(rho, sg, gap);
                }, a_ - g_, 0.0, spec);
            }
            double km = std::abs(table_->unit_k(sg, 1.0 - sg));
            for (double nd : nodes_)
                if (nd != sg)
                    km = std::max(km, std::abs(table_->k_gap(nd, sg, std::abs(sg - nd))));
            kmax[i] = km;
        });
        const double kk = *std::max_element(kmax.begin(), kmax.end());
        Residual r;
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double t = times[j];
            const double lambda = std::pow(t, 2.0 * h_ - 1.0);
            const double f = std::pow(t, 2.0 * h_ - 2.0);
            for (std::size_t i = 0; i < np; ++i) {
                const double res = f * std::abs(interp(ms[j], pts[i]) - lambda * b2(i) + lambda * am(i, j));
                if (i < static_cast<std::size_t>(n_)) {
                    r.raw = std::max(r.raw, res);
                    r.scaled = std::max(r.scaled, res / (1.0 + f * kk));
                } else {
                    r.offnode = std::max(r.offnode, res / (1.0 + f * kk));
                }
            }
        }
        return r;
    }

private:
    struct QNode {
        double rho, omr, gap, w; // rho, 1 - rho, |rho - sigma|, weight
    };

    // Composite rule on [0,1] for integrands with power singularities at 0, sigma and 1 and jumps
    // at the panel breaks: Gauss-Jacobi on the pieces touching a singular point, geometric grading
    // toward it, Gauss-Legendre elsewhere.
    std::vector<QNode> graded_rule(double sigma, double e0, double es, double e1) const
    {
        constexpr int kNodes = 20;
        std::vector<QNode> out;
        std::vector<double> cuts{0.0};
        for (std::size_t p = 1; p < panels_.size(); ++p)
            cuts.push_back(panels_[p].a);
        cuts.push_back(1.0);
        std::vector<double> pts;
        for (double c : cuts) {
            if (c > sigma && (pts.empty() || pts.back() < sigma))
                pts.push_back(sigma);
            if (c != sigma)
                pts.push_back(c);
        }
        // dist(x, kind) for x given by offsets from the segment ends.
        auto piece = [&](double lo, double hi, double x0, double x1, double pa, double pb) {
            const double len = x1 - x0;
            const GaussRule& gr = gauss_jacobi(kNodes, pb, pa);
            const double scale = std::pow(0.5 * len, 1.0 + pa + pb);
            for (int k = 0; k < kNodes; ++k) {
                const double up = 0.5 * len * (1.0 + gr.x[k]);
                const double dn = 0.5 * len * (1.0 - gr.x[k]);
                const double dl = (x0 - lo) + up, dr = (hi - x1) + dn;
                QNode q;
                q.rho = x0 + up;
                q.omr = hi == 1.0 ? dr : (1.0 - hi) + dr;
                q.gap = hi == sigma ? dr : lo == sigma ? dl : hi < sigma ? (sigma - hi) + dr : (lo - sigma) + dl;
                q.w = scale * gr.w[k];
                if (pa != 0.0)
                    q.w /= std::pow(dl, pa);
                if (pb != 0.0)
                    q.w /= std::pow(dr, pb);
                out.push_back(q);
            }
        };
        auto exponent = [&](double x) { return x == 0.0 ? e0 : x == sigma ? es : x == 1.0 ? e1 : 0.0; };
        auto singular = [&](double x) { return x == 0.0 || x == sigma || x == 1.0; };
        for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
            const double lo = pts[s], hi = pts[s + 1];
            const double len = hi - lo;
            const bool sl = singular(lo), sh = singular(hi);
            std::vector<double> br{lo};
            if (sl) {
                std::vector<double> left;
                for (double d = 0.125 * (sh ? 0.5 : 1.0) * len; d > 1e-12 * len; d *= 0.125)
                    left.push_back(lo + d);
                br.insert(br.end(), left.rbegin(), left.rend());
            } else if (lo > sigma) {
                for (double x : grade_toward_left(lo, hi, lo - sigma))
                    br.push_back(x);
            }
            if (sl && sh)
                br.push_back(lo + 0.5 * len);
            if (sh) {
                for (double d = 0.125 * (sl ? 0.5 : 1.0) * len; d > 1e-12 * len; d *= 0.125)
                    br.push_back(hi - d);
            } else if (hi < sigma) {
                for (double x : grade_toward_right(lo, hi, sigma - hi))
                    br.push_back(x);
            }
            br.push_back(hi);
            std::sort(br.begin(), br.end());
            br.erase(std::unique(br.begin(), br.end()), br.end());
            for (std::size_t k = 0; k + 1 < br.size(); ++k) {
                const double pa = (k == 0 && sl) ? exponent(lo) : 0.0;
                const double pb = (k + 2 == br.size() && sh) ? exponent(hi) : 0.0;
                piece(lo, hi, br[k], br[k + 1], pa, pb);
            }
        }
        return out;
    }

    // Adaptive integral over [0,1] of f(rho, 1 - rho, |rho - sigma|) split at sigma and the breaks.
    // Nodes within 1e-15 of a singular point are dropped.
    template <class F>
    double adaptive(double sigma, F g, double e0, double e1, const QuadratureSpec& spec) const
    {
        auto f = [&](double rho, double omr, double gap) {
            return (rho < 1e-15 || omr < 1e-15 || gap < 1e-15) ? 0.0 : g(rho, omr, gap);
        };
        const double es = 2.0 * a_ - 1.0;
        std::vector<double> left, right;
        for (std::size_t p = 1; p < panels_.size(); ++p)
            (panels_[p].a < sigma ? left : right).push_back(panels_[p].a);
        const double omr_s = 1.0 - sigma;
        double s = integrate_weighted(
                       [&](double rho, double dl, double dr) {
                           return f(rho, omr_s + dr, dr) * std::pow(dl, -e0) * std::pow(dr, -es);
                       },
                       0.0, sigma, e0, es, spec, left)
                       .value;
        const double e1s = e1;
        s += integrate_weighted(
                 [&](double rho, double dl, double dr) {
                     return f(rho, dr, dl) * std::pow(dl, -es) * std::pow(dr, -e1s);
                 },
                 sigma, 1.0, es, e1s, spec, right)
                 .value;
        return s;
    }

    Eigen::MatrixXd assemble_matrix() const
    {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
        parallel_for(n_, [&](std::size_t i) {
            const double sigma = nodes_[i];
            for (const QNode& q : graded_rule(sigma, a_ - g_, 2.0 * a_ - 1.0, 0.0)) {
                int p = 0;
                while (p + 1 < static_cast<int>(panels_.size()) && q.rho > panels_[p].b)
                    ++p;
                const double wk = q.w * table_->k_gap(q.rho, sigma, q.gap);
                for (int j = 0; j < kPanelNodes; ++j)
                    a(i, p * kPanelNodes + j) += wk * panels_[p].basis(j, q.rho);
            }
        });
        return a;
    }

    // b(sigma) = int_0^1 K(rho, 1) K(rho, sigma) d rho
    Eigen::VectorXd assemble_rhs() const
    {
        Eigen::VectorXd b(n_);
        parallel_for(n_, [&](std::size_t i) {
            const double sigma = nodes_[i];
            double s = 0.0;
            for (const QNode& q : graded_rule(sigma, 2.0 * (a_ - g_), 2.0 * a_ - 1.0, 2.0 * a_ - 1.0))
                s += q.w * table_->unit_k(q.rho, q.omr) * table_->k_gap(q.rho, sigma, q.gap);
            b(i) = s;
        });
        return b;
    }

    std::shared_ptr<const CovarianceTable> table_;
    int n_;
    double a_, g_, h_;
    std::vector<Panel> panels_;
    std::vector<double> nodes_, kvals_;
    Eigen::MatrixXd a_mat_;
    Eigen::VectorXd b_;
};

class KernelWienerHopf : public detail::WienerHopfImpl {
public:
    KernelWienerHopf(std::function<double(double, double)> k, int n) : k_(std::move(k)), n_(n) {}

    struct Slice {
        std::vector<double> s, w;
        Eigen::VectorXd l;
    };

    Slice solve(double t, int n, double* condition) const
    {
        const GaussRule& gl = gauss_legendre(n);
        Slice sl;
        for (int j = 0; j < n; ++j) {
            sl.s.push_back(0.5 * t * (1.0 + gl.x[j]));
            sl.w.push_back(0.5 * t * gl.w[j]);
        }
        Eigen::MatrixXd m(n, n);
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) {
            rhs(i) = -k_(sl.s[i], t);
            for (int j = 0; j < n; ++j)
                m(i, j) = (i == j ? 1.0 : 0.0) + sl.w[j] * k_(sl.s[j], sl.s[i]);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        const double rc = lu.rcond();
        const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
        if (condition)
            *condition = cond;
        if (cond > 1e12)
            throw NumericalError("Wiener-Hopf system ill-conditioned");
        sl.l = lu.solve(rhs);
        return sl;
    }

    std::function<double(double)> slice(double t, double* condition) const override
    {
        auto sl = std::make_shared<Slice>(solve(t, n_, condition));
        return [this, sl, t](double s) {
            double v = -k_(s, t);
            for (std::size_t j = 0; j < sl->s.size(); ++j)
                v -= sl->w[j] * sl->l(j) * k_(sl->s[j], s);
            return v;
        };
    }

    // max |L + int L K + K| at the nodes with the integral on a finer rule.
    double residual(double t, double* kmax) const
    {
        const Slice sl = solve(t, n_, nullptr);
        auto l = slice(t, nullptr);
        const GaussRule& fine = gauss_legendre(2 * n_ + 1);
        double r = 0.0;
        for (int i = 0; i < n_; ++i) {
            double integral = 0.0;
            for (std::size_t j = 0; j < fine.x.size(); ++j) {
                const double rho = 0.5 * t * (1.0 + fine.x[j]);
                integral += 0.5 * t * fine.w[j] * l(rho) * k_(rho, sl.s[i]);
            }
            const double kv = k_(sl.s[i], t);
            *kmax = std::max(*kmax, std::abs(kv));
            r = std::max(r, std::abs(sl.l(i) + integral + kv));
        }
        return r;
    }

    int n() const { return n_; }

private:
    std::function<double(double, double)> k_;
    int n_;
};

class FunctionWienerHopf : public detail::WienerHopfImpl {
public:
    explicit FunctionWienerHopf(std::function<double(double, double)> l) : l_(std::move(l)) {}
    std::function<double(double)> slice(double t, double* condition) const override
    {
        if (condition)
            *condition = 1.0;
        return [this, t](double s) { return l_(s, t); };
    }

private:
    std::function<double(double, double)> l_;
};

void fill_slices(WienerHopfGrid& wh)
{
    const int n = wh.n;
    wh.slice_times.resize(n);
    wh.l_values.resize(n, static_cast<int>(wh.nodes.size()));
    std::vector<double> conds(n, 1.0);
    parallel_for(n, [&](std::size_t j) {
        const double t = wh.horizon * (j + 1) / n;
        wh.slice_times[j] = t;
        auto l = wh.impl->slice(t, &conds[j]);
        for (std::size_t i = 0; i < wh.nodes.size(); ++i)
            wh.l_values(j, i) = l(t * wh.nodes[i]);
    });
    wh.condition = *std::max_element(conds.begin(), conds.end());
}

void check_horizon(double horizon)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw DomainError("Wiener-Hopf horizon must be positive");
}

} // namespace

double WienerHopfGrid::L(double s, double t) const
{
    if (!impl)
        throw DomainError("Wiener-Hopf grid is not solved");
    if (!(t > 0.0) || !(s >= 0.0) || s > t || t > horizon * (1.0 + 1e-12))
        throw DomainError("L(s,t) requires 0 <= s <= t <= horizon");
    return impl->slice(t)(s);
}

WienerHopfGrid solve_wiener_hopf(std::shared_ptr<const CovarianceTable> table, double horizon, int n)
{
    check_horizon(horizon);
    const GfbmParams& p = table->params();
    if (!(p.alpha > 0.5 * p.gamma) || !(p.alpha > 0.0))
        throw DomainError("Wiener-Hopf solve requires H in (1/2, 1), i.e. alpha > gamma/2 and alpha > 0");
    if (n < 16 || n % 16 != 0)
        throw DomainError("Wiener-Hopf n must be a positive multiple of 16");
    auto impl = std::make_shared<GfbmWienerHopf>(std::move(table), n);
    WienerHopfGrid wh;
    wh.horizon = horizon;
    wh.n = n;
    wh.nodes = impl->nodes();
    wh.impl = impl;
    fill_slices(wh);
    const auto res = impl->residual({0.25 * horizon, 0.5 * horizon, 0.75 * horizon, horizon});
    wh.residual_raw = res.raw;
    wh.residual_norm = res.scaled;
    wh.offnode_residual = res.offnode;
    return wh;
}

WienerHopfGrid solve_wiener_hopf(const GfbmParams& params, double horizon, int n)
{
    return solve_wiener_hopf(std::make_shared<const CovarianceTable>(params), horizon, n);
}

WienerHopfGrid solve_wiener_hopf_kernel(std::function<double(double, double)> kernel, double horizon, int n)
{
    check_horizon(horizon);
    if (n < 1)
        throw DomainError("Wiener-Hopf n must be positive");
    auto impl = std::make_shared<KernelWienerHopf>(std::move(kernel), n);
    WienerHopfGrid wh;
    wh.horizon = horizon;
    wh.n = n;
    const GaussRule& gl = gauss_legendre(n);
    for (int j = 0; j < n; ++j)
        wh.nodes.push_back(0.5 * (1.0 + gl.x[j]));
    wh.impl = impl;
    fill_slices(wh);
    double kmax = 0.0, raw = 0.0;
    for (double t : {0.5 * horizon, horizon})
        raw = std::max(raw, impl->residual(t, &kmax));
    wh.residual_raw = raw;
    wh.residual_norm = raw / (1.0 + kmax);
    return wh;
}

WienerHopfGrid wiener_hopf_from_function(std::function<double(double, double)> l, double horizon)
{
    check_horizon(horizon);
    WienerHopfGrid wh;
    wh.horizon = horizon;
    wh.n = 16;
    const GaussRule& gl = gauss_legendre(wh.n);
    for (int j = 0; j < wh.n; ++j)
        wh.nodes.push_back(0.5 * (1.0 + gl.x[j]));
    wh.impl = std::make_shared<FunctionWienerHopf>(std::move(l));
    fill_slices(wh);
    return wh;
}

InnovationOperator::InnovationOperator(const WienerHopfGrid& wh, const TimeGrid& grid) : grid_(grid)
{
    grid_.validate();
    if (!wh.impl)
        throw DomainError("Wiener-Hopf grid is not solved");
    if (grid_.horizon() > wh.horizon * (1.0 + 1e-12))
        throw DomainError("path grid extends beyond the Wiener-Hopf horizon");
    const int n = grid_.steps();
    const auto& t = grid_.points;
    const double gx[3] = {0.5 * (1.0 - std::sqrt(0.6)), 0.5, 0.5 * (1.0 + std::sqrt(0.6))};
    const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

    const auto* gf = dynamic_cast<const GfbmWienerHopf*>(wh.impl.get());
    Eigen::MatrixXd cov;
    if (gf)
        fill_increment_covariance(gf->table(), grid_, cov);

    w_ = Eigen::MatrixXd::Zero(n, n);
    lbar_ = Eigen::MatrixXd::Zero(n, n);
    // For the GFBM kernel the -K part is integrated exactly and only the smooth part uses Gauss points.
    auto slice_fn = [&](double s) { return gf ? gf->m_slice(s) : wh.impl->slice(s); };

    parallel_for(n, [&](std::size_t mm) {
        const int m = static_cast<int>(mm);
        const double dm = t[m + 1] - t[m];
        for (int k = 0; k < 3; ++k) {
            const double s = t[m] + dm * gx[k];
            auto l = slice_fn(s);
            for (int i = 0; i < m; ++i) {
                const double di = t[i + 1] - t[i];
                double acc = 0.0;
                for (int q = 0; q < 3; ++q)
                    acc += gw[q] * l(t[i] + di * gx[q]);
                w_(m, i) += dm * gw[k] * acc;
            }
            double acc = 0.0;
            for (int q = 0; q < 3; ++q)
                acc += gw[q] * l(t[m] + (s - t[m]) * gx[q]);
            w_(m, m) += dm * gx[k] * gw[k] * acc;
        }
        if (gf) {
            for (int i = 0; i < m; ++i)
                w_(m, i) -= cov(i, m) / (t[i + 1] - t[i]);
            w_(m, m) -= 0.5 * cov(m, m) / dm;
        }
        if (m >= 1) {
            auto l = slice_fn(t[m]);
            for (int i = 0; i < m; ++i) {
                const double di = t[i + 1] - t[i];
                double acc = 0.0;
                for (int q = 0; q < 3; ++q)
                    acc += gw[q] * l(t[i] + di * gx[q]);
                lbar_(m, i) = acc;
                if (gf)
                    lbar_(m, i) -= (gf->table().dpsi(t[i + 1], t[m]) - gf->table().dpsi(t[i], t[m])) / di;
            }
        }
    });

    // V (I + W) = W, row by row
    v_ = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd wt = w_.transpose(); // wt(i, k) = W(k, i)
    parallel_for(n, [&](std::size_t mm) {
        const int m = static_cast<int>(mm);
        std::vector<double> row(m + 1, 0.0);
        for (int i = m; i >= 0; --i) {
            double s = w_(m, i);
            for (int k = i + 1; k <= m; ++k)
                s -= row[k] * wt(i, k);
            row[i] = s / (1.0 + w_(i, i));
        }
        for (int i = 0; i <= m; ++i)
            v_(m, i) = row[i];
    });
}

namespace {

std::vector<double> increments(const std::vector<double>& y, int n)
{
    if (static_cast<int>(y.size()) != n + 1)
        throw DomainError("path does not match the operator grid");
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i)
        d[i] = y[i + 1] - y[i];
    return d;
}

} // namespace

std::vector<double> InnovationOperator::phi(const std::vector<double>& y) const
{
    const int n = grid_.steps();
    const auto dy = increments(y, n);
    std::vector<double> out(n, 0.0);
    for (int m = 1; m < n; ++m) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            s += w_(m, i) * dy[i];
        out[m] = s / (grid_.points[m + 1] - grid_.points[m]);
    }
    return out;
}

std::vector<double> InnovationOperator::w_bar(const std::vector<double>& y) const
{
    const int n = grid_.steps();
    const auto dy = increments(y, n);
    std::vector<double> out(n + 1, 0.0);
    for (int m = 0; m < n; ++m) {
        double s = dy[m];
        for (int i = 0; i <= m; ++i)
            s += w_(m, i) * dy[i];
        out[m + 1] = out[m] + s;
    }
    return out;
}

std::vector<double> InnovationOperator::reconstruct(const std::vector<double>& wbar) const
{
    const int n = grid_.steps();
    const auto dw = increments(wbar, n);
    std::vector<double> out(n + 1, 0.0);
    for (int m = 0; m < n; ++m) {
        double s = dw[m];
        for (int i = 0; i <= m; ++i)
            s -= v_(m, i) * dw[i];
        out[m + 1] = out[m] + s;
    }
    return out;
}

VolterraGrid solve_volterra(const InnovationOperator& op)
{
    VolterraGrid vg;
    vg.grid = op.grid();
    const int n = vg.grid.steps();
    vg.l_values = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        const double dm = vg.grid.points[m + 1] - vg.grid.points[m];
        for (int i = 0; i <= m; ++i)
            vg.l_values(m, i) = op.v()(m, i) / dm;
    }
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = op.v() * (id + op.w()) - op.w();
    vg.residual_norm = n > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
    return vg;
}

VolterraGrid solve_volterra(const WienerHopfGrid& wh, const TimeGrid& grid)
{
    return solve_volterra(InnovationOperator(wh, grid));
}

DensityResult phi_path(const InnovationOperator& op, const GaussianPath& y)
{
    DensityResult r;
    r.phi_path = op.phi(y.values);
    r.w_bar = op.w_bar(y.values);
    return r;
}

DensityResult phi_path(const WienerHopfGrid& wh, const GaussianPath& y)
{
    return phi_path(InnovationOperator(wh, *y.grid), y);
}

DensityResult rn_density(const InnovationOperator& op, const GaussianPath& y)
{
    DensityResult r = phi_path(op, y);
    const auto& t = op.grid().points;
    double s = 0.0;
    for (std::size_t m = 0; m < r.phi_path.size(); ++m) {
        const double f = r.phi_path[m];
        s -= f * (y.values[m + 1] - y.values[m]) + 0.5 * f * f * (t[m + 1] - t[m]);
    }
    r.log_density = s;
    if (!std::isfinite(s))
        throw NumericalError("log density is not finite");
    return r;
}

DensityResult rn_density(const WienerHopfGrid& wh, const GaussianPath& y)
{
    return rn_density(InnovationOperator(wh, *y.grid), y);
}

DensityResult emm_density(const InnovationOperator& op, const GaussianPath& y, const MarketParams& market)
{
    market.validate();
    DensityResult r = phi_path(op, y);
    const auto& t = op.grid().points;
    const double th = market.theta;
    double s = 0.0;
    for (std::size_t m = 0; m < r.phi_path.size(); ++m) {
        const double f = r.phi_path[m];
        s -= (th - f) * (y.values[m + 1] - y.values[m]) + 0.5 * (th * th - f * f) * (t[m + 1] - t[m]);
    }
    r.log_density = s;
    if (!std::isfinite(s))
        throw NumericalError("log density is not finite");
    return r;
}

DensityResult emm_density(const WienerHopfGrid& wh, const GaussianPath& y, const MarketParams& market)
{
    return emm_density(InnovationOperator(wh, *y.grid), y, market);
}

namespace {

void require_region_one(const GfbmParams& p)
{
    if (classify(p).region != Region::RegionI)
        throw DomainError("finite-variation drift requires region I (1/2 < alpha < (1+gamma)/2, gamma > 0)");
}

} // namespace

PathSet drift_lambda(const CovarianceTable& table, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    require_region_one(table.params());
    grid.validate();
    if (n_paths < 1)
        throw DomainError("n_paths must be at least 1");
    const int n = grid.steps();
    const auto& t = grid.points;
    const double diag_unit = unit_k(table.params(), 1.0, 0.0, QuadratureSpec::tight());
    const double h = table.params().hurst;
    auto f = GaussianFactor::factorize(n, [&](Eigen::MatrixXd& m) {
        m.resize(n, n);
        for (int j = 0; j < n; ++j) {
            m(j, j) = std::pow(t[j + 1], 2.0 * h - 2.0) * diag_unit;
            for (int i = j + 1; i < n; ++i)
                m(i, j) = m(j, i) = table.k_gap(t[j + 1], t[i + 1], t[i + 1] - t[j + 1]);
        }
    });
    const Eigen::MatrixXd x = f.sample(n_paths, seed, kStreamX);
    auto g = std::make_shared<const TimeGrid>(grid);
    PathSet out;
    out.jitter = f.jitter();
    out.paths.resize(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        GaussianPath& gp = out.paths[p];
        gp.grid = g;
        gp.seed = seed;
        gp.index = p;
        gp.label = PathLabel::DriftLambda;
        gp.hurst = h;
        gp.values.resize(n + 1);
        gp.values[0] = std::numeric_limits<double>::quiet_NaN();
        for (int i = 0; i < n; ++i)
            gp.values[i + 1] = x(i, p);
    }
    return out;
}

PathSet drift_lambda(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed)
{
    CovarianceTable table(params);
    return drift_lambda(table, grid, n_paths, seed);
}

std::vector<double> drift_weights(const TimeGrid& grid, int k)
{
    const auto& t = grid.points;
    if (k < 1 || k > grid.steps())
        throw DomainError("drift_weights index out of range");
    std::vector<double> a(t.size(), 0.0);
    a[1] = t[1];
    for (int j = 1; j < k; ++j) {
        const double h = t[j + 1] - t[j];
        a[j] += 0.5 * h;
        a[j + 1] += 0.5 * h;
    }
    return a;
}

std::vector<double> integrate_drift(const GaussianPath& lambda)
{
    const auto& t = lambda.grid->points;
    const auto& v = lambda.values;
    std::vector<double> x(v.size(), 0.0);
    if (v.size() < 2)
        return x;
    x[1] = v[1] * t[1];
    for (std::size_t k = 2; k < v.size(); ++k)
        x[k] = x[k - 1] + 0.5 * (t[k] - t[k - 1]) * (v[k - 1] + v[k]);
    return x;
}

ConditionalDrift::ConditionalDrift(const CovarianceTable& table, const TimeGrid& grid) : grid_(grid)
{
    require_region_one(table.params());
    grid_.validate();
    const int n = grid_.steps();
    const auto& t = grid_.points;
    Eigen::MatrixXd cov;
    fill_increment_covariance(table, grid_, cov);
    for (int i = 0; i < n; ++i)
        cov(i, i) += t[i + 1] - t[i];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NumericalError("covariance of the mixed increments is not positive definite");
    chol_ = llt.matrixL();
    g_ = Eigen::MatrixXd::Zero(n, n);
    parallel_for(n, [&](std::size_t mm) {
        const int m = static_cast<int>(mm);
        if (m == 0)
            return;
        Eigen::VectorXd c(m);
        for (int i = 0; i < m; ++i)
            c(i) = table.dpsi(t[i + 1], t[m]) - table.dpsi(t[i], t[m]);
        chol_.topLeftCorner(m, m).triangularView<Eigen::Lower>().solveInPlace(c);
        g_.row(m).head(m) = c.transpose();
    });
}

std::vector<double> ConditionalDrift::estimate(const std::vector<double>& y) const
{
    const int n = grid_.steps();
    const auto dy = increments(y, n);
    Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(dy.data(), n);
    chol_.triangularView<Eigen::Lower>().solveInPlace(z);
    std::vector<double> e(n, 0.0);
    for (int m = 1; m < n; ++m)
        e[m] = g_.row(m).head(m).dot(z.head(m));
    return e;
}

DensityResult ConditionalDrift::density(const GaussianPath& y) const
{
    DensityResult r;
    std::vector<double> e = estimate(y.values);
    const auto& t = grid_.points;
    double s = 0.0;
    for (std::size_t m = 0; m < e.size(); ++m)
        s += e[m] * (y.values[m + 1] - y.values[m]) - 0.5 * e[m] * e[m] * (t[m + 1] - t[m]);
    r.log_density = s;
    r.phi_path.resize(e.size());
    for (std::size_t m = 0; m < e.size(); ++m)
        r.phi_path[m] = -e[m];
    r.w_bar.assign(y.values.size(), 0.0);
    for (std::size_t m = 0; m < e.size(); ++m)
        r.w_bar[m + 1] = r.w_bar[m] + (y.values[m + 1] - y.values[m]) - e[m] * (t[m + 1] - t[m]);
    return r;
}

} // namespace gfbm
