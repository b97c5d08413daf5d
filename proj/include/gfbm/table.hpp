#pragma once

#include "gfbm/model.hpp"
#include "gfbm/quadrature.hpp"

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace gfbm {

// Piecewise Chebyshev interpolant of a function g(r, d) on r in (0,1), d = 1 - r.
// Cells are dyadic in r on (0, 1/2) and dyadic in d on [1/2, 1); arguments finer than
// the smallest cell fall back to the direct function.
class UnitTable {
public:
    static constexpr int kNodes = 20;
    static constexpr int kLevels = 52;
    using Fn = std::function<double(double, double)>;

    UnitTable() = default;
    explicit UnitTable(Fn direct);

    double operator()(double r, double d) const;
    bool empty() const { return !direct_; }

private:
    using Cell = std::array<double, kNodes>;
    static Cell fit(const Fn& f, double lo, bool in_d);
    static double clenshaw(const Cell& c, double y);

    Fn direct_;
    std::vector<Cell> left_;  // left_[k]: r in [2^-(k+2), 2^-(k+1))
    std::vector<Cell> right_; // right_[k]: d in [2^-(k+2), 2^-(k+1)]
};

// Tabulated covariance functions of one parameter pair. Tables are built on first use.
class CovarianceTable {
public:
    explicit CovarianceTable(const GfbmParams& p, const QuadratureSpec& spec = QuadratureSpec::tight());

    const GfbmParams& params() const { return p_; }

    double psi(double s, double t) const;
    double phi(double s, double t) const;
    // K(u,v) off the diagonal; requires alpha >= 0.
    double k(double u, double v) const;
    // K(u,v) with |u - v| = gap supplied accurately.
    double k_gap(double u, double v, double gap) const;
    // dPsi(s,t)/dt for 0 <= s <= t.
    double dpsi(double s, double t) const;

    double unit_psi(double r, double d) const;
    double unit_phi(double r, double d) const;
    double unit_k(double r, double d) const;
    double unit_dpsi(double r, double d) const;

private:
    struct Lazy {
        std::once_flag once;
        UnitTable table;
    };
    const UnitTable& get(Lazy& l, UnitTable::Fn f) const;

    GfbmParams p_;
    QuadratureSpec spec_;
    std::unique_ptr<Lazy> psi_, phi_, k_, dpsi_;
};

class RlCovarianceTable {
public:
    explicit RlCovarianceTable(const RlParams& p, const QuadratureSpec& spec = QuadratureSpec::tight());
    const RlParams& params() const { return p_; }
    double psi(double s, double t) const;

private:
    RlParams p_;
    UnitTable table_;
};

} // namespace gfbm
