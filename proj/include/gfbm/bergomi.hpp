#pragma once

#include "gfbm/model.hpp"
#include "gfbm/quadrature.hpp"
#include "gfbm/simulate.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace gfbm {

struct BergomiParams {
    double eta = 2.0;       // vol-of-vol
    double xi0 = 0.04;      // flat forward variance
    double t = 0.5;         // evaluation time
    double T = 1.0;         // VIX maturity
    double delta = 1.0 / 12.0;
    double rho = -0.7;      // price/vol correlation

    void validate() const;
};

// (c/(alpha+1))^2 a^{-2} int_0^1 [((1-u)+a)^{alpha+1} - (1-u)^{alpha+1}]^2 (b+u)^{-gamma} du
double f_alpha_gamma(const RlParams& p, double a, double b, const QuadratureSpec& spec = QuadratureSpec::tight());

// v = eta^2/4 (T-t)^{2H} f(delta/(T-t), t/(T-t))
double vvix_approx(const RlParams& p, const BergomiParams& bp);

// c^2 int_t^T (u-s)^{2 alpha} s^{-gamma} ds, the variance of the F(T)-measurable part of log v(u).
double forward_compensator(const RlParams& p, const BergomiParams& bp, double u);
// E[v(u) | F(T)] = xi0 exp(eta g - eta^2/2 forward_compensator(u)), g = c int_t^T (u-s)^alpha s^{-gamma/2} dB(s).
double forward_variance(const RlParams& p, const BergomiParams& bp, double u, double g);

struct RBergomiResult {
    TimeGrid grid;                   // elapsed time u - t over [0, T + delta - t]
    std::vector<double> forward_times; // times u in [T, T + delta] (grid points)
    Eigen::MatrixXd v;               // v(u) per path (rows) at grid points
    Eigen::MatrixXd forward;         // E[v(u) | F(T)] per path at forward_times
    Eigen::MatrixXd log_price;       // log(P(u)/P(t)) per path, zero drift, left-point log-Euler
    std::vector<double> varsigma;    // (1/delta) int_T^{T+delta} E[v(u) | F(T)] du, trapezoid
    double var_log_sqrt_varsigma = 0.0;
    double jitter = 0.0;
};

// Grid of u - t on [t, T + delta], uniform with n_forward points on [T, T + delta] and the
// nearest comparable step on [t, T].
TimeGrid bergomi_grid(const BergomiParams& bp, int n_forward = 32);

// Exact joint Gaussian sampling of the Volterra integrals, the forward-curve integrals and the
// increments of B; the price uses W = rho B + sqrt(1 - rho^2) B_perp.
RBergomiResult rbergomi_mc(const RlParams& p, const BergomiParams& bp, const TimeGrid& grid, int n_paths,
                           std::uint64_t seed);

struct Table1Row {
    double alpha, gamma, hurst, f, v;
};
// t = 0.5 for side 'a', t = 0.75 for side 'b'; T = 1, delta = 1/12, eta = 2.
std::vector<Table1Row> table1(char side);
// Published v column of the t = 0.75 table, kept for the discrepancy report.
std::vector<double> table1b_reference_v();

struct SurfaceRow {
    double alpha, gamma, t, T, v;
};
// alpha = gamma/2 + H - 1/2 along each gamma; all (gamma, t, T) combinations with T > t.
std::vector<SurfaceRow> vvix_surface(double hurst, const std::vector<double>& gammas, const std::vector<double>& ts,
                                     const std::vector<double>& Ts, const BergomiParams& base);

} // namespace gfbm
