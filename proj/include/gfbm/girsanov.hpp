#pragma once

#include "gfbm/market_params.hpp"
#include "gfbm/simulate.hpp"
#include "gfbm/table.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace gfbm {

namespace detail {
struct WienerHopfImpl;
}

// Solution L(s,t) of L(s,t) + int_0^t L(r,t) K(r,s) dr = -K(s,t) on 0 <= s <= t <= horizon.
struct WienerHopfGrid {
    double horizon = 1.0;
    int n = 0;                       // quadrature nodes per t-slice
    std::vector<double> nodes;       // nodes of the unit slice; slice t uses s = t * node
    std::vector<double> slice_times; // t_j = j * horizon / n, j = 1..n
    Eigen::MatrixXd l_values;        // l_values(j, i) = L(slice_times[j] * nodes[i], slice_times[j])
    double residual_norm = 0.0;      // max |residual| / (1 + max |K|) at the collocation nodes
    double residual_raw = 0.0;       // max |residual|
    double offnode_residual = 0.0;   // scaled residual of the interpolated L between nodes
    double condition = 1.0;          // largest condition estimate of the slice systems

    double L(double s, double t) const;
    std::shared_ptr<const detail::WienerHopfImpl> impl;
};

// Product-integration Nystrom solve for the GFBM kernel K; requires H in (1/2, 1) and alpha > 0.
// n must be a multiple of 16 (8-node panels graded toward both ends of each slice).
WienerHopfGrid solve_wiener_hopf(const GfbmParams& params, double horizon, int n = 64);
WienerHopfGrid solve_wiener_hopf(std::shared_ptr<const CovarianceTable> table, double horizon, int n = 64);

// Test hook: smooth user kernel, Gauss-Legendre Nystrom on each slice.
WienerHopfGrid solve_wiener_hopf_kernel(std::function<double(double, double)> kernel, double horizon, int n = 64);

// Test hook: a prescribed L(s,t).
WienerHopfGrid wiener_hopf_from_function(std::function<double(double, double)> l, double horizon);

// Discretization of the innovation map on a path grid. With cells [t_m, t_{m+1}],
//   dWbar_m = dY_m + sum_{i <= m} W(m,i) dY_i,   W(m,i) = (1/dt_i) int_{cell_i x cell_m, r < s} L(r,s),
//   phi_m   = (1/dt_m) sum_{i < m} W(m,i) dY_i,     the cell average of phi from completed cells,
//   Lbar(m,i) = (1/dt_i) int_{cell_i} L(r, t_m) dr, so phi(t_m) ~ sum_{i < m} Lbar(m,i) dY_i,
// and the Volterra inverse V with V (I + W) = W gives dY = dWbar - V dWbar.
class InnovationOperator {
public:
    InnovationOperator(const WienerHopfGrid& wh, const TimeGrid& grid);

    const TimeGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& w() const { return w_; }
    const Eigen::MatrixXd& lbar() const { return lbar_; }
    const Eigen::MatrixXd& v() const { return v_; }

    std::vector<double> phi(const std::vector<double>& y) const;      // phi on cells 0..N-1
    std::vector<double> w_bar(const std::vector<double>& y) const;    // Wbar at t_0..t_N
    std::vector<double> reconstruct(const std::vector<double>& wbar) const; // Y from Wbar

private:
    TimeGrid grid_;
    Eigen::MatrixXd w_, lbar_, v_;
};

struct VolterraGrid {
    TimeGrid grid;
    Eigen::MatrixXd l_values; // l_values(m, i) ~ ell(t_i, t_m) for i <= m
    double residual_norm = 0.0;
};

VolterraGrid solve_volterra(const WienerHopfGrid& wh, const TimeGrid& grid);
VolterraGrid solve_volterra(const InnovationOperator& op);

struct DensityResult {
    double log_density = 0.0;
    std::vector<double> phi_path;
    std::vector<double> w_bar;
};

DensityResult phi_path(const InnovationOperator& op, const GaussianPath& y);
DensityResult phi_path(const WienerHopfGrid& wh, const GaussianPath& y);
// exp(-int phi dY - 1/2 int phi^2 dt) with left-point sums.
DensityResult rn_density(const InnovationOperator& op, const GaussianPath& y);
DensityResult rn_density(const WienerHopfGrid& wh, const GaussianPath& y);
// exp(-int (theta - phi) dY - 1/2 int (theta^2 - phi^2) dt).
DensityResult emm_density(const InnovationOperator& op, const GaussianPath& y, const MarketParams& market);
DensityResult emm_density(const WienerHopfGrid& wh, const GaussianPath& y, const MarketParams& market);

// Region I: the derivative process of X sampled at t_1..t_N (values[0] is NaN) from the covariance K.
PathSet drift_lambda(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed);
PathSet drift_lambda(const CovarianceTable& table, const TimeGrid& grid, int n_paths, std::uint64_t seed);
// X(t_k) from the drift by trapezoid on [t_1, t_k] plus the rectangle lambda(t_1) t_1 on the first cell.
std::vector<double> integrate_drift(const GaussianPath& lambda);
// Weights a with X_approx(t_k) = sum_j a_j lambda(t_j) as used by integrate_drift.
std::vector<double> drift_weights(const TimeGrid& grid, int k);

// Region I: E[lambda(t_m) | Y(t_1 .. t_m)] by Gaussian projection on the grid.
class ConditionalDrift {
public:
    ConditionalDrift(const CovarianceTable& table, const TimeGrid& grid);
    std::vector<double> estimate(const std::vector<double>& y) const; // at t_0..t_{N-1}
    // exp(int E dY - 1/2 int E^2 dt) with left-point sums.
    DensityResult density(const GaussianPath& y) const;

private:
    TimeGrid grid_;
    Eigen::MatrixXd chol_; // lower factor of Cov(dY)
    Eigen::MatrixXd g_;    // row m: chol_{m x m}^{-1} Cov(lambda(t_m), dY_{0..m-1})
};

} // namespace gfbm
