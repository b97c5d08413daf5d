#pragma once

#include "gfbm/simulate.hpp"

#include <vector>

namespace gfbm {

enum class Regime { Subcritical, Critical, Supercritical };
std::string to_string(Regime r);
Regime classify_regime(double p, double hurst);

struct VariationStat {
    double p = 0.0;
    int partition_n = 0;
    double value = 0.0;
    double limit_rho = 0.0; // rho * t at p = 1/H, NaN otherwise
    Regime regime = Regime::Critical;
};

double rho(const GfbmParams& params);

VariationStat p_variation(const GaussianPath& path, double p, const GfbmParams& params);

// E sum |X(t_{i+1}) - X(t_i)|^p = E|Z|^p sum Phi_i^{p/2}, exact for the Gaussian increments.
double expected_p_variation(const CovarianceTable& table, const TimeGrid& grid, double p);

// E[(X(u+e)-X(u))(X(v+e)-X(v))] from second differences of Psi.
double increment_covariance(const GfbmParams& params, double u, double v, double e,
                            const QuadratureSpec& spec = QuadratureSpec::tight());

struct SweepRow {
    double p = 0.0;
    int n = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double expected = 0.0;
    Regime regime = Regime::Critical;
};

// Paths are simulated once at max(n_list) on [0, horizon] and subsampled; every n must divide it.
std::vector<SweepRow> variation_sweep(const GfbmParams& params, const std::vector<double>& p_list,
                                      const std::vector<int>& n_list, int n_paths, std::uint64_t seed,
                                      double horizon = 1.0);

} // namespace gfbm
