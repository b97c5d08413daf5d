#pragma once

#include "gfbm/girsanov.hpp"
#include "gfbm/market_params.hpp"
#include "gfbm/model.hpp"
#include "gfbm/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gfbm {

// P(t_k) = p0 exp((mu - sigma^2/2) t_k + sigma Y(t_k))
std::vector<double> price_path(const MarketParams& mkt, const GaussianPath& y);

struct MartingaleReport {
    double estimate = 0.0;   // E^Q[e^{-rT} P(T)] by importance sampling under P
    double std_error = 0.0;
    double deviation_se = 0.0; // |estimate - p0| / std_error
    double call_estimate = 0.0; // E^Q[e^{-rT} (P(T) - p0)_+]
    double call_std_error = 0.0;
    double mean_weight = 0.0;
    double weight_std_error = 0.0;
    double horizon = 0.0;
    int n_paths = 0;
    std::uint64_t seed = 0;
    MarketParams market;
};

// Weights from emm_density on the given mixed paths.
MartingaleReport martingale_check(const MarketParams& mkt, const InnovationOperator& op, const PathSet& y);
// Samples n_paths mixed paths on a uniform grid of n_steps over [0, wh.horizon].
MartingaleReport martingale_check(const MarketParams& mkt, const CovarianceTable& table, const WienerHopfGrid& wh,
                                  int n_steps, int n_paths, std::uint64_t seed);

enum class PriceModel { Bachelier, BlackScholes };
std::string to_string(PriceModel m);

struct ArbitragePath {
    double identity_error = 0.0;       // max_k |beta + gamma P - V| on the finest grid
    double min_value = 0.0;            // min_k V(t_k)
    double terminal_value = 0.0;       // V(T)
    std::vector<int> steps;            // mesh levels
    std::vector<double> sum_error;     // |self-financing sum - V(T)| per level
    bool monotone = false;             // sum_error strictly decreasing
};

struct ArbitrageReport {
    PriceModel model = PriceModel::Bachelier;
    double rate = 0.0;
    std::vector<ArbitragePath> paths;
    double monotone_fraction = 0.0;
    double max_identity_error = 0.0;
    bool nonnegative = true;           // V >= 0 at every grid point
    bool terminal_positive = true;     // V(T) > 0 whenever X(T) != 0
    std::vector<std::string> warnings;
};

// Portfolio identities on GFBM paths; mesh levels n/16, n/4, n by subsampling (n must be a multiple of 16).
ArbitrageReport arbitrage_demo(const GfbmParams& params, const TimeGrid& grid, int n_paths, std::uint64_t seed,
                               PriceModel model, double rate = 0.0);
// Same on caller-supplied X paths.
ArbitrageReport arbitrage_demo(const PathSet& x, PriceModel model, double rate = 0.0);

} // namespace gfbm
