#pragma once

namespace gfbm {

struct MarketParams {
    double mu = 0.05;
    double sigma = 0.2;
    double r = 0.01;
    double theta = 0.2; // (mu - r) / sigma
    double p0 = 1.0;

    static MarketParams make(double mu, double sigma, double r, double p0);
    void validate() const;
};

} // namespace gfbm
