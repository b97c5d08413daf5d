#pragma once

#include "gfbm/simulate.hpp"

namespace gfbm {

struct ShotNoiseParams {
    double rate = 1.0;    // Poisson intensity
    double alpha = 0.25;  // shot exponent, in (0, 1/2)
    double gamma = 0.25;  // mark variance exponent, in (0, 1)
    double epsilon = 1.0; // time scaling
    double window = 1.0;  // arrivals are simulated on [-window, T/epsilon], in unscaled time
    double mark_scale = 1.0;

    void validate() const;
    double hurst() const { return alpha - gamma / 2.0 + 0.5; }
};

// Variance of epsilon^H Z(t/epsilon) without truncation: rate * mark_scale^2 t^{2H} / (alpha c)^2.
double shot_noise_variance(const ShotNoiseParams& sn, double t);

// Fraction of that variance lost to arrivals before -window.
double shot_noise_truncation_fraction(const ShotNoiseParams& sn, double t);

// Scaled integrated shot noise epsilon^H Z(t/epsilon) on the grid.
PathSet sample_shot_noise_prelimit(const ShotNoiseParams& sn, const TimeGrid& grid, int n_paths, std::uint64_t seed);

} // namespace gfbm
