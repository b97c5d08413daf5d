#pragma once

#include "gfbm/quadrature.hpp"

#include <string>

namespace gfbm {

struct GfbmParams {
    double alpha = 0.0;
    double gamma = 0.0;
    double hurst = 0.5;
    double c = 1.0;
    // Closed Gamma/Beta value of c, NaN near its poles.
    double c_closed_form = 1.0;
};

struct RlParams {
    double alpha = 0.0;
    double gamma = 0.0;
    double hurst = 0.5;
    double c_rl = 1.0;
};

enum class Region { BrownianMotion, FbmLine, RegionI, RegionII1, RegionII2 };
enum class TriState { Yes, No, NotApplicable, ConjecturedNo };

struct RegionClass {
    Region region = Region::BrownianMotion;
    bool fake_brownian_line = false;
    double hurst = 0.5;
    TriState x_is_semimartingale = TriState::Yes;
    bool x_finite_variation = false;
    bool x_differentiable = false;
    TriState y_is_semimartingale = TriState::Yes;
};

// Throws DomainError naming the violated bound.
void check_admissible(double alpha, double gamma);

double hurst_index(double alpha, double gamma);

// Terms of c^-2 by quadrature.
struct NormalizationTerms {
    double near = 0.0; // int_0^1 (1-v)^{2a} v^{-g} dv
    double far = 0.0;  // int_0^inf ((1+v)^a - v^a)^2 v^{-g} dv
};
NormalizationTerms normalization_terms(double alpha, double gamma, const QuadratureSpec& spec);

// Closed form of c^-2; NaN when a Gamma argument is within pole_guard of a pole.
double normalization_closed_form(double alpha, double gamma, double pole_guard = 1e-3);

GfbmParams make_params(double alpha, double gamma, const QuadratureSpec& spec = QuadratureSpec::tight());
RlParams make_rl_params(double alpha, double gamma);

RegionClass classify(const GfbmParams& params);

std::string to_string(Region r);
std::string to_string(TriState t);

} // namespace gfbm
