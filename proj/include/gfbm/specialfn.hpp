#pragma once

namespace gfbm {

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// Gamma(x) for x > 0.
double gamma_pos(double x);

// Gamma(x) for x < 0 non-integer, via Gamma(x) = Gamma(x+1)/x applied until the argument is positive.
double gamma_neg(double x);

// Gamma on the whole real line minus the poles.
double gamma_fn(double x);

double beta(double a, double b);

// Distance from x to the nearest non-positive integer (infinity for x > 0.5).
double pole_distance(double x);

// E|Z|^p for a standard normal Z.
double abs_normal_moment(double p);

} // namespace gfbm
