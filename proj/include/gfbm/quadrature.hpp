#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gfbm {

enum class EndpointRule { GaussJacobi, TanhSinh };

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_subdivisions = 512;
    EndpointRule singular_endpoint_rule = EndpointRule::GaussJacobi;

    void validate() const;
    static QuadratureSpec tight();
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

// Integrand h(x, x - a, b - x); the distances are accurate even when x is rounded.
using WeightedIntegrand = std::function<double(double, double, double)>;

// int_a^b (x-a)^pa (b-x)^pb h(x) dx with pa, pb > -1 and h smooth on [a,b].
// Optional interior break points seed the adaptive bisection.
QuadResult integrate_weighted(const WeightedIntegrand& h, double a, double b, double pa, double pb,
                              const QuadratureSpec& spec, std::span<const double> breaks = {});

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureSpec& spec, std::span<const double> breaks = {});

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes and weights on [-1,1] for the weight (1-y)^a (1+y)^b.
const GaussRule& gauss_jacobi(int n, double a, double b);
const GaussRule& gauss_legendre(int n);

// Points b - gap*4^k (k >= 0) inside (a + (b-a)/4, b): grading toward b for a singularity at distance gap from b.
std::vector<double> grade_toward_right(double a, double b, double gap);
// Points a + gap*4^k inside (a, b - (b-a)/4).
std::vector<double> grade_toward_left(double a, double b, double gap);

} // namespace gfbm
