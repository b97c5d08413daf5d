#pragma once

#include "gfbm/model.hpp"
#include "gfbm/quadrature.hpp"

namespace gfbm {

struct KernelEval {
    double t = 0.0;
    double s = 0.0;
    double value = 0.0;      // K_t(s), without the factor c
    double derivative = 0.0; // dK_t(s)/dt
    double c_t = 0.0;        // normalizer of the kernel derivative; NaN outside region I
    bool singular = false;   // s = 0 or s = t
};

KernelEval kernel(const GfbmParams& p, double t, double s);

// C_t such that int |dK_t(s)/dt|^2 ds = C_t^2. NaN when the integral diverges.
double lemma_constant(const GfbmParams& p, double t);

// alpha^2 int_{s < t - cutoff} (t-s)^{2a-2} |s|^{-g} ds, by quadrature. Finite for any cutoff > 0.
double kernel_derivative_sq_norm(const GfbmParams& p, double t, double cutoff, const QuadratureSpec& spec = {});

// Unit-time forms: s = r t, and d = 1 - r is passed separately so that it stays accurate near r = 1.
//   Psi(s,t)     = t^{2H}   unit_psi(r)
//   Phi(s,t)     = t^{2H}   unit_phi(r)
//   K(s,t)       = t^{2H-2} unit_k(r)
//   dPsi(s,t)/dt = t^{2H-1} unit_dpsi(r)
double unit_psi(const GfbmParams& p, double r, double d, const QuadratureSpec& spec);
double unit_phi(const GfbmParams& p, double r, double d, const QuadratureSpec& spec);
double unit_k(const GfbmParams& p, double r, double d, const QuadratureSpec& spec);
double unit_dpsi(const GfbmParams& p, double r, double d, const QuadratureSpec& spec);
double unit_psi_rl(const RlParams& p, double r, double d, const QuadratureSpec& spec);

double phi(const GfbmParams& p, double s, double t, const QuadratureSpec& spec = {});
double psi(const GfbmParams& p, double s, double t, const QuadratureSpec& spec = {});
double psi_rl(const RlParams& p, double s, double t, const QuadratureSpec& spec = {});
// K(u,v) = d^2 Psi / du dv off the diagonal; requires alpha >= 0.
double k_second(const GfbmParams& p, double u, double v, const QuadratureSpec& spec = {});
// dPsi(s,t)/dt for 0 <= s <= t; requires alpha >= 0 (alpha > 0 when s = t).
double dpsi_dt(const GfbmParams& p, double s, double t, const QuadratureSpec& spec = {});

} // namespace gfbm
