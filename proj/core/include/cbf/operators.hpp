#pragma once

#include <optional>

#include "cbf/field.hpp"

namespace cbf {

/// Squared norms of a field; v_norm2 == h_norm2 + grad_norm2 by construction.
struct NormReport {
    double h_norm2 = 0.0;
    double grad_norm2 = 0.0;
    double v_norm2 = 0.0;
    double lp_norm = 0.0; ///< ||u||_{L^p}, physical quadrature; 0 unless p given
    double p = 0.0;
};

/// Two-sided inequality check with the evaluated sides attached.
struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// Orthogonal projection onto divergence-free fields; diagonal in Fourier
/// space, k = 0 mode untouched. Idempotent and self-adjoint.
VelocityField leray_project(const VelocityField& u);

/// Stokes operator A u: multiplier |k|^2 on divergence-free fields.
VelocityField stokes_apply(const VelocityField& u);

/// Zeroes all modes beyond the 2/3-rule cutoff.
VelocityField dealias(const VelocityField& u);

/// B(u, v) = P[(u . grad) v], pseudospectral with 2/3 dealiasing.
VelocityField bilinear_B(const VelocityField& u, const VelocityField& v);

/// Trilinear form b(u, v, w): physical-space quadrature of u_i d_i v_j w_j.
double trilinear_b(const VelocityField& u, const VelocityField& v, const VelocityField& w);

/// C(u) = P(|u|^{r-1} u), pointwise power in physical space, r >= 1.
VelocityField nonlinear_C(const VelocityField& u, double r);

/// Gateaux derivative of C at u in direction w, with the r-dependent branches:
/// r = 1 gives P(w); for r > 1, P(|u|^{r-1} w) + (r-1) P(u |u|^{r-3} (u.w))
/// with value 0 at points where u vanishes (1 < r < 3 branch).
VelocityField gateaux_C(const VelocityField& u, const VelocityField& w, double r);

/// Monotonicity of C: <C(u1) - C(u2), u1 - u2> against the half-sum lower
/// bound, evaluated pointwise in physical space before projection.
InequalityReport check_monotonicity_C(const VelocityField& u1, const VelocityField& u2, double r);

/// ||u - v||^{r+1}_{L^{r+1}} <= c_r (|||u|^{(r-1)/2}(u-v)||^2 + |||v|^{(r-1)/2}(u-v)||^2),
/// with c_r = 2^{r-2} for r > 2 and 1 for 1 <= r <= 2.
InequalityReport check_a215(const VelocityField& u, const VelocityField& v, double r);

/// Norm bundle; pass p for the L^p quadrature norm (p >= 1).
NormReport norms(const VelocityField& u, std::optional<double> p = std::nullopt);

/// ||u||^4_{L^4} / (||u||^2_H ||grad u||^2_H) on a mean-zero field.
double ladyzhenskaya_ratio(const VelocityField& u);

/// Dual norm ||u||^2_{V'} via the (1 + |k|^2)^{-1} multiplier.
double norm_vprime_sq(const VelocityField& u);

/// Physical-space quadrature of |u|^p over the torus.
double lp_norm_pow(const VelocityField& u, double p);

} // namespace cbf
