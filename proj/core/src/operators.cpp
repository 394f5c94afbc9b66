#include "cbf/operators.hpp"

#include <cmath>

#include "cbf/fft.hpp"

namespace cbf {

namespace {

void check_same_grid(const VelocityField& a, const VelocityField& b, const char* what) {
    if (!(a.grid == b.grid)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

void check_r(double r, const char* what) {
    if (!(r >= 1.0)) throw InvalidArgument(std::string(what) + ": r must be >= 1");
}

/// d_a v_c as physical samples (spectral differentiation).
std::vector<double> derivative_physical(const VelocityField& v, int axis, int c) {
    const int n = v.grid.n;
    const double ku = v.grid.k_unit();
    std::vector<std::complex<double>> scratch(v.grid.size());
    const std::complex<double> I(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k = ku * v.grid.mode(axis == 0 ? i : j);
            scratch[v.index(i, j)] = I * k * v.at(c, i, j);
        }
    fft::backward(n, scratch);
    std::vector<double> out(scratch.size());
    for (std::size_t i = 0; i < scratch.size(); ++i) out[i] = scratch[i].real();
    return out;
}

} // namespace

VelocityField leray_project(const VelocityField& u) {
    VelocityField out = u;
    const int n = u.grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == 0 && j == 0) continue;
            const double k1 = u.grid.mode(i);
            const double k2 = u.grid.mode(j);
            const double k_sq = k1 * k1 + k2 * k2;
            const auto dot = k1 * u.at(0, i, j) + k2 * u.at(1, i, j);
            out.at(0, i, j) = u.at(0, i, j) - (k1 / k_sq) * dot;
            out.at(1, i, j) = u.at(1, i, j) - (k2 / k_sq) * dot;
        }
    return out;
}

VelocityField stokes_apply(const VelocityField& u) {
    VelocityField out = u;
    const int n = u.grid.n;
    const double ku = u.grid.k_unit();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k1 = ku * u.grid.mode(i);
            const double k2 = ku * u.grid.mode(j);
            const double k_sq = k1 * k1 + k2 * k2;
            out.at(0, i, j) *= k_sq;
            out.at(1, i, j) *= k_sq;
        }
    return out;
}

VelocityField dealias(const VelocityField& u) {
    VelocityField out = u;
    const int n = u.grid.n;
    const int cut = u.grid.dealias_limit();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (std::abs(u.grid.mode(i)) <= cut && std::abs(u.grid.mode(j)) <= cut) continue;
            out.at(0, i, j) = 0.0;
            out.at(1, i, j) = 0.0;
        }
    return out;
}

VelocityField bilinear_B(const VelocityField& u_in, const VelocityField& v_in) {
    check_same_grid(u_in, v_in, "bilinear_B");
    const VelocityField u = dealias(u_in);
    const VelocityField v = dealias(v_in);
    const PhysicalField up = to_physical(u);

    PhysicalField prod;
    prod.grid = u.grid;
    for (int c = 0; c < 2; ++c) {
        const auto dv1 = derivative_physical(v, 0, c);
        const auto dv2 = derivative_physical(v, 1, c);
        prod.comp[c].resize(u.grid.size());
        for (std::size_t x = 0; x < prod.comp[c].size(); ++x)
            prod.comp[c][x] = up.comp[0][x] * dv1[x] + up.comp[1][x] * dv2[x];
    }
    return leray_project(dealias(to_spectral(prod)));
}

double trilinear_b(const VelocityField& u, const VelocityField& v, const VelocityField& w) {
    check_same_grid(u, v, "trilinear_b");
    check_same_grid(u, w, "trilinear_b");
    const PhysicalField up = to_physical(u);
    const PhysicalField wp = to_physical(w);
    double acc = 0.0;
    for (int c = 0; c < 2; ++c) {
        const auto dv1 = derivative_physical(v, 0, c);
        const auto dv2 = derivative_physical(v, 1, c);
        for (std::size_t x = 0; x < dv1.size(); ++x)
            acc += (up.comp[0][x] * dv1[x] + up.comp[1][x] * dv2[x]) * wp.comp[c][x];
    }
    return acc * u.grid.cell_area();
}

VelocityField nonlinear_C(const VelocityField& u, double r) {
    check_r(r, "nonlinear_C");
    const PhysicalField up = to_physical(u);
    PhysicalField out;
    out.grid = u.grid;
    out.comp[0].resize(up.comp[0].size());
    out.comp[1].resize(up.comp[1].size());
    for (std::size_t x = 0; x < up.comp[0].size(); ++x) {
        const double mag = std::hypot(up.comp[0][x], up.comp[1][x]);
        const double factor = (r == 1.0) ? 1.0 : (mag == 0.0 ? 0.0 : std::pow(mag, r - 1.0));
        out.comp[0][x] = factor * up.comp[0][x];
        out.comp[1][x] = factor * up.comp[1][x];
    }
    return leray_project(dealias(to_spectral(out)));
}

VelocityField gateaux_C(const VelocityField& u, const VelocityField& w, double r) {
    check_r(r, "gateaux_C");
    check_same_grid(u, w, "gateaux_C");
    if (r == 1.0) return leray_project(w);
    const PhysicalField up = to_physical(u);
    const PhysicalField wp = to_physical(w);
    PhysicalField out;
    out.grid = u.grid;
    out.comp[0].resize(up.comp[0].size());
    out.comp[1].resize(up.comp[1].size());
    for (std::size_t x = 0; x < up.comp[0].size(); ++x) {
        const double u1 = up.comp[0][x];
        const double u2 = up.comp[1][x];
        const double mag = std::hypot(u1, u2);
        if (mag == 0.0) {
            out.comp[0][x] = 0.0;
            out.comp[1][x] = 0.0;
            continue;
        }
        const double udotw = u1 * wp.comp[0][x] + u2 * wp.comp[1][x];
        const double a = std::pow(mag, r - 1.0);
        const double b = (r - 1.0) * std::pow(mag, r - 3.0) * udotw;
        out.comp[0][x] = a * wp.comp[0][x] + b * u1;
        out.comp[1][x] = a * wp.comp[1][x] + b * u2;
    }
    return leray_project(dealias(to_spectral(out)));
}

InequalityReport check_monotonicity_C(const VelocityField& u1, const VelocityField& u2,
                                      double r) {
    check_r(r, "check_monotonicity_C");
    check_same_grid(u1, u2, "check_monotonicity_C");
    const PhysicalField a = to_physical(u1);
    const PhysicalField b = to_physical(u2);
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t x = 0; x < a.comp[0].size(); ++x) {
        const double d1 = a.comp[0][x] - b.comp[0][x];
        const double d2 = a.comp[1][x] - b.comp[1][x];
        const double diff_sq = d1 * d1 + d2 * d2;
        const double ma = std::hypot(a.comp[0][x], a.comp[1][x]);
        const double mb = std::hypot(b.comp[0][x], b.comp[1][x]);
        const double pa = (ma == 0.0 && r == 1.0) ? 1.0 : std::pow(ma, r - 1.0);
        const double pb = (mb == 0.0 && r == 1.0) ? 1.0 : std::pow(mb, r - 1.0);
        lhs += (pa * a.comp[0][x] - pb * b.comp[0][x]) * d1 +
               (pa * a.comp[1][x] - pb * b.comp[1][x]) * d2;
        rhs += 0.5 * (pa + pb) * diff_sq;
    }
    const double area = u1.grid.cell_area();
    InequalityReport rep;
    rep.lhs = lhs * area;
    rep.rhs = rhs * area;
    rep.pass = rep.lhs >= rep.rhs - 1e-9 * (1.0 + std::abs(rep.lhs));
    return rep;
}

InequalityReport check_a215(const VelocityField& u, const VelocityField& v, double r) {
    check_r(r, "check_a215");
    check_same_grid(u, v, "check_a215");
    const PhysicalField a = to_physical(u);
    const PhysicalField b = to_physical(v);
    const double cr = (r <= 2.0) ? 1.0 : std::pow(2.0, r - 2.0);
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t x = 0; x < a.comp[0].size(); ++x) {
        const double d1 = a.comp[0][x] - b.comp[0][x];
        const double d2 = a.comp[1][x] - b.comp[1][x];
        const double diff_sq = d1 * d1 + d2 * d2;
        const double ma = std::hypot(a.comp[0][x], a.comp[1][x]);
        const double mb = std::hypot(b.comp[0][x], b.comp[1][x]);
        lhs += std::pow(std::sqrt(diff_sq), r + 1.0);
        rhs += cr * (std::pow(ma, r - 1.0) + std::pow(mb, r - 1.0)) * diff_sq;
    }
    const double area = u.grid.cell_area();
    InequalityReport rep;
    rep.lhs = lhs * area;
    rep.rhs = rhs * area;
    rep.pass = rep.lhs <= rep.rhs + 1e-9 * (1.0 + std::abs(rep.rhs));
    return rep;
}

double lp_norm_pow(const VelocityField& u, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
    const PhysicalField up = to_physical(u);
    double acc = 0.0;
    for (std::size_t x = 0; x < up.comp[0].size(); ++x)
        acc += std::pow(std::hypot(up.comp[0][x], up.comp[1][x]), p);
    return acc * u.grid.cell_area();
}

NormReport norms(const VelocityField& u, std::optional<double> p) {
    NormReport rep;
    const int n = u.grid.n;
    const double ku = u.grid.k_unit();
    double h = 0.0;
    double grad = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k1 = ku * u.grid.mode(i);
            const double k2 = ku * u.grid.mode(j);
            const double k_sq = k1 * k1 + k2 * k2;
            const double e = std::norm(u.at(0, i, j)) + std::norm(u.at(1, i, j));
            h += e;
            grad += k_sq * e;
        }
    const double l2 = u.grid.box_length * u.grid.box_length;
    rep.h_norm2 = l2 * h;
    rep.grad_norm2 = l2 * grad;
    rep.v_norm2 = rep.h_norm2 + rep.grad_norm2;
    if (p) {
        rep.p = *p;
        rep.lp_norm = std::pow(lp_norm_pow(u, *p), 1.0 / *p);
    }
    return rep;
}

double ladyzhenskaya_ratio(const VelocityField& u) {
    if (!is_mean_zero(u, 1e-10 * (1.0 + norm_h(u))))
        throw InvalidArgument("ladyzhenskaya_ratio: field must be mean-zero");
    const NormReport nr = norms(u);
    if (nr.h_norm2 == 0.0 || nr.grad_norm2 == 0.0)
        throw InvalidArgument("ladyzhenskaya_ratio: undefined for the zero field");
    return lp_norm_pow(u, 4.0) / (nr.h_norm2 * nr.grad_norm2);
}

double norm_vprime_sq(const VelocityField& u) {
    const int n = u.grid.n;
    const double ku = u.grid.k_unit();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k1 = ku * u.grid.mode(i);
            const double k2 = ku * u.grid.mode(j);
            const double k_sq = k1 * k1 + k2 * k2;
            acc += (std::norm(u.at(0, i, j)) + std::norm(u.at(1, i, j))) / (1.0 + k_sq);
        }
    return u.grid.box_length * u.grid.box_length * acc;
}

} // namespace cbf
