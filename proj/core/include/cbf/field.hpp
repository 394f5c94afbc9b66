#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "cbf/grid.hpp"

namespace cbf {

/// Two-component velocity field stored as complex Fourier amplitudes:
/// u(x) = sum_k uhat(k) e^{i k.x}. Real fields keep Hermitian symmetry by
/// construction. Fields are plain values; all operators return new fields.
struct VelocityField {
    TorusGrid grid;
    std::array<std::vector<std::complex<double>>, 2> comp;

    static VelocityField zero(const TorusGrid& g) {
        g.validate();
        VelocityField f;
        f.grid = g;
        f.comp[0].assign(g.size(), {0.0, 0.0});
        f.comp[1].assign(g.size(), {0.0, 0.0});
        return f;
    }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * grid.n + static_cast<std::size_t>(j);
    }
    std::complex<double>& at(int c, int i, int j) { return comp[c][index(i, j)]; }
    const std::complex<double>& at(int c, int i, int j) const { return comp[c][index(i, j)]; }

    VelocityField& operator+=(const VelocityField& o);
    VelocityField& operator-=(const VelocityField& o);
    VelocityField& operator*=(double a);
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double a, VelocityField f);

/// y += a x
void axpy(double a, const VelocityField& x, VelocityField& y);

/// Physical-space sampling of a field on the grid nodes.
struct PhysicalField {
    TorusGrid grid;
    std::array<std::vector<double>, 2> comp;
};

PhysicalField to_physical(const VelocityField& f);
VelocityField to_spectral(const PhysicalField& p);

/// L2 inner product (u, v) over the torus, via Parseval.
double inner_h(const VelocityField& u, const VelocityField& v);
double norm_h_sq(const VelocityField& u);
double norm_h(const VelocityField& u);

/// max_k |k . uhat(k)| / |uhat(k)| over modes carrying energy.
double max_divergence_ratio(const VelocityField& u);

/// Zeroes the k = 0 mode.
void remove_mean(VelocityField& u);
bool is_mean_zero(const VelocityField& u, double tol = 1e-12);

/// Taylor-Green vortex (sin x1 cos x2, -cos x1 sin x2) scaled on the grid's
/// fundamental wavenumber; normalized to ||g||_H = 1 when normalize is set.
VelocityField taylor_green(const TorusGrid& g, bool normalize = true, double amplitude = 1.0);

/// Same vortex with quarter-period phase offsets; independent of taylor_green
/// as an element of the discrete D(A).
VelocityField taylor_green_shifted(const TorusGrid& g, bool normalize = true);

/// Single real divergence-free mode: amplitude * (cos(k.x) direction), with
/// direction perpendicular to k = k_unit * (m1, m2).
VelocityField solenoidal_mode(const TorusGrid& g, int m1, int m2, double amplitude = 1.0);

struct RandomFieldOptions {
    double decay_power = 2.0;  ///< spectral amplitude ~ (1 + |k|)^(-decay_power)
    double target_norm_h = 1.0;///< rescale so ||u||_H equals this (0 = keep raw)
    bool mean_zero = true;
    bool solenoidal = true;    ///< apply the Leray projection
};

/// Deterministic random smooth field; a pure function of (grid, seed, opts).
VelocityField random_field(const TorusGrid& g, std::uint64_t seed,
                           const RandomFieldOptions& opts = {});

/// u = (d psi / d x2, -d psi / d x1) for spectral stream function psi.
VelocityField from_stream_function(const TorusGrid& g,
                                   const std::vector<std::complex<double>>& psi_hat);

/// Divergence-free bump localized at the cell center: perpendicular gradient
/// of a periodized Gaussian stream function of width w.
VelocityField gaussian_bump_field(const TorusGrid& g, double width, double amplitude = 1.0);

/// Pure gradient field i k phihat(k) from a random scalar potential (mean zero).
VelocityField gradient_field(const TorusGrid& g, std::uint64_t seed);

} // namespace cbf
