#include "cbf/field.hpp"

#include <cmath>

#include "cbf/fft.hpp"
#include "cbf/operators.hpp"
#include "cbf/rng.hpp"

namespace cbf {

namespace {

void check_same_grid(const VelocityField& a, const VelocityField& b, const char* what) {
    if (!(a.grid == b.grid)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

} // namespace

VelocityField& VelocityField::operator+=(const VelocityField& o) {
    check_same_grid(*this, o, "field +=");
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < comp[c].size(); ++i) comp[c][i] += o.comp[c][i];
    return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& o) {
    check_same_grid(*this, o, "field -=");
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < comp[c].size(); ++i) comp[c][i] -= o.comp[c][i];
    return *this;
}

VelocityField& VelocityField::operator*=(double a) {
    for (int c = 0; c < 2; ++c)
        for (auto& v : comp[c]) v *= a;
    return *this;
}

VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double a, VelocityField f) { return f *= a; }

void axpy(double a, const VelocityField& x, VelocityField& y) {
    check_same_grid(x, y, "axpy");
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < y.comp[c].size(); ++i) y.comp[c][i] += a * x.comp[c][i];
}

PhysicalField to_physical(const VelocityField& f) {
    PhysicalField p;
    p.grid = f.grid;
    for (int c = 0; c < 2; ++c) {
        auto scratch = f.comp[c];
        fft::backward(f.grid.n, scratch);
        p.comp[c].resize(scratch.size());
        for (std::size_t i = 0; i < scratch.size(); ++i) p.comp[c][i] = scratch[i].real();
    }
    return p;
}

VelocityField to_spectral(const PhysicalField& p) {
    VelocityField f = VelocityField::zero(p.grid);
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < p.comp[c].size(); ++i) f.comp[c][i] = p.comp[c][i];
        fft::forward(p.grid.n, f.comp[c]);
    }
    return f;
}

double inner_h(const VelocityField& u, const VelocityField& v) {
    check_same_grid(u, v, "inner_h");
    double acc = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < u.comp[c].size(); ++i)
            acc += u.comp[c][i].real() * v.comp[c][i].real() +
                   u.comp[c][i].imag() * v.comp[c][i].imag();
    const double l = u.grid.box_length;
    return l * l * acc;
}

double norm_h_sq(const VelocityField& u) { return inner_h(u, u); }
double norm_h(const VelocityField& u) { return std::sqrt(norm_h_sq(u)); }

double max_divergence_ratio(const VelocityField& u) {
    const int n = u.grid.n;
    const double ku = u.grid.k_unit();
    double amp_max = 0.0;
    for (int c = 0; c < 2; ++c)
        for (const auto& v : u.comp[c]) amp_max = std::max(amp_max, std::abs(v));
    if (amp_max == 0.0) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == 0 && j == 0) continue;
            const double k1 = ku * u.grid.mode(i);
            const double k2 = ku * u.grid.mode(j);
            const auto div = k1 * u.at(0, i, j) + k2 * u.at(1, i, j);
            const double amp = std::hypot(std::abs(u.at(0, i, j)), std::abs(u.at(1, i, j)));
            if (amp < 1e-14 * amp_max) continue;
            worst = std::max(worst, std::abs(div) / amp);
        }
    }
    return worst;
}

void remove_mean(VelocityField& u) {
    u.comp[0][0] = 0.0;
    u.comp[1][0] = 0.0;
}

bool is_mean_zero(const VelocityField& u, double tol) {
    return std::abs(u.comp[0][0]) <= tol && std::abs(u.comp[1][0]) <= tol;
}

VelocityField taylor_green(const TorusGrid& g, bool normalize, double amplitude) {
    // (sin x1 cos x2, -cos x1 sin x2): four spectral modes per component.
    VelocityField f = VelocityField::zero(g);
    const int n = g.n;
    const std::complex<double> I(0.0, 1.0);
    auto set = [&](int c, int m1, int m2, std::complex<double> v) {
        f.at(c, (m1 + n) % n, (m2 + n) % n) = v;
    };
    // sin a cos b = (e^{ia}+e^{-ia})(e^{ib}+e^{-ib}) expansion / (4i)...
    // carried out explicitly below.
    set(0, 1, 1, 0.25 / I);
    set(0, 1, -1, 0.25 / I);
    set(0, -1, 1, -0.25 / I);
    set(0, -1, -1, -0.25 / I);
    set(1, 1, 1, -0.25 / I);
    set(1, -1, 1, -0.25 / I);
    set(1, 1, -1, 0.25 / I);
    set(1, -1, -1, 0.25 / I);
    f *= amplitude;
    if (normalize) {
        const double nh = norm_h(f);
        if (nh > 0.0) f *= amplitude / nh;
    }
    return f;
}

VelocityField taylor_green_shifted(const TorusGrid& g, bool normalize) {
    // Same vortex translated by a quarter period in both directions:
    // multiply mode (m1, m2) by e^{i pi (m1 + m2) / 2}.
    VelocityField f = taylor_green(g, normalize);
    const int n = g.n;
    const std::complex<double> I(0.0, 1.0);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int m1 = g.mode(i);
                const int m2 = g.mode(j);
                f.at(c, i, j) *= std::exp(I * (std::numbers::pi * 0.5 * (m1 + m2)));
            }
    return f;
}

VelocityField solenoidal_mode(const TorusGrid& g, int m1, int m2, double amplitude) {
    g.validate();
    if (m1 == 0 && m2 == 0) throw InvalidArgument("solenoidal_mode: k = 0 is not solenoidal");
    VelocityField f = VelocityField::zero(g);
    const int n = g.n;
    const double norm = std::hypot(static_cast<double>(m1), static_cast<double>(m2));
    // direction perpendicular to k, so the mode is divergence-free exactly
    const double d1 = -m2 / norm;
    const double d2 = m1 / norm;
    const std::complex<double> half(0.5 * amplitude, 0.0);
    f.at(0, (m1 + n) % n, (m2 + n) % n) = half * d1;
    f.at(1, (m1 + n) % n, (m2 + n) % n) = half * d2;
    f.at(0, (-m1 + n) % n, (-m2 + n) % n) = half * d1;
    f.at(1, (-m1 + n) % n, (-m2 + n) % n) = half * d2;
    return f;
}

VelocityField random_field(const TorusGrid& g, std::uint64_t seed,
                           const RandomFieldOptions& opts) {
    g.validate();
    VelocityField f = VelocityField::zero(g);
    const int n = g.n;
    const int cut = g.dealias_limit();
    for (int c = 0; c < 2; ++c) {
        for (int m1 = -cut; m1 <= cut; ++m1) {
            for (int m2 = -cut; m2 <= cut; ++m2) {
                // fill one representative per conjugate pair
                if (m2 < 0 || (m2 == 0 && m1 < 0)) continue;
                const bool self = (m1 == 0 && m2 == 0);
                const std::uint64_t tag =
                    (static_cast<std::uint64_t>(c) << 32) ^
                    (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m1 + n)) << 16) ^
                    static_cast<std::uint64_t>(static_cast<std::uint32_t>(m2 + n));
                const std::uint64_t s = rng::substream(seed, tag);
                const double amp =
                    std::pow(1.0 + std::hypot(double(m1), double(m2)), -opts.decay_power);
                const double re = amp * rng::gaussian(s, 0);
                const double im = self ? 0.0 : amp * rng::gaussian(s, 1);
                f.at(c, (m1 + n) % n, (m2 + n) % n) = {re, im};
                if (!self) f.at(c, (-m1 + n) % n, (-m2 + n) % n) = {re, -im};
            }
        }
    }
    if (opts.mean_zero) remove_mean(f);
    if (opts.solenoidal) f = leray_project(f);
    if (opts.target_norm_h > 0.0) {
        const double nh = norm_h(f);
        if (nh > 0.0) f *= opts.target_norm_h / nh;
    }
    return f;
}

VelocityField from_stream_function(const TorusGrid& g,
                                   const std::vector<std::complex<double>>& psi_hat) {
    if (psi_hat.size() != g.size()) throw InvalidArgument("from_stream_function: size mismatch");
    VelocityField f = VelocityField::zero(g);
    const int n = g.n;
    const double ku = g.k_unit();
    const std::complex<double> I(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k1 = ku * g.mode(i);
            const double k2 = ku * g.mode(j);
            const auto psi = psi_hat[f.index(i, j)];
            f.at(0, i, j) = I * k2 * psi;
            f.at(1, i, j) = -I * k1 * psi;
        }
    return f;
}

VelocityField gaussian_bump_field(const TorusGrid& g, double width, double amplitude) {
    g.validate();
    if (!(width > 0.0)) throw InvalidArgument("gaussian_bump_field: width must be positive");
    const int n = g.n;
    const double l = g.box_length;
    std::vector<std::complex<double>> psi(g.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // coordinates wrapped to [-L/2, L/2), bump centered at the origin
            double x1 = i * g.dx();
            double x2 = j * g.dx();
            if (x1 >= 0.5 * l) x1 -= l;
            if (x2 >= 0.5 * l) x2 -= l;
            const double r2 = x1 * x1 + x2 * x2;
            psi[static_cast<std::size_t>(i) * n + j] =
                amplitude * std::exp(-0.5 * r2 / (width * width));
        }
    fft::forward(n, psi);
    return from_stream_function(g, psi);
}

VelocityField gradient_field(const TorusGrid& g, std::uint64_t seed) {
    g.validate();
    const int n = g.n;
    std::vector<std::complex<double>> phi(g.size(), {0.0, 0.0});
    const int cut = g.dealias_limit();
    for (int m1 = -cut; m1 <= cut; ++m1)
        for (int m2 = -cut; m2 <= cut; ++m2) {
            if (m2 < 0 || (m2 == 0 && m1 <= 0)) continue;
            const std::uint64_t tag =
                (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m1 + n)) << 16) ^
                static_cast<std::uint64_t>(static_cast<std::uint32_t>(m2 + n));
            const std::uint64_t s = rng::substream(seed, tag);
            const double amp = std::pow(1.0 + std::hypot(double(m1), double(m2)), -2.0);
            const std::complex<double> v(amp * rng::gaussian(s, 0), amp * rng::gaussian(s, 1));
            phi[static_cast<std::size_t>((m1 + n) % n) * n + (m2 + n) % n] = v;
            phi[static_cast<std::size_t>((-m1 + n) % n) * n + (-m2 + n) % n] = std::conj(v);
        }
    VelocityField f = VelocityField::zero(g);
    const double ku = g.k_unit();
    const std::complex<double> I(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k1 = ku * g.mode(i);
            const double k2 = ku * g.mode(j);
            const auto p = phi[f.index(i, j)];
            f.at(0, i, j) = I * k1 * p;
            f.at(1, i, j) = I * k2 * p;
        }
    return f;
}

} // namespace cbf
