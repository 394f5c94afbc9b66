#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cbf/errors.hpp"

namespace cbf {

/// Noise coefficients shared by the colored-noise and OU machinery.
struct NoiseParams {
    double delta = 0.1; ///< correlation time, in (0, 1]
    double ell = 1.0;   ///< OU rate, > 0
    double sigma = 0.0; ///< exponential modulation exponent, >= 0
    double kappa = 0.0; ///< linear diffusion gain, >= 0

    void validate() const;
};

/// A two-sided sample path on a uniform grid with a pinned zero at t = 0.
///
/// Increments between nodes are i.i.d. N(0, h) drawn from a counter-based
/// generator, so the path is a pure function of (seed, t_min, t_max, h).
/// Evaluation between nodes is piecewise linear. Immutable after
/// construction; evaluators are safe to call concurrently.
class WienerPath {
public:
    static WienerPath sample(std::uint64_t seed, double t_min, double t_max, double h);

    /// Deterministic path with node values f(t_i) - f(0). Used for analytic
    /// test paths (parabola, linear ramp, zero).
    static WienerPath from_function(const std::function<double(double)>& f,
                                    double t_min, double t_max, double h);

    double t_min() const { return t_min_; }
    double t_max() const { return t_min_ + static_cast<double>(node_count() - 1) * h_; }
    double step() const { return h_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t node_count() const { return samples_.size(); }
    std::size_t zero_index() const { return zero_index_; }
    double node_time(std::size_t i) const { return t_min_ + static_cast<double>(i) * h_; }
    const std::vector<double>& samples() const { return samples_; }

    /// Piecewise-linear evaluation; throws RangeError outside [t_min, t_max].
    double eval(double t) const;

    /// Materializes the shifted path omega(. + c) - omega(c) on the common grid.
    /// c must lie on the node lattice.
    WienerPath shifted(double c) const;

    /// Index of the last node with node_time <= t (within grid tolerance).
    std::size_t floor_index(double t) const;

private:
    WienerPath() = default;

    std::uint64_t seed_ = 0;
    double t_min_ = 0.0;
    double h_ = 0.0;
    std::size_t zero_index_ = 0;
    std::vector<double> samples_;
};

/// omega(t) by piecewise-linear interpolation.
double eval_omega(const WienerPath& path, double t);

/// Colored noise Z_delta at shift t: (omega(t + delta) - omega(t)) / delta.
/// delta must be a positive integer multiple of the path step.
double colored_noise(const WienerPath& path, double delta, double t);

/// Integral of the colored noise from 0 to t (t of either sign); composite
/// trapezoid on the node grid, exact for the piecewise-linear integrand.
double integral_colored(const WienerPath& path, double delta, double t);

/// Precomputed cumulative integral of Z_delta from 0 to every node; eval is
/// O(1) and agrees with integral_colored to roundoff.
class ColoredIntegralTable {
public:
    ColoredIntegralTable(const WienerPath& path, double delta);

    double eval(double t) const;
    double delta() const { return delta_; }
    /// Largest time at which Z_delta (and hence the integral) is defined.
    double t_sup() const;

private:
    const WienerPath* path_;
    double delta_;
    std::size_t lookahead_;          // delta / h
    std::vector<double> cumulative_; // integral from 0 to node i
};

namespace detail {
/// Validates that x is a positive integer multiple of h; returns the multiple.
std::size_t integer_multiple(double x, double h, const std::string& what);
} // namespace detail

} // namespace cbf
