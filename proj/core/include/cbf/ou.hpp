#pragma once

#include <string>
#include <vector>

#include "cbf/wiener.hpp"

namespace cbf {

/// Time-stamped scalar series (colored noise, OU values, running integrals).
struct ScalarProcessTrace {
    enum class Label { Z_delta, y, z_delta, integral_Z };
    Label label = Label::y;
    std::vector<double> times;
    std::vector<double> values;
};

/// OU process y driven by the raw increments, started from 0 at t_min.
/// Node recursion y_{i+1} = e^{-ell h} y_i + dw_i; the infinite history is
/// truncated at t_min with error bounded by e^{-ell (t - t_min)} |y(t_min)|.
double ou_y(const WienerPath& path, double ell, double t);

/// OU process z_delta driven by the colored noise, started from 0 at t_min.
/// Exponential integrator, exact for the piecewise-linear forcing.
double ou_z(const WienerPath& path, double ell, double delta, double t);

/// Truncation bound e^{-ell (t - t_min)} for the finite-window OU integrals.
double ou_truncation_bound(const WienerPath& path, double ell, double t);

/// Node-table form of ou_y with O(1) evaluation.
class OuTable {
public:
    OuTable(const WienerPath& path, double ell);
    double eval(double t) const;
    double ell() const { return ell_; }
    bool truncation_warning(double t) const {
        return ou_truncation_bound(*path_, ell_, t) > 1e-6;
    }
    ScalarProcessTrace trace(double t0, double t1) const;

private:
    const WienerPath* path_;
    double ell_;
    std::vector<double> values_;
};

/// Node-table form of ou_z with O(1) evaluation; defined up to t_max - delta.
class OuZTable {
public:
    OuZTable(const WienerPath& path, double ell, double delta);
    double eval(double t) const;
    double ell() const { return ell_; }
    double delta() const { return delta_; }
    double t_sup() const;
    ScalarProcessTrace trace(double t0, double t1) const;

private:
    const WienerPath* path_;
    double ell_;
    double delta_;
    std::size_t lookahead_;
    std::vector<double> values_;

    double forcing(std::size_t node) const;
};

/// One row per correlation time: finite-window surrogates of the colored
/// noise limit relations on [s, s+T].
struct NoiseDiagnosticsRow {
    double delta = 0.0;
    double sup_wz_error = 0.0; ///< sup_t |int_0^t Z_delta - omega(t)|
    double sup_zy_error = 0.0; ///< sup_t |z_delta - y|
    double ergodic_mean = 0.0; ///< |(1/T) int_0^T Z_delta|
    double growth_ratio = 0.0; ///< max_t |Z_delta| / (1 + |t|)
};

struct NoiseDiagnosticsReport {
    double s = 0.0;
    double T = 0.0;
    bool ou_truncation_warning = false;
    std::vector<NoiseDiagnosticsRow> rows;

    std::string to_csv() const;
};

NoiseDiagnosticsReport noise_diagnostics(const WienerPath& path, const NoiseParams& params,
                                         double s, double T,
                                         const std::vector<double>& delta_list);

} // namespace cbf
