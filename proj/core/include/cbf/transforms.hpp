#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cbf/dynamics.hpp"
#include "cbf/ou.hpp"

namespace cbf {

/// Additive-noise data: smooth solenoidal profile g in the discrete domain of
/// A, modulation exponent sigma, OU rate ell.
struct AdditiveProfile {
    VelocityField g;
    double sigma = 0.0;
    double ell = 1.0;

    void validate() const;
};

enum class TransformMode { additive_white, additive_wz, multiplicative_white, multiplicative_wz };

std::string transform_mode_name(TransformMode mode);

/// Scalar OU factor for the additive transformation: y (white) or z_delta
/// (Wong-Zakai), evaluated at base time t + shift. Copyable; the node tables
/// are shared and immutable.
class AdditiveNoise {
public:
    static AdditiveNoise white(const WienerPath& path, double ell, double shift = 0.0);
    static AdditiveNoise wz(const WienerPath& path, double ell, double delta, double shift = 0.0);
    static AdditiveNoise none(); ///< identically zero factor

    double eval(double t) const;
    bool is_wz() const { return z_ != nullptr; }
    double delta() const { return delta_; }
    double shift() const { return shift_; }

private:
    std::shared_ptr<OuTable> y_;
    std::shared_ptr<OuZTable> z_;
    double delta_ = 0.0;
    double shift_ = 0.0;
};

/// Scalar exponent for the multiplicative transformation: omega(t) (white) or
/// the running integral of Z_delta (Wong-Zakai), both composed with a Wiener
/// shift so that eval(t) is the exponent of the shifted-path system.
class MultiplicativeNoise {
public:
    static MultiplicativeNoise white(const WienerPath& path, double shift = 0.0);
    static MultiplicativeNoise wz(const WienerPath& path, double delta, double shift = 0.0);
    static MultiplicativeNoise none();

    double eval(double t) const;
    bool is_wz() const { return table_ != nullptr; }
    double delta() const { return delta_; }

private:
    const WienerPath* path_ = nullptr;
    std::shared_ptr<ColoredIntegralTable> table_;
    double delta_ = 0.0;
    double shift_ = 0.0;
};

/// Transformed state v at time t, tagged with the transformation it belongs to.
struct TransformedState {
    VelocityField v;
    double t = 0.0;
    TransformMode mode = TransformMode::additive_white;
    double delta = 0.0;
};

/// v = u - e^{sigma t} g * (y or z_delta)(t).
TransformedState to_v_additive(const VelocityField& u, double t, const AdditiveNoise& noise,
                               const AdditiveProfile& profile, TransformMode mode);

/// v = e^{-W(t)} u for the multiplicative exponent W.
TransformedState to_v_multiplicative(const VelocityField& u, double t,
                                     const MultiplicativeNoise& noise, TransformMode mode);

/// Exact inverse of the transformation at state.t; throws on mode mismatch.
VelocityField reconstruct_u(const TransformedState& state, const AdditiveNoise& noise,
                            const AdditiveProfile& profile);
VelocityField reconstruct_u(const TransformedState& state, const MultiplicativeNoise& noise);

/// One exponential-IMEX step of the transformed additive system
/// dv/dt + mu A v + B(v + e^{sigma t} g q) + alpha v + beta C(v + e^{sigma t} g q)
///   = f + (ell - sigma - alpha) e^{sigma t} g q - mu e^{sigma t} q A g,
/// with q = y (white) or z_delta (Wong-Zakai).
TransformedState step_cscbf_add(const TransformedState& state, const CBFParams& params,
                                const ForcingSpec& forcing, const AdditiveNoise& noise,
                                const AdditiveProfile& profile, double dt);

/// One step of the multiplicative system
/// dv/dt + mu A v + e^{W} B(v) + alpha v + beta e^{(r-1) W} C(v) = e^{-W} f,
/// with the scalar coefficients frozen at the step midpoint. Aborts when
/// |W| > 30 (coefficient overflow guard).
TransformedState step_cscbf_multi(const TransformedState& state, const CBFParams& params,
                                  const ForcingSpec& forcing, const MultiplicativeNoise& noise,
                                  double dt);

/// Trajectory of a transformed system with the generic energy ledger
/// ||v||^2 + 2 mu int ||grad v||^2 + 2 alpha int ||v||^2 = ||v_s||^2 + 2 int (N, v).
struct VTrajectory {
    double mu = 0.0;
    double alpha = 0.0;
    std::vector<double> times;
    std::vector<double> h_norm2;
    std::vector<double> work_n;
    std::vector<double> int_h;
    std::vector<double> int_grad;
    std::vector<double> int_work;
    VelocityField final_state;

    EnergyResidual residual() const;
};

VTrajectory integrate_cscbf_add(const CBFParams& params, const ForcingSpec& forcing,
                                const AdditiveNoise& noise, const AdditiveProfile& profile,
                                double s, double T, const VelocityField& v_s,
                                const StepperConfig& config);

VTrajectory integrate_cscbf_multi(const CBFParams& params, const ForcingSpec& forcing,
                                  const MultiplicativeNoise& noise, double s, double T,
                                  const VelocityField& v_s, const StepperConfig& config);

/// u(s + T) for the white system via the v-route, starting from u_s at s.
VelocityField solve_additive_u(const CBFParams& params, const ForcingSpec& forcing,
                               const AdditiveNoise& noise, const AdditiveProfile& profile,
                               double s, double T, const VelocityField& u_s,
                               const StepperConfig& config);

VelocityField solve_multiplicative_u(const CBFParams& params, const ForcingSpec& forcing,
                                     const MultiplicativeNoise& noise, double s, double T,
                                     const VelocityField& u_s, const StepperConfig& config);

struct ConvergenceRow {
    double delta = 0.0;
    double error_h = 0.0;
    double ratio_to_previous = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows; ///< sorted by decreasing delta
    std::string to_csv() const;
};

enum class NoiseStructure { additive, multiplicative };

/// For each delta: ||u_delta(s+T) - u(s+T)||_H between the Wong-Zakai and
/// white solutions sharing the initial state and the path.
ConvergenceTable wz_solution_convergence(NoiseStructure mode, const std::vector<double>& deltas,
                                         const WienerPath& path, const CBFParams& params,
                                         const ForcingSpec& forcing,
                                         const AdditiveProfile& profile, double s, double T,
                                         const VelocityField& u_s, const StepperConfig& config);

/// Best empirical constant in |b(u, g, u)| <= c ||u||_H^2 for the given g;
/// diagnostic only, the transformed systems never require it.
double estimate_b_constant(const VelocityField& g, int samples, std::uint64_t seed);

} // namespace cbf
