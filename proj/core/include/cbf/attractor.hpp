#pragma once

#include <string>
#include <vector>

#include "cbf/transforms.hpp"

namespace cbf {

/// Pullback experiment plan: anchor time, increasing pullback depths, and the
/// family of initial fields (tempered at the experiment's scale by fiat).
struct PullbackSchedule {
    double s = 0.0;
    std::vector<double> t_list;
    std::vector<VelocityField> ic_family;

    void validate() const;
};

struct EndpointMeta {
    double depth = 0.0;
    int ic_index = 0;
    double delta = 0.0; ///< 0 for white-noise systems
    bool inside_ball = false;
};

/// Endpoints u(s, s - t, theta_{-s} omega, u0) with their provenance.
struct EndpointEnsemble {
    std::vector<VelocityField> states;
    std::vector<EndpointMeta> meta;

    std::string to_csv() const;
};

/// sup_{a in A} inf_{b in B} ||a - b||_H; exact over the finite ensembles.
double hausdorff_semidist(const EndpointEnsemble& a, const EndpointEnsemble& b);

/// Smooth radial cutoff: 0 on [0, 1], 1 on [2, inf), quintic smoothstep in
/// between (C^2, monotone; |psi'| <= 15/8).
struct TailCutoff {
    double k = 1.0;

    double psi(double sigma) const;
    static double max_slope() { return 15.0 / 8.0; }
};

/// Weighted energy int psi(|x|^2 / k^2) |u|^2 dx in torus-centered coordinates.
/// Requires 2k < L/2 so the cutoff annulus fits the fundamental cell.
double tail_mass(const VelocityField& u, const TailCutoff& cutoff);

/// Unit-weight variant: the plain energy quadrature.
double tail_mass(const VelocityField& u);

/// Radius value together with the reported truncation estimate of the
/// dropped tail of the window quadrature.
struct RadiusResult {
    double value = 0.0;
    double truncation_bound = 0.0;
};

enum class RadiusMode { white, wz };

/// Absorbing radius for the general Wong-Zakai system: quadrature of the
/// exponential-weight integrals with s6 = 2 ||h||^2_H / alpha and
/// s7 = s4 (1 - s5) [4 s4 (1 + s5) / min(mu, alpha)]^{(1+s5)/(1-s5)}.
/// Throws DiagnosticFailure when the weight exponent fails to decay.
RadiusResult absorbing_radius_wz(const CBFParams& params, const NoiseParams& noise,
                                 const WienerPath& path, const S4Fit& fit, double h_norm_sq,
                                 const ForcingSpec& forcing, double s, double window);

/// Additive-case radius. The 2D form carries the |.|^{2(r+1)/(r-1)} term and
/// requires r > 1; the alternate form drops it. The proof-constant prefactor
/// is exposed as `r_const` (default 1; radii are used as relative
/// diagnostics, which that choice does not affect).
struct AdditiveRadiusSpec {
    CBFParams params;
    AdditiveProfile profile;
    ForcingSpec forcing;
    double s = 0.0;
    double window = 20.0;
    double r_const = 1.0;
    bool alternate_form = false; ///< the r >= 3 variant without the last term
};

RadiusResult absorbing_radius_additive(const AdditiveRadiusSpec& spec, const WienerPath& path,
                                       RadiusMode mode, double delta);

RadiusResult absorbing_radius_multiplicative(const CBFParams& params, const ForcingSpec& forcing,
                                             const WienerPath& path, double s, RadiusMode mode,
                                             double delta, double window);

/// Which dynamics a pullback experiment integrates.
struct PullbackSystem {
    enum class Kind { wz_general, additive, multiplicative };
    Kind kind = Kind::wz_general;
    CBFParams params;
    DiffusionTerm term = DiffusionTerm::zero(TorusGrid{});
    ForcingSpec forcing = ForcingSpec::zero(TorusGrid{});
    AdditiveProfile profile; ///< additive kind only
    RadiusMode mode = RadiusMode::wz;
    double delta = 0.1; ///< wz modes only
};

struct PullbackOptions {
    StepperConfig stepper;
    int threads = 1;
    double ball_radius_sq = 0.0; ///< when > 0, endpoints are flagged against it
};

/// Endpoints u(s, s - t, theta_{-s} omega, u0) for every (depth, IC) pair.
EndpointEnsemble pullback_run(const PullbackSchedule& schedule, const PullbackSystem& system,
                              const WienerPath& path, const PullbackOptions& options);

struct UscRow {
    double delta = 0.0;
    double dist = 0.0;
    double ratio_to_previous = 0.0;
};

struct UscResult {
    std::vector<UscRow> rows;
    double depth_drift = 0.0; ///< relative endpoint drift between the two deepest depths
    bool depth_converged = false;

    std::string to_csv() const;
};

/// Hausdorff semidistance between the deepest-pullback ensembles of the
/// Wong-Zakai systems and the white-noise system, per delta. The surrogate is
/// gated on endpoint drift < drift_tol between the two deepest depths.
UscResult usc_experiment(NoiseStructure mode, const std::vector<double>& deltas,
                         const PullbackSchedule& schedule, const PullbackSystem& base,
                         const WienerPath& path, const PullbackOptions& options,
                         double drift_tol = 0.01);

} // namespace cbf
