#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/field.hpp"

namespace cbf {

/// Nonlinear diffusion term S(t, x, u). All variants of the form
/// e^{sigma t} [kappa u + S_inner(u) + h] share the structural fields; the
/// pointwise-growth variant (ndt3) carries scalar envelopes and an exponent.
/// Terms are immutable after construction; eval is pure and thread-safe.
class DiffusionTerm {
public:
    enum class Variant { zero, constant_g, linear_u, ndt1_example, ndt2_example, ndt3_example };

    static DiffusionTerm zero(const TorusGrid& g);
    /// S = e^{sigma t} g, no state dependence (the additive-noise profile).
    static DiffusionTerm constant_profile(VelocityField g, double sigma);
    /// S = u (linear multiplicative coupling).
    static DiffusionTerm linear(const TorusGrid& g);
    /// S = e^{sigma t} [kappa u + sin u + B(g1, u) + h], sin componentwise.
    static DiffusionTerm ndt1(VelocityField g1, VelocityField h, double kappa, double sigma);
    /// S = e^{sigma t} [kappa u + B(g2, u) + h].
    static DiffusionTerm ndt2(VelocityField g2, VelocityField h, double kappa, double sigma);
    /// S = S1(x) |u|^{q-2} u + S2(x) e1, bounded by S1 |u|^{q-1} + S2 pointwise.
    static DiffusionTerm ndt3(const TorusGrid& g, std::vector<double> s1_field,
                              std::vector<double> s2_field, double q);

    Variant variant() const { return variant_; }
    const TorusGrid& grid() const { return grid_; }
    double kappa() const { return kappa_; }
    double sigma() const { return sigma_; }
    double q() const { return q_; }
    const VelocityField& profile() const { return g_; }
    const VelocityField& offset() const { return h_; }
    const std::vector<double>& s1_field() const { return s1_field_; }
    const std::vector<double>& s2_field() const { return s2_field_; }

    /// Full term S(t, x, u), Leray-projected (the form entering the equation).
    VelocityField eval(double t, const VelocityField& u) const;

    /// The nonlinear part S_inner(u) alone (no kappa u, no offset, no e^{sigma t});
    /// this is the object the bound conditions constrain. Projected.
    VelocityField eval_inner(const VelocityField& u) const;

    /// Physical-space samples of S(t, x, u) before projection, for pointwise checks.
    PhysicalField eval_pointwise(double t, const VelocityField& u) const;

    /// True when S(t, x, 0) = 0, so u = 0 is an equilibrium of the forced-free system.
    bool vanishes_at_zero() const;

    static std::string variant_name(Variant v);

private:
    DiffusionTerm() = default;

    Variant variant_ = Variant::zero;
    TorusGrid grid_;
    double kappa_ = 0.0;
    double sigma_ = 0.0;
    double q_ = 2.0;
    VelocityField g_;
    VelocityField h_;
    std::vector<double> s1_field_;
    std::vector<double> s2_field_;
};

enum class AssumptionId { S1_orth, S2_lip, S3_weak, S4_growth, GS1_bound };

std::string assumption_name(AssumptionId id);

/// Fitted growth envelope |(S_inner(u), u)| <= s3 + s4 ||u||_V^{1+s5}.
struct S4Fit {
    double s3 = 0.0;
    double s4 = 0.0;
    double s5 = 0.0;
};

struct AssumptionReport {
    AssumptionId condition = AssumptionId::S1_orth;
    double empirical_constant = 0.0;
    int samples = 0;
    bool pass = false;
    /// Constant moved by less than 25% when the sample count was doubled.
    bool stable = false;
    S4Fit fit; ///< populated for S4_growth only
};

/// Samples random fields and computes the tight empirical constant for the
/// requested condition. Throws InvalidArgument when the variant does not
/// support the condition.
AssumptionReport validate_assumption(const DiffusionTerm& term, AssumptionId id, int samples,
                                     std::uint64_t seed);

/// Empirical local Lipschitz constant of u -> S(t,.,u) in H over fields with
/// sup-norm at most radius.
double empirical_local_lipschitz(const DiffusionTerm& term, double radius, int samples,
                                 std::uint64_t seed);

std::string assumption_reports_to_csv(const std::vector<AssumptionReport>& reports);

} // namespace cbf
