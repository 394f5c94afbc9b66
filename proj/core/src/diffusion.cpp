#include "cbf/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "cbf/csv.hpp"
#include "cbf/operators.hpp"
#include "cbf/rng.hpp"

namespace cbf {

namespace {

VelocityField sin_componentwise(const VelocityField& u) {
    PhysicalField p = to_physical(u);
    for (int c = 0; c < 2; ++c)
        for (auto& v : p.comp[c]) v = std::sin(v);
    return to_spectral(p);
}

void check_grid(const DiffusionTerm& term, const VelocityField& u) {
    if (!(term.grid() == u.grid)) throw InvalidArgument("DiffusionTerm: grid mismatch");
}

} // namespace

DiffusionTerm DiffusionTerm::zero(const TorusGrid& g) {
    DiffusionTerm t;
    t.variant_ = Variant::zero;
    t.grid_ = g;
    return t;
}

DiffusionTerm DiffusionTerm::constant_profile(VelocityField g, double sigma) {
    DiffusionTerm t;
    t.variant_ = Variant::constant_g;
    t.grid_ = g.grid;
    t.sigma_ = sigma;
    t.g_ = std::move(g);
    return t;
}

DiffusionTerm DiffusionTerm::linear(const TorusGrid& g) {
    DiffusionTerm t;
    t.variant_ = Variant::linear_u;
    t.grid_ = g;
    return t;
}

DiffusionTerm DiffusionTerm::ndt1(VelocityField g1, VelocityField h, double kappa, double sigma) {
    if (!(g1.grid == h.grid)) throw InvalidArgument("ndt1: profile/offset grid mismatch");
    if (kappa < 0.0 || sigma < 0.0) throw InvalidArgument("ndt1: kappa, sigma must be >= 0");
    DiffusionTerm t;
    t.variant_ = Variant::ndt1_example;
    t.grid_ = g1.grid;
    t.kappa_ = kappa;
    t.sigma_ = sigma;
    t.g_ = std::move(g1);
    t.h_ = std::move(h);
    return t;
}

DiffusionTerm DiffusionTerm::ndt2(VelocityField g2, VelocityField h, double kappa, double sigma) {
    DiffusionTerm t = ndt1(std::move(g2), std::move(h), kappa, sigma);
    t.variant_ = Variant::ndt2_example;
    return t;
}

DiffusionTerm DiffusionTerm::ndt3(const TorusGrid& g, std::vector<double> s1_field,
                                  std::vector<double> s2_field, double q) {
    g.validate();
    if (s1_field.size() != g.size() || s2_field.size() != g.size())
        throw InvalidArgument("ndt3: envelope size mismatch");
    if (!(q >= 2.0)) throw InvalidArgument("ndt3: q must be >= 2 for a locally Lipschitz term");
    for (double v : s1_field)
        if (v < 0.0) throw InvalidArgument("ndt3: S1 must be nonnegative");
    for (double v : s2_field)
        if (v < 0.0) throw InvalidArgument("ndt3: S2 must be nonnegative");
    DiffusionTerm t;
    t.variant_ = Variant::ndt3_example;
    t.grid_ = g;
    t.q_ = q;
    t.s1_field_ = std::move(s1_field);
    t.s2_field_ = std::move(s2_field);
    return t;
}

bool DiffusionTerm::vanishes_at_zero() const {
    switch (variant_) {
    case Variant::zero:
    case Variant::linear_u:
        return true;
    case Variant::constant_g:
        return false;
    case Variant::ndt1_example:
    case Variant::ndt2_example:
        return norm_h_sq(h_) == 0.0;
    case Variant::ndt3_example:
        return std::all_of(s2_field_.begin(), s2_field_.end(), [](double v) { return v == 0.0; });
    }
    return false;
}

VelocityField DiffusionTerm::eval_inner(const VelocityField& u) const {
    check_grid(*this, u);
    switch (variant_) {
    case Variant::zero:
    case Variant::constant_g:
    case Variant::linear_u:
        return VelocityField::zero(grid_);
    case Variant::ndt1_example:
        return leray_project(sin_componentwise(u)) + bilinear_B(g_, u);
    case Variant::ndt2_example:
        return bilinear_B(g_, u);
    case Variant::ndt3_example: {
        PhysicalField p = eval_pointwise(0.0, u);
        return leray_project(to_spectral(p));
    }
    }
    return VelocityField::zero(grid_);
}

PhysicalField DiffusionTerm::eval_pointwise(double t, const VelocityField& u) const {
    check_grid(*this, u);
    PhysicalField up = to_physical(u);
    PhysicalField out;
    out.grid = grid_;
    out.comp[0].assign(grid_.size(), 0.0);
    out.comp[1].assign(grid_.size(), 0.0);
    const double mod = std::exp(sigma_ * t);

    switch (variant_) {
    case Variant::zero:
        break;
    case Variant::linear_u:
        out = up;
        break;
    case Variant::constant_g: {
        PhysicalField gp = to_physical(g_);
        for (int c = 0; c < 2; ++c)
            for (std::size_t x = 0; x < out.comp[c].size(); ++x)
                out.comp[c][x] = mod * gp.comp[c][x];
        break;
    }
    case Variant::ndt1_example:
    case Variant::ndt2_example: {
        PhysicalField bp = to_physical(bilinear_B(g_, u));
        PhysicalField hp = to_physical(h_);
        for (int c = 0; c < 2; ++c)
            for (std::size_t x = 0; x < out.comp[c].size(); ++x) {
                double inner = bp.comp[c][x];
                if (variant_ == Variant::ndt1_example) inner += std::sin(up.comp[c][x]);
                out.comp[c][x] = mod * (kappa_ * up.comp[c][x] + inner + hp.comp[c][x]);
            }
        break;
    }
    case Variant::ndt3_example: {
        for (std::size_t x = 0; x < out.comp[0].size(); ++x) {
            const double mag = std::hypot(up.comp[0][x], up.comp[1][x]);
            const double factor = (q_ == 2.0) ? 1.0 : (mag == 0.0 ? 0.0 : std::pow(mag, q_ - 2.0));
            out.comp[0][x] = s1_field_[x] * factor * up.comp[0][x] + s2_field_[x];
            out.comp[1][x] = s1_field_[x] * factor * up.comp[1][x];
        }
        break;
    }
    }
    return out;
}

VelocityField DiffusionTerm::eval(double t, const VelocityField& u) const {
    check_grid(*this, u);
    const double mod = std::exp(sigma_ * t);
    switch (variant_) {
    case Variant::zero:
        return VelocityField::zero(grid_);
    case Variant::linear_u:
        return u;
    case Variant::constant_g:
        return mod * g_;
    case Variant::ndt1_example:
    case Variant::ndt2_example: {
        VelocityField s = eval_inner(u);
        axpy(kappa_, u, s);
        s += leray_project(h_);
        return mod * std::move(s);
    }
    case Variant::ndt3_example:
        return eval_inner(u);
    }
    return VelocityField::zero(grid_);
}

std::string DiffusionTerm::variant_name(Variant v) {
    switch (v) {
    case Variant::zero: return "zero";
    case Variant::constant_g: return "constant_g";
    case Variant::linear_u: return "linear_u";
    case Variant::ndt1_example: return "ndt1_example";
    case Variant::ndt2_example: return "ndt2_example";
    case Variant::ndt3_example: return "ndt3_example";
    }
    return "unknown";
}

std::string assumption_name(AssumptionId id) {
    switch (id) {
    case AssumptionId::S1_orth: return "S1_orth";
    case AssumptionId::S2_lip: return "S2_lip";
    case AssumptionId::S3_weak: return "S3_weak";
    case AssumptionId::S4_growth: return "S4_growth";
    case AssumptionId::GS1_bound: return "GS1_bound";
    }
    return "unknown";
}

namespace {

VelocityField sample_field(const TorusGrid& g, std::uint64_t seed, int i) {
    RandomFieldOptions opts;
    opts.target_norm_h = 0.25 * std::pow(2.0, i % 5); // spread of amplitudes
    return random_field(g, rng::substream(seed, static_cast<std::uint64_t>(i)), opts);
}

double constant_for(const DiffusionTerm& term, AssumptionId id, int samples,
                    std::uint64_t seed, S4Fit* fit) {
    const TorusGrid& g = term.grid();
    double worst = 0.0;

    switch (id) {
    case AssumptionId::S1_orth: {
        for (int i = 0; i < samples; ++i) {
            const VelocityField u = sample_field(g, seed, i);
            const double num = std::abs(inner_h(term.eval_inner(u), u));
            worst = std::max(worst, num / norms(u).v_norm2);
        }
        return worst;
    }
    case AssumptionId::S2_lip: {
        for (int i = 0; i < samples; ++i) {
            const VelocityField u = sample_field(g, seed, 2 * i);
            const VelocityField v = sample_field(g, seed, 2 * i + 1);
            const double den = std::sqrt(norms(u - v).v_norm2);
            if (den == 0.0) continue;
            worst = std::max(worst, norm_h(term.eval_inner(u) - term.eval_inner(v)) / den);
        }
        return worst;
    }
    case AssumptionId::S3_weak: {
        for (int i = 0; i < samples; ++i) {
            const VelocityField u = sample_field(g, seed, 3 * i);
            const VelocityField v = sample_field(g, seed, 3 * i + 1);
            const VelocityField w = sample_field(g, seed, 3 * i + 2);
            const double den = norm_h(u - v) * std::sqrt(norms(w).v_norm2);
            if (den == 0.0) continue;
            const double num = std::abs(inner_h(term.eval_inner(u) - term.eval_inner(v), w));
            worst = std::max(worst, num / den);
        }
        return worst;
    }
    case AssumptionId::S4_growth: {
        // s5 = 0 envelope: |(S(u), u)| <= s3 + s4 ||u||_V with s3 = s4 set to
        // the worst ratio against 1 + ||u||_V.
        double ratio = 0.0;
        for (int i = 0; i < samples; ++i) {
            const VelocityField u = sample_field(g, seed, i);
            const double y = std::abs(inner_h(term.eval_inner(u), u));
            const double x = std::sqrt(norms(u).v_norm2);
            ratio = std::max(ratio, y / (1.0 + x));
        }
        if (fit) {
            fit->s3 = ratio;
            fit->s4 = ratio;
            fit->s5 = 0.0;
        }
        return ratio;
    }
    case AssumptionId::GS1_bound: {
        // largest pointwise excess of |S| over S1 |u|^{q-1} + S2 (negative slack
        // clipped at 0); exact-by-construction variants report 0.
        for (int i = 0; i < samples; ++i) {
            const VelocityField u = sample_field(g, seed, i);
            const PhysicalField sp = term.eval_pointwise(0.0, u);
            const PhysicalField up = to_physical(u);
            for (std::size_t x = 0; x < sp.comp[0].size(); ++x) {
                const double mag_s = std::hypot(sp.comp[0][x], sp.comp[1][x]);
                const double mag_u = std::hypot(up.comp[0][x], up.comp[1][x]);
                const double bound = term.s1_field()[x] * std::pow(mag_u, term.q() - 1.0) +
                                     term.s2_field()[x];
                worst = std::max(worst, mag_s - bound);
            }
        }
        return std::max(worst, 0.0);
    }
    }
    return worst;
}

} // namespace

AssumptionReport validate_assumption(const DiffusionTerm& term, AssumptionId id, int samples,
                                     std::uint64_t seed) {
    using V = DiffusionTerm::Variant;
    const V v = term.variant();
    const bool structural = v == V::ndt1_example || v == V::ndt2_example || v == V::zero ||
                            v == V::constant_g || v == V::linear_u;
    if (id == AssumptionId::GS1_bound && v != V::ndt3_example)
        throw InvalidArgument("validate_assumption: GS1_bound applies to ndt3_example only");
    if (id != AssumptionId::GS1_bound && !structural)
        throw InvalidArgument("validate_assumption: " + assumption_name(id) +
                              " applies to structural variants only");
    if (samples < 2) throw InvalidArgument("validate_assumption: need at least 2 samples");

    AssumptionReport rep;
    rep.condition = id;
    rep.samples = samples;
    const double half = constant_for(term, id, samples / 2, seed, nullptr);
    rep.empirical_constant = constant_for(term, id, samples, seed, &rep.fit);
    rep.stable = rep.empirical_constant <= 1.25 * std::max(half, 1e-300) ||
                 (rep.empirical_constant - half) <= 1e-12;
    const bool finite = std::isfinite(rep.empirical_constant);
    if (id == AssumptionId::S1_orth)
        rep.pass = finite && rep.empirical_constant <= 1e-9;
    else if (id == AssumptionId::GS1_bound)
        rep.pass = finite && rep.empirical_constant <= 1e-12;
    else
        rep.pass = finite && rep.stable;
    return rep;
}

double empirical_local_lipschitz(const DiffusionTerm& term, double radius, int samples,
                                 std::uint64_t seed) {
    if (!(radius > 0.0)) throw InvalidArgument("empirical_local_lipschitz: radius must be > 0");
    const TorusGrid& g = term.grid();
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        auto clamp_sup = [&](VelocityField f) {
            PhysicalField p = to_physical(f);
            double sup = 0.0;
            for (std::size_t x = 0; x < p.comp[0].size(); ++x)
                sup = std::max(sup, std::hypot(p.comp[0][x], p.comp[1][x]));
            if (sup > 0.0) f *= radius / sup;
            return f;
        };
        const VelocityField u = clamp_sup(sample_field(g, seed, 2 * i));
        const VelocityField v = clamp_sup(sample_field(g, seed, 2 * i + 1));
        const double den = norm_h(u - v);
        if (den == 0.0) continue;
        const VelocityField su = to_spectral(term.eval_pointwise(0.0, u));
        const VelocityField sv = to_spectral(term.eval_pointwise(0.0, v));
        worst = std::max(worst, norm_h(su - sv) / den);
    }
    return worst;
}

std::string assumption_reports_to_csv(const std::vector<AssumptionReport>& reports) {
    csv::Writer w({"condition", "constant", "samples", "pass"});
    for (const auto& r : reports)
        w.row(assumption_name(r.condition), r.empirical_constant, r.samples, r.pass);
    return w.str();
}

} // namespace cbf
