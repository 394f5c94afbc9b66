#include "cbf/transforms.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "cbf/csv.hpp"
#include "cbf/operators.hpp"
#include "cbf/rng.hpp"

namespace cbf {

void AdditiveProfile::validate() const {
    if (!(ell > 0.0)) throw InvalidArgument("AdditiveProfile: ell must be positive");
    if (sigma < 0.0) throw InvalidArgument("AdditiveProfile: sigma must be nonnegative");
    if (max_divergence_ratio(g) > 1e-8)
        throw InvalidArgument("AdditiveProfile: g must be divergence-free");
}

std::string transform_mode_name(TransformMode mode) {
    switch (mode) {
    case TransformMode::additive_white: return "additive_white";
    case TransformMode::additive_wz: return "additive_wz";
    case TransformMode::multiplicative_white: return "multiplicative_white";
    case TransformMode::multiplicative_wz: return "multiplicative_wz";
    }
    return "unknown";
}

AdditiveNoise AdditiveNoise::white(const WienerPath& path, double ell, double shift) {
    AdditiveNoise n;
    n.y_ = std::make_shared<OuTable>(path, ell);
    n.shift_ = shift;
    return n;
}

AdditiveNoise AdditiveNoise::wz(const WienerPath& path, double ell, double delta, double shift) {
    AdditiveNoise n;
    n.z_ = std::make_shared<OuZTable>(path, ell, delta);
    n.delta_ = delta;
    n.shift_ = shift;
    return n;
}

AdditiveNoise AdditiveNoise::none() { return AdditiveNoise{}; }

double AdditiveNoise::eval(double t) const {
    if (z_) return z_->eval(t + shift_);
    if (y_) return y_->eval(t + shift_);
    return 0.0;
}

MultiplicativeNoise MultiplicativeNoise::white(const WienerPath& path, double shift) {
    MultiplicativeNoise n;
    n.path_ = &path;
    n.shift_ = shift;
    return n;
}

MultiplicativeNoise MultiplicativeNoise::wz(const WienerPath& path, double delta, double shift) {
    MultiplicativeNoise n;
    n.table_ = std::make_shared<ColoredIntegralTable>(path, delta);
    n.delta_ = delta;
    n.shift_ = shift;
    return n;
}

MultiplicativeNoise MultiplicativeNoise::none() { return MultiplicativeNoise{}; }

double MultiplicativeNoise::eval(double t) const {
    if (table_) return table_->eval(t + shift_) - table_->eval(shift_);
    if (path_) return path_->eval(t + shift_) - path_->eval(shift_);
    return 0.0;
}

namespace {

TransformMode additive_mode_of(const AdditiveNoise& noise) {
    return noise.is_wz() ? TransformMode::additive_wz : TransformMode::additive_white;
}

TransformMode multiplicative_mode_of(const MultiplicativeNoise& noise) {
    return noise.is_wz() ? TransformMode::multiplicative_wz : TransformMode::multiplicative_white;
}

void check_mode(TransformMode got, TransformMode want, const char* what) {
    if (got != want)
        throw InvalidArgument(std::string(what) + ": state tagged " + transform_mode_name(got) +
                              ", expected " + transform_mode_name(want));
}

void check_exponent(double w, double t) {
    if (std::abs(w) > 30.0) {
        std::ostringstream os;
        os << "multiplicative exponent |W(t)| = " << std::abs(w) << " > 30 at t = " << t
           << "; coefficients would overflow";
        throw NumericsError(os.str(), t);
    }
}

// Lawson-Heun driver shared by the transformed systems. prepare(t) is called
// once per step before the stages; rhs must stay valid for both stage times.
struct ExplicitDriver {
    double mu = 0.0;
    double alpha = 0.0;
    std::function<void(double, double)> prepare; // (t_step, dt)
    std::function<VelocityField(double, const VelocityField&)> rhs;
};

std::vector<double> linear_decay(const TorusGrid& g, double mu, double alpha, double dt) {
    std::vector<double> decay(g.size());
    const double ku = g.k_unit();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double k1 = ku * g.mode(i);
            const double k2 = ku * g.mode(j);
            decay[static_cast<std::size_t>(i) * g.n + j] =
                std::exp(-(mu * (k1 * k1 + k2 * k2) + alpha) * dt);
        }
    return decay;
}

void apply_multiplier(VelocityField& f, const std::vector<double>& m) {
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < f.comp[c].size(); ++i) f.comp[c][i] *= m[i];
}

double max_speed(const VelocityField& u) {
    const PhysicalField p = to_physical(u);
    double sup = 0.0;
    for (std::size_t x = 0; x < p.comp[0].size(); ++x)
        sup = std::max(sup, std::hypot(p.comp[0][x], p.comp[1][x]));
    return sup;
}

VelocityField driver_step(const ExplicitDriver& sys, const VelocityField& v, double t, double dt,
                          const std::vector<double>& decay, double cfl_limit,
                          const VelocityField* k1_cached, VelocityField* k1_out) {
    const TorusGrid& g = v.grid;
    const double k_max = g.k_unit() * g.dealias_limit() * std::numbers::sqrt2;
    const double cfl = dt * max_speed(v) * k_max;
    if (cfl > cfl_limit) {
        std::ostringstream os;
        os << "CFL guard: dt * max|v| * k_max = " << cfl << " > " << cfl_limit << " at t = " << t
           << "; step rejected";
        throw CflViolation(os.str(), t);
    }
    if (sys.prepare) sys.prepare(t, dt);
    const VelocityField k1 = k1_cached ? *k1_cached : sys.rhs(t, v);
    if (k1_out) *k1_out = k1;

    VelocityField pred = v;
    axpy(dt, k1, pred);
    apply_multiplier(pred, decay);
    const VelocityField k2 = sys.rhs(t + dt, pred);

    VelocityField e_k1 = k1;
    apply_multiplier(e_k1, decay);
    VelocityField next = v;
    apply_multiplier(next, decay);
    axpy(0.5 * dt, e_k1, next);
    axpy(0.5 * dt, k2, next);
    return next;
}

void quadrature_weights(double c, double& j0, double& j1, double& j2) {
    if (c < 1e-4) {
        j0 = 1.0 - c / 2.0 + c * c / 6.0;
        j1 = 0.5 - c / 3.0 + c * c / 8.0;
        j2 = 1.0 / 3.0 - c / 4.0 + c * c / 10.0;
        return;
    }
    const double e = std::exp(-c);
    j0 = (1.0 - e) / c;
    j1 = (1.0 - (1.0 + c) * e) / (c * c);
    j2 = (2.0 - (c * c + 2.0 * c + 2.0) * e) / (c * c * c);
}

void quadratic_increments(const VelocityField& u0, const VelocityField& u1, double mu,
                          double alpha, double dt, double& int_h, double& int_grad) {
    const TorusGrid& g = u0.grid;
    const double ku = g.k_unit();
    double acc_h = 0.0;
    double acc_grad = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double k1 = ku * g.mode(i);
            const double k2 = ku * g.mode(j);
            const double k_sq = k1 * k1 + k2 * k2;
            const double lambda = mu * k_sq + alpha;
            double j0, j1, j2;
            quadrature_weights(2.0 * lambda * dt, j0, j1, j2);
            double mode_int = 0.0;
            for (int comp = 0; comp < 2; ++comp) {
                const auto a = u0.at(comp, i, j);
                if (lambda * dt > 30.0) {
                    mode_int += std::norm(a) * j0;
                    continue;
                }
                const auto b = std::exp(lambda * dt) * u1.at(comp, i, j) - a;
                mode_int += std::norm(a) * j0 +
                            2.0 * (a.real() * b.real() + a.imag() * b.imag()) * j1 +
                            std::norm(b) * j2;
            }
            acc_h += mode_int;
            acc_grad += k_sq * mode_int;
        }
    const double l2 = g.box_length * g.box_length;
    int_h = l2 * dt * acc_h;
    int_grad = l2 * dt * acc_grad;
}

VTrajectory integrate_driver(const ExplicitDriver& sys, double s, double T,
                             const VelocityField& v_s, const StepperConfig& config) {
    config.validate();
    const auto steps = static_cast<std::size_t>(std::llround(T / config.dt));
    if (std::abs(static_cast<double>(steps) * config.dt - T) > 1e-9 * std::max(1.0, T))
        throw InvalidArgument("integrate: T must be an integer multiple of dt");

    VTrajectory traj;
    traj.mu = sys.mu;
    traj.alpha = sys.alpha;
    const auto decay = linear_decay(v_s.grid, sys.mu, sys.alpha, config.dt);

    VelocityField v = v_s;
    traj.times.push_back(s);
    traj.h_norm2.push_back(norm_h_sq(v));
    if (sys.prepare) sys.prepare(s, config.dt);
    VelocityField k1 = sys.rhs(s, v);
    traj.work_n.push_back(inner_h(k1, v));

    for (std::size_t step = 0; step < steps; ++step) {
        const double t = s + static_cast<double>(step) * config.dt;
        VelocityField next = driver_step(sys, v, t, config.dt, decay, config.cfl_limit, &k1, nullptr);
        if (!std::isfinite(norm_h_sq(next))) {
            std::ostringstream os;
            os << "integrate: non-finite state after t = " << t;
            throw NumericsError(os.str(), t);
        }
        double ih = 0.0, ig = 0.0;
        quadratic_increments(v, next, sys.mu, sys.alpha, config.dt, ih, ig);
        v = std::move(next);

        const double t_next = t + config.dt;
        // k1 of the next step doubles as the node work sample
        if (sys.prepare) sys.prepare(t_next, config.dt);
        k1 = sys.rhs(t_next, v);
        traj.times.push_back(t_next);
        traj.h_norm2.push_back(norm_h_sq(v));
        traj.work_n.push_back(inner_h(k1, v));
        traj.int_h.push_back(ih);
        traj.int_grad.push_back(ig);
        traj.int_work.push_back(0.5 * config.dt *
                                (traj.work_n[traj.work_n.size() - 2] + traj.work_n.back()));
    }
    traj.final_state = std::move(v);
    return traj;
}

ExplicitDriver additive_driver(const CBFParams& params, const ForcingSpec& forcing,
                               const AdditiveNoise& noise, const AdditiveProfile& profile) {
    params.validate();
    profile.validate();
    ExplicitDriver d;
    d.mu = params.mu;
    d.alpha = params.alpha;
    auto ag = std::make_shared<VelocityField>(stokes_apply(profile.g));
    d.rhs = [params, &forcing, noise, profile, ag](double t, const VelocityField& v) {
        const double q = noise.eval(t);
        const double mod = std::exp(profile.sigma * t) * q;
        VelocityField w = v;
        axpy(mod, profile.g, w); // w = v + e^{sigma t} g q
        VelocityField n = bilinear_B(w, w);
        n *= -1.0;
        if (params.beta != 0.0) axpy(-params.beta, nonlinear_C(w, params.r), n);
        if (!forcing.is_zero()) n += forcing.eval(t);
        axpy((profile.ell - profile.sigma - params.alpha) * mod, profile.g, n);
        axpy(-params.mu * mod, *ag, n);
        return n;
    };
    return d;
}

ExplicitDriver multiplicative_driver(const CBFParams& params, const ForcingSpec& forcing,
                                     const MultiplicativeNoise& noise) {
    params.validate();
    ExplicitDriver d;
    d.mu = params.mu;
    d.alpha = params.alpha;
    // coefficients frozen at the step midpoint
    auto frozen = std::make_shared<double>(0.0);
    d.prepare = [noise, frozen](double t, double dt) {
        const double w = noise.eval(t + 0.5 * dt);
        check_exponent(w, t);
        *frozen = w;
    };
    d.rhs = [params, &forcing, frozen](double t, const VelocityField& v) {
        const double w = *frozen;
        VelocityField n = bilinear_B(v, v);
        n *= -std::exp(w);
        if (params.beta != 0.0)
            axpy(-params.beta * std::exp((params.r - 1.0) * w), nonlinear_C(v, params.r), n);
        if (!forcing.is_zero()) axpy(std::exp(-w), forcing.eval(t), n);
        return n;
    };
    return d;
}

} // namespace

TransformedState to_v_additive(const VelocityField& u, double t, const AdditiveNoise& noise,
                               const AdditiveProfile& profile, TransformMode mode) {
    if (mode != TransformMode::additive_white && mode != TransformMode::additive_wz)
        throw InvalidArgument("to_v_additive: additive modes only");
    check_mode(additive_mode_of(noise), mode, "to_v_additive");
    TransformedState st;
    st.t = t;
    st.mode = mode;
    st.delta = noise.delta();
    st.v = u;
    axpy(-std::exp(profile.sigma * t) * noise.eval(t), profile.g, st.v);
    return st;
}

TransformedState to_v_multiplicative(const VelocityField& u, double t,
                                     const MultiplicativeNoise& noise, TransformMode mode) {
    if (mode != TransformMode::multiplicative_white && mode != TransformMode::multiplicative_wz)
        throw InvalidArgument("to_v_multiplicative: multiplicative modes only");
    check_mode(multiplicative_mode_of(noise), mode, "to_v_multiplicative");
    const double w = noise.eval(t);
    check_exponent(w, t);
    TransformedState st;
    st.t = t;
    st.mode = mode;
    st.delta = noise.delta();
    st.v = std::exp(-w) * u;
    return st;
}

VelocityField reconstruct_u(const TransformedState& state, const AdditiveNoise& noise,
                            const AdditiveProfile& profile) {
    check_mode(state.mode, additive_mode_of(noise), "reconstruct_u(additive)");
    VelocityField u = state.v;
    axpy(std::exp(profile.sigma * state.t) * noise.eval(state.t), profile.g, u);
    return u;
}

VelocityField reconstruct_u(const TransformedState& state, const MultiplicativeNoise& noise) {
    check_mode(state.mode, multiplicative_mode_of(noise), "reconstruct_u(multiplicative)");
    const double w = noise.eval(state.t);
    check_exponent(w, state.t);
    return std::exp(w) * state.v;
}

TransformedState step_cscbf_add(const TransformedState& state, const CBFParams& params,
                                const ForcingSpec& forcing, const AdditiveNoise& noise,
                                const AdditiveProfile& profile, double dt) {
    check_mode(state.mode, additive_mode_of(noise), "step_cscbf_add");
    const ExplicitDriver d = additive_driver(params, forcing, noise, profile);
    const auto decay = linear_decay(state.v.grid, d.mu, d.alpha, dt);
    TransformedState out = state;
    out.v = driver_step(d, state.v, state.t, dt, decay, 0.5, nullptr, nullptr);
    out.t = state.t + dt;
    if (!std::isfinite(norm_h_sq(out.v)))
        throw NumericsError("step_cscbf_add: non-finite state", state.t);
    return out;
}

TransformedState step_cscbf_multi(const TransformedState& state, const CBFParams& params,
                                  const ForcingSpec& forcing, const MultiplicativeNoise& noise,
                                  double dt) {
    check_mode(state.mode, multiplicative_mode_of(noise), "step_cscbf_multi");
    const ExplicitDriver d = multiplicative_driver(params, forcing, noise);
    const auto decay = linear_decay(state.v.grid, d.mu, d.alpha, dt);
    TransformedState out = state;
    out.v = driver_step(d, state.v, state.t, dt, decay, 0.5, nullptr, nullptr);
    out.t = state.t + dt;
    if (!std::isfinite(norm_h_sq(out.v)))
        throw NumericsError("step_cscbf_multi: non-finite state", state.t);
    return out;
}

EnergyResidual VTrajectory::residual() const {
    EnergyResidual out;
    if (times.empty() || int_h.size() + 1 != times.size())
        throw InvalidArgument("VTrajectory::residual: incomplete ledger");
    const double scale = std::max(1.0, h_norm2.front());
    double dh = 0.0, dg = 0.0, wn = 0.0;
    out.times.push_back(times.front());
    out.residual.push_back(0.0);
    out.residual_vform.push_back(0.0);
    for (std::size_t i = 0; i < int_h.size(); ++i) {
        dh += int_h[i];
        dg += int_grad[i];
        wn += int_work[i];
        const double lhs = h_norm2[i + 1] + 2.0 * mu * dg + 2.0 * alpha * dh;
        const double lhs_v = lhs + 2.0 * mu * dh;
        const double rhs = h_norm2.front() + 2.0 * wn;
        out.times.push_back(times[i + 1]);
        out.residual.push_back(std::abs(lhs - rhs) / scale);
        out.residual_vform.push_back(std::abs(lhs_v - rhs) / scale);
        out.max_residual = std::max(out.max_residual, out.residual.back());
    }
    return out;
}

VTrajectory integrate_cscbf_add(const CBFParams& params, const ForcingSpec& forcing,
                                const AdditiveNoise& noise, const AdditiveProfile& profile,
                                double s, double T, const VelocityField& v_s,
                                const StepperConfig& config) {
    return integrate_driver(additive_driver(params, forcing, noise, profile), s, T, v_s, config);
}

VTrajectory integrate_cscbf_multi(const CBFParams& params, const ForcingSpec& forcing,
                                  const MultiplicativeNoise& noise, double s, double T,
                                  const VelocityField& v_s, const StepperConfig& config) {
    return integrate_driver(multiplicative_driver(params, forcing, noise), s, T, v_s, config);
}

VelocityField solve_additive_u(const CBFParams& params, const ForcingSpec& forcing,
                               const AdditiveNoise& noise, const AdditiveProfile& profile,
                               double s, double T, const VelocityField& u_s,
                               const StepperConfig& config) {
    const TransformMode mode = noise.is_wz() ? TransformMode::additive_wz
                                             : TransformMode::additive_white;
    TransformedState st = to_v_additive(u_s, s, noise, profile, mode);
    VTrajectory traj = integrate_cscbf_add(params, forcing, noise, profile, s, T, st.v, config);
    st.v = std::move(traj.final_state);
    st.t = s + T;
    return reconstruct_u(st, noise, profile);
}

VelocityField solve_multiplicative_u(const CBFParams& params, const ForcingSpec& forcing,
                                     const MultiplicativeNoise& noise, double s, double T,
                                     const VelocityField& u_s, const StepperConfig& config) {
    const TransformMode mode = noise.is_wz() ? TransformMode::multiplicative_wz
                                             : TransformMode::multiplicative_white;
    TransformedState st = to_v_multiplicative(u_s, s, noise, mode);
    VTrajectory traj = integrate_cscbf_multi(params, forcing, noise, s, T, st.v, config);
    st.v = std::move(traj.final_state);
    st.t = s + T;
    return reconstruct_u(st, noise);
}

ConvergenceTable wz_solution_convergence(NoiseStructure mode, const std::vector<double>& deltas,
                                         const WienerPath& path, const CBFParams& params,
                                         const ForcingSpec& forcing,
                                         const AdditiveProfile& profile, double s, double T,
                                         const VelocityField& u_s, const StepperConfig& config) {
    ConvergenceTable table;
    VelocityField u_white =
        mode == NoiseStructure::additive
            ? solve_additive_u(params, forcing, AdditiveNoise::white(path, profile.ell), profile,
                               s, T, u_s, config)
            : solve_multiplicative_u(params, forcing, MultiplicativeNoise::white(path), s, T, u_s,
                                     config);

    std::vector<double> sorted = deltas;
    std::sort(sorted.rbegin(), sorted.rend());
    double prev = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double delta = sorted[i];
        const VelocityField u_delta =
            mode == NoiseStructure::additive
                ? solve_additive_u(params, forcing, AdditiveNoise::wz(path, profile.ell, delta),
                                   profile, s, T, u_s, config)
                : solve_multiplicative_u(params, forcing, MultiplicativeNoise::wz(path, delta), s,
                                         T, u_s, config);
        ConvergenceRow row;
        row.delta = delta;
        row.error_h = norm_h(u_delta - u_white);
        row.ratio_to_previous = (i == 0 || prev == 0.0) ? 0.0 : row.error_h / prev;
        prev = row.error_h;
        table.rows.push_back(row);
    }
    return table;
}

std::string ConvergenceTable::to_csv() const {
    csv::Writer w({"delta", "error_H", "ratio_to_previous"});
    for (const auto& r : rows) w.row(r.delta, r.error_h, r.ratio_to_previous);
    return w.str();
}

double estimate_b_constant(const VelocityField& g, int samples, std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const VelocityField u = random_field(g.grid, rng::substream(seed, i));
        const double num = std::abs(trilinear_b(u, g, u));
        const double den = norm_h_sq(u);
        if (den > 0.0) worst = std::max(worst, num / den);
    }
    return worst;
}

} // namespace cbf
