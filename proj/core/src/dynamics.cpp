#include "cbf/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "cbf/csv.hpp"
#include "cbf/operators.hpp"

namespace cbf {

void CBFParams::validate() const {
    if (!(mu > 0.0)) throw InvalidArgument("CBFParams: mu must be positive");
    if (alpha < 0.0) throw InvalidArgument("CBFParams: alpha must be nonnegative");
    if (beta < 0.0) throw InvalidArgument("CBFParams: beta must be nonnegative");
    if (!(r >= 1.0)) throw InvalidArgument("CBFParams: r must be >= 1");
}

void StepperConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("StepperConfig: dt must be positive");
    if (!(cfl_limit > 0.0)) throw InvalidArgument("StepperConfig: cfl_limit must be positive");
}

ForcingSpec ForcingSpec::zero(const TorusGrid& g) {
    ForcingSpec f;
    f.kind_ = Kind::zero;
    f.grid_ = g;
    return f;
}

ForcingSpec ForcingSpec::constant(VelocityField profile) {
    ForcingSpec f;
    f.kind_ = Kind::constant_field;
    f.grid_ = profile.grid;
    f.profile_ = leray_project(profile);
    f.profile_vprime_sq_ = norm_vprime_sq(f.profile_);
    return f;
}

ForcingSpec ForcingSpec::exp_modulated(VelocityField profile, double gamma) {
    ForcingSpec f = constant(std::move(profile));
    f.kind_ = Kind::exp_modulated;
    f.gamma_ = gamma;
    return f;
}

VelocityField ForcingSpec::eval(double t) const {
    if (kind_ == Kind::zero) return VelocityField::zero(grid_);
    if (kind_ == Kind::constant_field) return profile_;
    return std::exp(gamma_ * t) * profile_;
}

double ForcingSpec::work(double t, const VelocityField& u) const {
    if (kind_ == Kind::zero) return 0.0;
    const double scale = kind_ == Kind::exp_modulated ? std::exp(gamma_ * t) : 1.0;
    return scale * inner_h(profile_, u);
}

double ForcingSpec::vprime_sq(double t) const {
    if (kind_ == Kind::zero) return 0.0;
    const double scale = kind_ == Kind::exp_modulated ? std::exp(2.0 * gamma_ * t) : 1.0;
    return scale * profile_vprime_sq_;
}

namespace {

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

/// Explicit part N(t, u) = -B(u) - beta C(u) + f + S(t,u) Z(t).
VelocityField explicit_rhs(const VelocityField& u, const CBFParams& params,
                           const DiffusionTerm& term, const ForcingSpec& forcing,
                           const NoiseContext& noise, double t) {
    VelocityField n = bilinear_B(u, u);
    n *= -1.0;
    if (params.beta != 0.0) axpy(-params.beta, nonlinear_C(u, params.r), n);
    if (!forcing.is_zero()) n += forcing.eval(t);
    const double z = noise.z(t);
    if (z != 0.0 && term.variant() != DiffusionTerm::Variant::zero)
        axpy(z, term.eval(t, u), n);
    return n;
}

struct HeunStep {
    VelocityField next;
    double cfl = 0.0;
};

HeunStep heun_step(const VelocityField& u, const CBFParams& params, const DiffusionTerm& term,
                   const ForcingSpec& forcing, const NoiseContext& noise, double t, double dt,
                   const std::vector<double>& decay, double cfl_limit,
                   const VelocityField* k1_cached) {
    const TorusGrid& g = u.grid;
    const double k_max = g.k_unit() * g.dealias_limit() * std::numbers::sqrt2;
    const double cfl = dt * max_speed(u) * k_max;
    if (cfl > cfl_limit) {
        std::ostringstream os;
        os << "CFL guard: dt * max|u| * k_max = " << cfl << " > " << cfl_limit << " at t = " << t
           << "; step rejected";
        throw CflViolation(os.str(), t);
    }

    const VelocityField k1 =
        k1_cached ? *k1_cached : explicit_rhs(u, params, term, forcing, noise, t);

    VelocityField pred = u;
    axpy(dt, k1, pred);
    apply_multiplier(pred, decay);

    const VelocityField k2 = explicit_rhs(pred, params, term, forcing, noise, t + dt);

    VelocityField e_k1 = k1;
    apply_multiplier(e_k1, decay);
    VelocityField next = u;
    apply_multiplier(next, decay);
    axpy(0.5 * dt, e_k1, next);
    axpy(0.5 * dt, k2, next);

    HeunStep out;
    out.next = std::move(next);
    out.cfl = cfl;
    return out;
}

/// J_m(c) = int_0^1 e^{-c s} s^m ds for m = 0, 1, 2.
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

/// Per-mode integrals of |u|^2 (plain, |k|^2- and (1+|k|^2)-weighted) over one
/// step, modeling each mode as e^{-lambda tau} times a linear interpolant.
/// Exact whenever the explicit terms vanish.
void quadratic_increments(const VelocityField& u0, const VelocityField& u1, double mu,
                          double alpha, double dt, LedgerIncrement& inc) {
    const TorusGrid& g = u0.grid;
    const double ku = g.k_unit();
    const double l2 = g.box_length * g.box_length;
    double acc_h = 0.0;
    double acc_grad = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double k1 = ku * g.mode(i);
            const double k2 = ku * g.mode(j);
            const double k_sq = k1 * k1 + k2 * k2;
            const double lambda = mu * k_sq + alpha;
            const double c = 2.0 * lambda * dt;
            double j0, j1, j2;
            quadrature_weights(c, j0, j1, j2);
            double mode_int = 0.0;
            for (int comp = 0; comp < 2; ++comp) {
                const auto a = u0.at(comp, i, j);
                if (lambda * dt > 30.0) {
                    // u1 carries no usable information at this decay rate
                    mode_int += std::norm(a) * j0;
                    continue;
                }
                const auto b = std::exp(lambda * dt) * u1.at(comp, i, j) - a;
                mode_int += std::norm(a) * j0 + 2.0 * (a.real() * b.real() + a.imag() * b.imag()) * j1 +
                            std::norm(b) * j2;
            }
            acc_h += mode_int;
            acc_grad += k_sq * mode_int;
        }
    inc.int_h = l2 * dt * acc_h;
    inc.int_grad = l2 * dt * acc_grad;
    inc.int_v = inc.int_h + inc.int_grad;
}

LedgerEntry make_entry(double t, const VelocityField& u, const CBFParams& params,
                       const DiffusionTerm& term, const ForcingSpec& forcing,
                       const NoiseContext& noise) {
    LedgerEntry e;
    e.time = t;
    const NormReport nr = norms(u);
    e.h_norm2 = nr.h_norm2;
    e.grad_norm2 = nr.grad_norm2;
    e.v_norm2 = nr.v_norm2;
    e.lr_pow = lp_norm_pow(u, params.r + 1.0);
    e.work_f = forcing.work(t, u);
    const double z = noise.z(t);
    e.work_s = (z != 0.0 && term.variant() != DiffusionTerm::Variant::zero)
                   ? z * inner_h(term.eval(t, u), u)
                   : 0.0;
    return e;
}

} // namespace

VelocityField step_wz(const VelocityField& state, const CBFParams& params,
                      const DiffusionTerm& term, const ForcingSpec& forcing,
                      const NoiseContext& noise, double t, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw InvalidArgument("step_wz: dt must be positive");
    const auto decay = linear_decay(state.grid, params.mu, params.alpha, dt);
    HeunStep hs = heun_step(state, params, term, forcing, noise, t, dt, decay, 0.5, nullptr);
    if (!std::isfinite(norm_h_sq(hs.next)))
        throw NumericsError("step_wz: non-finite state", t);
    return std::move(hs.next);
}

Trajectory integrate(const CBFParams& params, const DiffusionTerm& term,
                     const ForcingSpec& forcing, const NoiseContext& noise, double s, double T,
                     const VelocityField& u_s, const StepperConfig& config) {
    params.validate();
    config.validate();
    if (!(T >= 0.0)) throw InvalidArgument("integrate: T must be nonnegative");
    if (params.nse_preset() && !is_mean_zero(u_s))
        throw InvalidArgument("integrate: NSE preset (alpha = beta = 0) requires mean-zero data");

    const auto steps = static_cast<std::size_t>(std::llround(T / config.dt));
    if (std::abs(static_cast<double>(steps) * config.dt - T) > 1e-9 * std::max(1.0, T))
        throw InvalidArgument("integrate: T must be an integer multiple of dt");

    Trajectory traj;
    traj.params = params;
    traj.times.reserve(steps + 1);
    traj.ledger.reserve(steps + 1);
    traj.increments.reserve(steps);

    const auto decay = linear_decay(u_s.grid, params.mu, params.alpha, config.dt);

    VelocityField u = u_s;
    traj.times.push_back(s);
    traj.ledger.push_back(make_entry(s, u, params, term, forcing, noise));
    if (config.snapshot_stride > 0) traj.snapshots.emplace_back(0, u);

    for (std::size_t step = 0; step < steps; ++step) {
        const double t = s + static_cast<double>(step) * config.dt;
        HeunStep hs =
            heun_step(u, params, term, forcing, noise, t, config.dt, decay, config.cfl_limit,
                      nullptr);
        if (!std::isfinite(norm_h_sq(hs.next))) {
            std::ostringstream os;
            os << "integrate: non-finite state after t = " << t;
            throw NumericsError(os.str(), t);
        }

        LedgerIncrement inc;
        quadratic_increments(u, hs.next, params.mu, params.alpha, config.dt, inc);
        u = std::move(hs.next);

        const double t_next = s + static_cast<double>(step + 1) * config.dt;
        traj.times.push_back(t_next);
        traj.ledger.push_back(make_entry(t_next, u, params, term, forcing, noise));

        const LedgerEntry& prev = traj.ledger[traj.ledger.size() - 2];
        const LedgerEntry& curr = traj.ledger.back();
        inc.int_lr = 0.5 * config.dt * (prev.lr_pow + curr.lr_pow);
        inc.int_work_f = 0.5 * config.dt * (prev.work_f + curr.work_f);
        inc.int_work_s = 0.5 * config.dt * (prev.work_s + curr.work_s);
        traj.increments.push_back(inc);

        if (config.snapshot_stride > 0 && (step + 1) % config.snapshot_stride == 0)
            traj.snapshots.emplace_back(step + 1, u);
    }
    traj.final_state = std::move(u);
    return traj;
}

EnergyResidual energy_residual(const Trajectory& traj) {
    if (traj.ledger.empty() || traj.increments.size() + 1 != traj.ledger.size())
        throw InvalidArgument("energy_residual: incomplete ledger");
    EnergyResidual out;
    const double scale = std::max(1.0, traj.ledger.front().h_norm2);
    const CBFParams& p = traj.params;
    double diss_h = 0.0;
    double diss_grad = 0.0;
    double diss_v = 0.0;
    double diss_lr = 0.0;
    double work_f = 0.0;
    double work_s = 0.0;
    out.times.push_back(traj.times.front());
    out.residual.push_back(0.0);
    out.residual_vform.push_back(0.0);
    const double e0 = traj.ledger.front().h_norm2;
    for (std::size_t i = 0; i < traj.increments.size(); ++i) {
        const auto& inc = traj.increments[i];
        diss_h += inc.int_h;
        diss_grad += inc.int_grad;
        diss_v += inc.int_v;
        diss_lr += inc.int_lr;
        work_f += inc.int_work_f;
        work_s += inc.int_work_s;
        const double e = traj.ledger[i + 1].h_norm2;
        const double rhs = e0 + 2.0 * work_f + 2.0 * work_s;
        const double lhs = e + 2.0 * p.mu * diss_grad + 2.0 * p.alpha * diss_h +
                           2.0 * p.beta * diss_lr;
        const double lhs_v = e + 2.0 * p.mu * diss_v + 2.0 * p.alpha * diss_h +
                             2.0 * p.beta * diss_lr;
        out.times.push_back(traj.times[i + 1]);
        out.residual.push_back(std::abs(lhs - rhs) / scale);
        out.residual_vform.push_back(std::abs(lhs_v - rhs) / scale);
        out.max_residual = std::max(out.max_residual, out.residual.back());
    }
    return out;
}

std::string Trajectory::ledger_to_csv() const {
    EnergyResidual res = energy_residual(*this);
    csv::Writer w({"time", "h_norm2", "grad_norm2", "lr_norm", "work_f", "work_S", "residual"});
    for (std::size_t i = 0; i < ledger.size(); ++i)
        w.row(times[i], ledger[i].h_norm2, ledger[i].grad_norm2, ledger[i].lr_pow,
              ledger[i].work_f, ledger[i].work_s, res.residual[i]);
    return w.str();
}

VelocityField cocycle_eval(double t, double s, const CBFParams& params,
                           const DiffusionTerm& term, const ForcingSpec& forcing,
                           const WienerPath& path, double delta, const VelocityField& u_s,
                           const StepperConfig& config, double omega_shift) {
    if (t < 0.0) throw InvalidArgument("cocycle_eval: elapsed time must be nonnegative");
    if (t == 0.0) return u_s;
    NoiseContext noise{&path, delta, omega_shift - s};
    return integrate(params, term, forcing, noise, s, t, u_s, config).final_state;
}

} // namespace cbf
