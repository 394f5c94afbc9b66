#include "cbf/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbf/csv.hpp"
#include "cbf/operators.hpp"
#include "cbf/parallel.hpp"

namespace cbf {

void PullbackSchedule::validate() const {
    if (t_list.empty()) throw InvalidArgument("PullbackSchedule: empty depth list");
    for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
        if (!(t_list[i] < t_list[i + 1]))
            throw InvalidArgument("PullbackSchedule: depths must increase");
    if (!(t_list.front() > 0.0)) throw InvalidArgument("PullbackSchedule: depths must be positive");
    if (ic_family.empty()) throw InvalidArgument("PullbackSchedule: empty initial-data family");
}

double hausdorff_semidist(const EndpointEnsemble& a, const EndpointEnsemble& b) {
    if (a.states.empty() || b.states.empty())
        throw InvalidArgument("hausdorff_semidist: empty ensemble");
    double worst = 0.0;
    for (const auto& x : a.states) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : b.states) best = std::min(best, norm_h(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

double TailCutoff::psi(double sigma) const {
    if (sigma <= 1.0) return 0.0;
    if (sigma >= 2.0) return 1.0;
    const double s = sigma - 1.0;
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double tail_mass(const VelocityField& u, const TailCutoff& cutoff) {
    if (!(cutoff.k > 0.0)) throw InvalidArgument("tail_mass: cutoff radius must be positive");
    const double l = u.grid.box_length;
    if (!(2.0 * cutoff.k < 0.5 * l))
        throw InvalidArgument("tail_mass: cutoff too large for the fundamental cell (2k < L/2)");
    const PhysicalField p = to_physical(u);
    const int n = u.grid.n;
    const double k_sq = cutoff.k * cutoff.k;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x1 = i * u.grid.dx();
            double x2 = j * u.grid.dx();
            if (x1 >= 0.5 * l) x1 -= l;
            if (x2 >= 0.5 * l) x2 -= l;
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            const double e = p.comp[0][idx] * p.comp[0][idx] + p.comp[1][idx] * p.comp[1][idx];
            acc += cutoff.psi((x1 * x1 + x2 * x2) / k_sq) * e;
        }
    return acc * u.grid.cell_area();
}

double tail_mass(const VelocityField& u) { return lp_norm_pow(u, 2.0); }

namespace {

/// Window quadrature of int_{-window}^{0} e^{E(xi)} g(xi) dxi on the path
/// grid, where E is the cumulative integral of the exponent slope a(.) from 0
/// downward. Reports a geometric tail estimate from the decay of the weight.
struct WindowQuadrature {
    double value = 0.0;
    double tail = 0.0;
};

template <typename SlopeFn, typename IntegrandFn>
WindowQuadrature weighted_window_integral(const WienerPath& path, double window,
                                          SlopeFn&& slope, IntegrandFn&& integrand) {
    if (!(window > 0.0)) throw InvalidArgument("radius quadrature: window must be positive");
    const double h = path.step();
    const auto steps = static_cast<std::size_t>(std::llround(window / h));
    if (steps < 8) throw InvalidArgument("radius quadrature: window too short for the path step");

    // cumulative exponent from 0 down to -window
    std::vector<double> expo(steps + 1, 0.0); // expo[m] = E(-m h)
    for (std::size_t m = 0; m < steps; ++m) {
        const double xi_hi = -static_cast<double>(m) * h;
        const double xi_lo = xi_hi - h;
        expo[m + 1] = expo[m] - 0.5 * (slope(xi_hi) + slope(xi_lo)) * h;
    }

    WindowQuadrature out;
    double prev = std::exp(expo[0]) * integrand(0.0);
    for (std::size_t m = 1; m <= steps; ++m) {
        const double xi = -static_cast<double>(m) * h;
        const double curr = std::exp(expo[m]) * integrand(xi);
        out.value += 0.5 * (prev + curr) * h;
        prev = curr;
    }

    // decay rate over the far half of the window
    const std::size_t half = steps / 2;
    const double rate = (expo[steps] - expo[half]) / (static_cast<double>(steps - half) * h);
    if (!(rate > 1e-12)) {
        std::ostringstream os;
        os << "radius quadrature: weight exponent does not decay on the window (rate = " << rate
           << "); integral diverges";
        throw DiagnosticFailure(os.str());
    }
    out.tail = std::exp(expo[steps]) * integrand(-window) / rate;
    return out;
}

} // namespace

RadiusResult absorbing_radius_wz(const CBFParams& params, const NoiseParams& noise,
                                 const WienerPath& path, const S4Fit& fit, double h_norm_sq,
                                 const ForcingSpec& forcing, double s, double window) {
    params.validate();
    noise.validate();
    if (!(fit.s5 >= 0.0 && fit.s5 < 1.0))
        throw InvalidArgument("absorbing_radius_wz: s5 must lie in [0, 1)");
    const double mn = std::min(params.mu, params.alpha);
    if (!(mn > 0.0)) throw InvalidArgument("absorbing_radius_wz: min(mu, alpha) must be positive");

    const double s6 = params.alpha > 0.0 ? 2.0 * h_norm_sq / params.alpha : 0.0;
    const double s7 =
        fit.s4 > 0.0
            ? fit.s4 * (1.0 - fit.s5) *
                  std::pow(4.0 * fit.s4 * (1.0 + fit.s5) / mn, (1.0 + fit.s5) / (1.0 - fit.s5))
            : 0.0;

    auto z = [&](double xi) { return colored_noise(path, noise.delta, xi); };
    auto slope = [&](double zeta) {
        return params.alpha - 2.0 * noise.kappa * std::exp(noise.sigma * (zeta + s)) * z(zeta);
    };
    auto integrand = [&](double xi) {
        const double mod = std::exp(noise.sigma * (xi + s));
        const double az = std::abs(z(xi));
        double g = 4.0 / mn * forcing.vprime_sq(xi + s);
        g += 2.0 * fit.s3 * mod * az;
        g += 2.0 * s6 * mod * mod * az * az;
        if (s7 > 0.0) g += s7 * std::pow(mod * az, 2.0 / (1.0 - fit.s5));
        return g;
    };

    const WindowQuadrature q = weighted_window_integral(path, window, slope, integrand);
    return {q.value, q.tail};
}

RadiusResult absorbing_radius_additive(const AdditiveRadiusSpec& spec, const WienerPath& path,
                                       RadiusMode mode, double delta) {
    spec.params.validate();
    spec.profile.validate();
    const double r = spec.params.r;
    if (!spec.alternate_form && !(r > 1.0))
        throw InvalidArgument(
            "absorbing_radius_additive: the 2D form requires r > 1 (exponent 2(r+1)/(r-1))");
    const double alpha = spec.params.alpha;
    if (!(alpha > 0.0)) throw InvalidArgument("absorbing_radius_additive: alpha must be positive");

    AdditiveNoise q = mode == RadiusMode::white
                          ? AdditiveNoise::white(path, spec.profile.ell)
                          : AdditiveNoise::wz(path, spec.profile.ell, delta);
    auto slope = [alpha](double) { return alpha; };
    auto integrand = [&](double xi) {
        const double m = std::exp(spec.profile.sigma * (xi + spec.s)) * q.eval(xi);
        const double am = std::abs(m);
        double g = spec.forcing.vprime_sq(xi + spec.s) + am * am + std::pow(am, r + 1.0);
        if (!spec.alternate_form) g += std::pow(am, 2.0 * (r + 1.0) / (r - 1.0));
        return g;
    };

    const WindowQuadrature quad = weighted_window_integral(path, spec.window, slope, integrand);
    const double head = 3.0 * norm_h_sq(spec.profile.g) *
                        std::pow(std::exp(spec.profile.sigma * spec.s) * q.eval(0.0), 2.0);
    return {head + 2.0 * spec.r_const * quad.value, 2.0 * spec.r_const * quad.tail};
}

RadiusResult absorbing_radius_multiplicative(const CBFParams& params, const ForcingSpec& forcing,
                                             const WienerPath& path, double s, RadiusMode mode,
                                             double delta, double window) {
    params.validate();
    const double mn = std::min(params.mu, params.alpha);
    if (!(mn > 0.0))
        throw InvalidArgument("absorbing_radius_multiplicative: min(mu, alpha) must be positive");

    // weight e^{alpha xi - 2 W(xi)} with W the Wiener path or the running
    // colored-noise integral; both are evaluated exactly on the grid, so the
    // exponent slope formulation is bypassed in favor of the closed form.
    const MultiplicativeNoise w = mode == RadiusMode::white
                                      ? MultiplicativeNoise::white(path)
                                      : MultiplicativeNoise::wz(path, delta);

    const double h = path.step();
    const auto steps = static_cast<std::size_t>(std::llround(window / h));
    if (steps < 8)
        throw InvalidArgument("absorbing_radius_multiplicative: window too short for path step");

    auto weight_log = [&](double xi) { return params.alpha * xi - 2.0 * w.eval(xi); };
    auto integrand = [&](double xi) { return 4.0 / mn * forcing.vprime_sq(xi + s); };

    RadiusResult out;
    double prev = std::exp(weight_log(0.0)) * integrand(0.0);
    for (std::size_t m = 1; m <= steps; ++m) {
        const double xi = -static_cast<double>(m) * h;
        const double curr = std::exp(weight_log(xi)) * integrand(xi);
        out.value += 0.5 * (prev + curr) * h;
        prev = curr;
    }
    const double half_xi = -0.5 * window;
    const double rate = (weight_log(-window) - weight_log(half_xi)) / (-0.5 * window);
    if (!(rate > 1e-12))
        throw DiagnosticFailure(
            "absorbing_radius_multiplicative: weight exponent does not decay on the window");
    out.truncation_bound = std::exp(weight_log(-window)) * integrand(-window) / rate;
    return out;
}

namespace {

VelocityField pullback_endpoint(const PullbackSystem& sys, const WienerPath& path, double s,
                                double depth, const VelocityField& u0,
                                const StepperConfig& stepper) {
    const double start = s - depth;
    switch (sys.kind) {
    case PullbackSystem::Kind::wz_general: {
        NoiseContext noise{&path, sys.delta, -s};
        return integrate(sys.params, sys.term, sys.forcing, noise, start, depth, u0, stepper)
            .final_state;
    }
    case PullbackSystem::Kind::additive: {
        const AdditiveNoise noise =
            sys.mode == RadiusMode::white
                ? AdditiveNoise::white(path, sys.profile.ell, -s)
                : AdditiveNoise::wz(path, sys.profile.ell, sys.delta, -s);
        return solve_additive_u(sys.params, sys.forcing, noise, sys.profile, start, depth, u0,
                                stepper);
    }
    case PullbackSystem::Kind::multiplicative: {
        const MultiplicativeNoise noise = sys.mode == RadiusMode::white
                                              ? MultiplicativeNoise::white(path, -s)
                                              : MultiplicativeNoise::wz(path, sys.delta, -s);
        return solve_multiplicative_u(sys.params, sys.forcing, noise, start, depth, u0, stepper);
    }
    }
    throw InvalidArgument("pullback_endpoint: unknown system kind");
}

} // namespace

EndpointEnsemble pullback_run(const PullbackSchedule& schedule, const PullbackSystem& system,
                              const WienerPath& path, const PullbackOptions& options) {
    schedule.validate();
    const std::size_t n_depth = schedule.t_list.size();
    const std::size_t n_ic = schedule.ic_family.size();
    EndpointEnsemble ens;
    ens.states.resize(n_depth * n_ic, VelocityField::zero(schedule.ic_family.front().grid));
    ens.meta.resize(n_depth * n_ic);

    parallel_for(n_depth * n_ic, options.threads, [&](std::size_t task) {
        const std::size_t d = task / n_ic;
        const std::size_t i = task % n_ic;
        const double depth = schedule.t_list[d];
        VelocityField endpoint = pullback_endpoint(system, path, schedule.s, depth,
                                                   schedule.ic_family[i], options.stepper);
        EndpointMeta meta;
        meta.depth = depth;
        meta.ic_index = static_cast<int>(i);
        meta.delta = system.mode == RadiusMode::wz ? system.delta : 0.0;
        meta.inside_ball =
            options.ball_radius_sq > 0.0 && norm_h_sq(endpoint) <= options.ball_radius_sq;
        ens.states[task] = std::move(endpoint);
        ens.meta[task] = meta;
    });
    return ens;
}

std::string EndpointEnsemble::to_csv() const {
    csv::Writer w({"depth", "ic_index", "delta", "endpoint_norm_h", "inside_ball"});
    for (std::size_t i = 0; i < states.size(); ++i)
        w.row(meta[i].depth, meta[i].ic_index, meta[i].delta, norm_h(states[i]),
              meta[i].inside_ball);
    return w.str();
}

namespace {

EndpointEnsemble select_depth(const EndpointEnsemble& all, double depth) {
    EndpointEnsemble out;
    for (std::size_t i = 0; i < all.states.size(); ++i)
        if (all.meta[i].depth == depth) {
            out.states.push_back(all.states[i]);
            out.meta.push_back(all.meta[i]);
        }
    return out;
}

} // namespace

UscResult usc_experiment(NoiseStructure mode, const std::vector<double>& deltas,
                         const PullbackSchedule& schedule, const PullbackSystem& base,
                         const WienerPath& path, const PullbackOptions& options,
                         double drift_tol) {
    schedule.validate();
    if (schedule.t_list.size() < 2)
        throw InvalidArgument("usc_experiment: need at least two depths for the drift gate");

    PullbackSystem white = base;
    white.kind = mode == NoiseStructure::additive ? PullbackSystem::Kind::additive
                                                  : PullbackSystem::Kind::multiplicative;
    white.mode = RadiusMode::white;

    const EndpointEnsemble white_all = pullback_run(schedule, white, path, options);
    const double deepest = schedule.t_list.back();
    const double prev_depth = schedule.t_list[schedule.t_list.size() - 2];
    const EndpointEnsemble ref = select_depth(white_all, deepest);
    const EndpointEnsemble ref_prev = select_depth(white_all, prev_depth);

    UscResult out;
    double scale = 1.0;
    for (const auto& f : ref.states) scale = std::max(scale, norm_h(f));
    for (std::size_t i = 0; i < ref.states.size(); ++i)
        out.depth_drift =
            std::max(out.depth_drift, norm_h(ref.states[i] - ref_prev.states[i]) / scale);
    out.depth_converged = out.depth_drift < drift_tol;

    std::vector<double> sorted = deltas;
    std::sort(sorted.rbegin(), sorted.rend());

    // Only the deepest depth feeds the attractor surrogates.
    PullbackSchedule deepest_only = schedule;
    deepest_only.t_list = {deepest};

    double prev = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        PullbackSystem wz = white;
        wz.mode = RadiusMode::wz;
        wz.delta = sorted[i];
        const EndpointEnsemble ens = pullback_run(deepest_only, wz, path, options);
        UscRow row;
        row.delta = sorted[i];
        row.dist = hausdorff_semidist(ens, ref);
        row.ratio_to_previous = (i == 0 || prev == 0.0) ? 0.0 : row.dist / prev;
        prev = row.dist;
        out.rows.push_back(row);
    }
    return out;
}

std::string UscResult::to_csv() const {
    csv::Writer w({"delta", "dist_h", "ratio_to_previous", "depth_converged"});
    for (const auto& r : rows) w.row(r.delta, r.dist, r.ratio_to_previous, depth_converged);
    return w.str();
}

} // namespace cbf
