#include "cbf/ou.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbf/csv.hpp"

namespace cbf {

namespace {

// K0(s) = int_0^s e^{-ell (s - u)} du, K1(s) = int_0^s e^{-ell (s - u)} u du.
double kernel0(double ell, double s) { return -std::expm1(-ell * s) / ell; }

double kernel1(double ell, double s) {
    const double c = ell * s;
    if (c < 1e-4) return s * s * (0.5 - c / 6.0 + c * c / 24.0);
    return (s - kernel0(ell, s)) / ell;
}

void check_ell(double ell) {
    if (!(ell > 0.0)) throw InvalidArgument("ou: ell must be positive");
}

} // namespace

double ou_truncation_bound(const WienerPath& path, double ell, double t) {
    return std::exp(-ell * (t - path.t_min()));
}

OuTable::OuTable(const WienerPath& path, double ell) : path_(&path), ell_(ell) {
    check_ell(ell);
    const auto& w = path.samples();
    values_.assign(w.size(), 0.0);
    const double decay = std::exp(-ell * path.step());
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        values_[i + 1] = decay * values_[i] + (w[i + 1] - w[i]);
}

double OuTable::eval(double t) const {
    const std::size_t i = path_->floor_index(t);
    const double ti = path_->node_time(i);
    const double s = t - ti;
    if (std::abs(s) < 1e-12 * path_->step()) return values_[i];
    // Partial interval: decayed node value plus the undamped partial increment,
    // matching the node recursion in the limit s -> h.
    return std::exp(-ell_ * s) * values_[i] + (path_->eval(t) - path_->samples()[i]);
}

ScalarProcessTrace OuTable::trace(double t0, double t1) const {
    ScalarProcessTrace tr;
    tr.label = ScalarProcessTrace::Label::y;
    for (std::size_t i = path_->floor_index(t0); i < path_->node_count(); ++i) {
        const double t = path_->node_time(i);
        if (t > t1 + 1e-12) break;
        if (t < t0 - 1e-12) continue;
        tr.times.push_back(t);
        tr.values.push_back(values_[i]);
    }
    return tr;
}

double ou_y(const WienerPath& path, double ell, double t) {
    check_ell(ell);
    if (t < path.t_min() - 1e-9 * path.step() || t > path.t_max() + 1e-9 * path.step()) {
        std::ostringstream os;
        os << "ou_y: t = " << t << " outside sampled interval [" << path.t_min() << ", "
           << path.t_max() << "]";
        throw RangeError(os.str());
    }
    return OuTable(path, ell).eval(t);
}

OuZTable::OuZTable(const WienerPath& path, double ell, double delta)
    : path_(&path), ell_(ell), delta_(delta) {
    check_ell(ell);
    lookahead_ = detail::integer_multiple(delta, path.step(), "ou_z: delta");
    const std::size_t n = path.node_count();
    if (lookahead_ >= n) throw InvalidArgument("ou_z: delta exceeds the sampled window");
    const std::size_t valid = n - lookahead_;
    values_.assign(valid, 0.0);
    const double h = path.step();
    const double decay = std::exp(-ell * h);
    const double k0 = kernel0(ell, h);
    const double k1 = kernel1(ell, h);
    for (std::size_t i = 0; i + 1 < valid; ++i) {
        const double zl = forcing(i);
        const double zr = forcing(i + 1);
        values_[i + 1] = decay * values_[i] + zl * k0 + (zr - zl) / h * k1;
    }
}

double OuZTable::forcing(std::size_t node) const {
    const auto& w = path_->samples();
    return (w[node + lookahead_] - w[node]) / delta_;
}

double OuZTable::t_sup() const { return path_->node_time(values_.size() - 1); }

double OuZTable::eval(double t) const {
    const double h = path_->step();
    if (t < path_->t_min() - 1e-9 * h || t > t_sup() + 1e-9 * h) {
        std::ostringstream os;
        os << "ou_z: t = " << t << " outside usable interval [" << path_->t_min() << ", "
           << t_sup() << "]";
        throw RangeError(os.str());
    }
    std::size_t i = path_->floor_index(t);
    if (i >= values_.size()) i = values_.size() - 1;
    const double ti = path_->node_time(i);
    const double s = t - ti;
    if (std::abs(s) < 1e-12 * h) return values_[i];
    const double zl = forcing(i);
    const double zr = colored_noise(*path_, delta_, t);
    const double slope = (zr - zl) / s;
    return std::exp(-ell_ * s) * values_[i] + zl * kernel0(ell_, s) + slope * kernel1(ell_, s);
}

ScalarProcessTrace OuZTable::trace(double t0, double t1) const {
    ScalarProcessTrace tr;
    tr.label = ScalarProcessTrace::Label::z_delta;
    for (std::size_t i = path_->floor_index(t0); i < values_.size(); ++i) {
        const double t = path_->node_time(i);
        if (t > t1 + 1e-12) break;
        if (t < t0 - 1e-12) continue;
        tr.times.push_back(t);
        tr.values.push_back(values_[i]);
    }
    return tr;
}

double ou_z(const WienerPath& path, double ell, double delta, double t) {
    return OuZTable(path, ell, delta).eval(t);
}

NoiseDiagnosticsReport noise_diagnostics(const WienerPath& path, const NoiseParams& params,
                                         double s, double T,
                                         const std::vector<double>& delta_list) {
    params.validate();
    if (!(T > 0.0)) throw InvalidArgument("noise_diagnostics: T must be positive");

    NoiseDiagnosticsReport report;
    report.s = s;
    report.T = T;
    const OuTable y(path, params.ell);
    report.ou_truncation_warning = y.truncation_warning(s);

    for (double delta : delta_list) {
        const ColoredIntegralTable wz(path, delta);
        const OuZTable z(path, params.ell, delta);
        NoiseDiagnosticsRow row;
        row.delta = delta;

        const std::size_t i0 = path.floor_index(s);
        for (std::size_t i = i0; i < path.node_count(); ++i) {
            const double t = path.node_time(i);
            if (t > s + T + 1e-12) break;
            if (t < s - 1e-12 || t > wz.t_sup() + 1e-12) continue;
            row.sup_wz_error = std::max(row.sup_wz_error, std::abs(wz.eval(t) - path.eval(t)));
            row.sup_zy_error = std::max(row.sup_zy_error, std::abs(z.eval(t) - y.eval(t)));
            row.growth_ratio = std::max(
                row.growth_ratio, std::abs(colored_noise(path, delta, t)) / (1.0 + std::abs(t)));
        }
        row.ergodic_mean = std::abs(wz.eval(std::min(T, wz.t_sup())) / T);
        report.rows.push_back(row);
    }
    return report;
}

std::string NoiseDiagnosticsReport::to_csv() const {
    csv::Writer w({"delta", "sup_wz_error", "sup_zy_error", "ergodic_mean", "growth_ratio"});
    for (const auto& r : rows)
        w.row(r.delta, r.sup_wz_error, r.sup_zy_error, r.ergodic_mean, r.growth_ratio);
    return w.str();
}

} // namespace cbf
