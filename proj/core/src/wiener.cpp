#include "cbf/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbf/rng.hpp"

namespace cbf {

namespace {

std::string interval_message(const char* what, double t, double lo, double hi) {
    std::ostringstream os;
    os << what << ": t = " << t << " outside sampled interval [" << lo << ", " << hi << "]";
    return os.str();
}

} // namespace

void NoiseParams::validate() const {
    if (!(delta > 0.0) || delta > 1.0)
        throw InvalidArgument("NoiseParams: delta must lie in (0, 1]");
    if (!(ell > 0.0)) throw InvalidArgument("NoiseParams: ell must be positive");
    if (sigma < 0.0) throw InvalidArgument("NoiseParams: sigma must be nonnegative");
    if (kappa < 0.0) throw InvalidArgument("NoiseParams: kappa must be nonnegative");
}

namespace detail {

std::size_t integer_multiple(double x, double h, const std::string& what) {
    if (!(x > 0.0)) throw InvalidArgument(what + " must be positive");
    const double ratio = x / h;
    const double rounded = std::round(ratio);
    if (rounded < 0.5 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw InvalidArgument(what + " must be an integer multiple of the path step");
    return static_cast<std::size_t>(rounded);
}

} // namespace detail

WienerPath WienerPath::sample(std::uint64_t seed, double t_min, double t_max, double h) {
    if (!(h > 0.0)) throw InvalidArgument("sample_wiener: h must be positive");
    if (!(t_min < 0.0 && 0.0 < t_max))
        throw InvalidArgument("sample_wiener: required t_min < 0 < t_max");
    const double m = -t_min / h;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
        throw InvalidArgument("sample_wiener: t_min must be a negative integer multiple of h");

    WienerPath p;
    p.seed_ = seed;
    p.h_ = h;
    p.zero_index_ = static_cast<std::size_t>(std::round(m));
    const std::size_t n_up = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));
    p.t_min_ = -static_cast<double>(p.zero_index_) * h;
    p.samples_.assign(p.zero_index_ + n_up + 1, 0.0);

    const double scale = std::sqrt(h);
    // Increment over [t_i, t_{i+1}] is scale * gaussian(seed, i); cumulative
    // sums run outward from the pinned zero node in both directions.
    for (std::size_t i = p.zero_index_; i + 1 < p.samples_.size(); ++i)
        p.samples_[i + 1] = p.samples_[i] + scale * rng::gaussian(seed, i);
    for (std::size_t i = p.zero_index_; i > 0; --i)
        p.samples_[i - 1] = p.samples_[i] - scale * rng::gaussian(seed, i - 1);
    return p;
}

WienerPath WienerPath::from_function(const std::function<double(double)>& f,
                                     double t_min, double t_max, double h) {
    if (!(h > 0.0)) throw InvalidArgument("from_function: h must be positive");
    if (!(t_min < 0.0 && 0.0 < t_max))
        throw InvalidArgument("from_function: required t_min < 0 < t_max");
    const double m = -t_min / h;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
        throw InvalidArgument("from_function: t_min must be a negative integer multiple of h");

    WienerPath p;
    p.seed_ = 0;
    p.h_ = h;
    p.zero_index_ = static_cast<std::size_t>(std::round(m));
    const std::size_t n_up = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));
    p.t_min_ = -static_cast<double>(p.zero_index_) * h;
    p.samples_.resize(p.zero_index_ + n_up + 1);
    const double f0 = f(0.0);
    for (std::size_t i = 0; i < p.samples_.size(); ++i)
        p.samples_[i] = f(p.node_time(i)) - f0;
    p.samples_[p.zero_index_] = 0.0;
    return p;
}

std::size_t WienerPath::floor_index(double t) const {
    const double pos = (t - t_min_) / h_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(pos + 1e-9));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(node_count()) - 1);
    return static_cast<std::size_t>(i);
}

double WienerPath::eval(double t) const {
    const double lo = t_min();
    const double hi = t_max();
    const double tol = 1e-9 * h_;
    if (t < lo - tol || t > hi + tol)
        throw RangeError(interval_message("eval_omega", t, lo, hi));
    const std::size_t i = std::min(floor_index(t), node_count() - 2);
    const double frac = (t - node_time(i)) / h_;
    if (std::abs(frac) < 1e-12) return samples_[i];
    if (std::abs(frac - 1.0) < 1e-12) return samples_[i + 1];
    return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
}

WienerPath WienerPath::shifted(double c) const {
    const double pos = (c - 0.0) / h_;
    if (std::abs(pos - std::round(pos)) > 1e-9)
        throw InvalidArgument("WienerPath::shifted: shift must lie on the node lattice");
    const auto offset = static_cast<std::ptrdiff_t>(std::round(pos));
    const auto zi = static_cast<std::ptrdiff_t>(zero_index_);
    const auto n = static_cast<std::ptrdiff_t>(node_count());
    if (zi + offset < 0 || zi + offset >= n)
        throw RangeError("WienerPath::shifted: shift outside sampled interval");

    WienerPath p;
    p.seed_ = seed_;
    p.h_ = h_;
    const double wc = samples_[static_cast<std::size_t>(zi + offset)];
    p.zero_index_ = static_cast<std::size_t>(zi + offset);
    p.t_min_ = t_min_ - static_cast<double>(offset) * h_;
    p.samples_.resize(node_count());
    for (std::size_t i = 0; i < node_count(); ++i) p.samples_[i] = samples_[i] - wc;
    // Node i of the new path carries omega(t_i + c) - omega(c); the grid is
    // relabeled so that the node formerly at c becomes the zero node.
    p.samples_[p.zero_index_] = 0.0;
    return p;
}

double eval_omega(const WienerPath& path, double t) { return path.eval(t); }

double colored_noise(const WienerPath& path, double delta, double t) {
    detail::integer_multiple(delta, path.step(), "colored_noise: delta");
    return (path.eval(t + delta) - path.eval(t)) / delta;
}

double integral_colored(const WienerPath& path, double delta, double t) {
    detail::integer_multiple(delta, path.step(), "integral_colored: delta");
    if (t == 0.0) return 0.0;
    const double a = std::min(0.0, t);
    const double b = std::max(0.0, t);
    const double sign = (t > 0.0) ? 1.0 : -1.0;
    const double h = path.step();

    auto z = [&](double s) { return (path.eval(s + delta) - path.eval(s)) / delta; };

    // Trapezoid over node-aligned segments; the integrand is piecewise linear
    // with kinks only at nodes, so this is exact up to roundoff.
    const std::size_t ia = path.floor_index(a);
    double first_node = path.node_time(ia);
    if (first_node < a - 1e-9 * h) first_node += h;
    double acc = 0.0;
    if (first_node > b) return sign * 0.5 * (z(a) + z(b)) * (b - a);
    if (first_node > a + 1e-12 * h) acc += 0.5 * (z(a) + z(first_node)) * (first_node - a);
    double left = first_node;
    while (left + h <= b + 1e-9 * h) {
        const double right = std::min(left + h, b);
        acc += 0.5 * (z(left) + z(right)) * (right - left);
        left = right;
        if (std::abs(right - b) <= 1e-12 * h) break;
    }
    if (left < b - 1e-12 * h) acc += 0.5 * (z(left) + z(b)) * (b - left);
    return sign * acc;
}

ColoredIntegralTable::ColoredIntegralTable(const WienerPath& path, double delta)
    : path_(&path), delta_(delta) {
    lookahead_ = detail::integer_multiple(delta, path.step(), "ColoredIntegralTable: delta");
    const auto& w = path.samples();
    const std::size_t n = path.node_count();
    if (lookahead_ >= n)
        throw InvalidArgument("ColoredIntegralTable: delta exceeds the sampled window");
    const std::size_t valid = n - lookahead_; // nodes where Z is defined
    std::vector<double> z(valid);
    for (std::size_t i = 0; i < valid; ++i) z[i] = (w[i + lookahead_] - w[i]) / delta;

    cumulative_.assign(valid, 0.0);
    const std::size_t zi = path.zero_index();
    if (zi >= valid)
        throw InvalidArgument("ColoredIntegralTable: window does not reach t = 0");
    const double h = path.step();
    for (std::size_t i = zi; i + 1 < valid; ++i)
        cumulative_[i + 1] = cumulative_[i] + 0.5 * (z[i] + z[i + 1]) * h;
    for (std::size_t i = zi; i > 0; --i)
        cumulative_[i - 1] = cumulative_[i] - 0.5 * (z[i - 1] + z[i]) * h;
}

double ColoredIntegralTable::t_sup() const {
    return path_->node_time(cumulative_.size() - 1);
}

double ColoredIntegralTable::eval(double t) const {
    const double h = path_->step();
    const double lo = path_->t_min();
    const double hi = t_sup();
    if (t < lo - 1e-9 * h || t > hi + 1e-9 * h)
        throw RangeError(interval_message("integral_colored", t, lo, hi));
    std::size_t i = path_->floor_index(t);
    if (i >= cumulative_.size()) i = cumulative_.size() - 1;
    const double ti = path_->node_time(i);
    const double s = t - ti;
    if (std::abs(s) < 1e-12 * h) return cumulative_[i];
    const double zl = colored_noise(*path_, delta_, ti);
    const double zr = colored_noise(*path_, delta_, t);
    return cumulative_[i] + 0.5 * (zl + zr) * s;
}

} // namespace cbf
