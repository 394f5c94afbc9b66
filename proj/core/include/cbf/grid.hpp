#pragma once

#include <numbers>

#include "cbf/errors.hpp"

namespace cbf {

/// Uniform N x N periodic grid on [0, L)^2 with centered integer wavenumbers.
struct TorusGrid {
    int n = 64;
    double box_length = 2.0 * std::numbers::pi;

    void validate() const {
        if (n < 8 || n % 2 != 0) throw InvalidArgument("TorusGrid: n must be even and >= 8");
        if (!(box_length > 0.0)) throw InvalidArgument("TorusGrid: box_length must be positive");
    }

    double dx() const { return box_length / n; }
    double cell_area() const { return dx() * dx(); }
    double k_unit() const { return 2.0 * std::numbers::pi / box_length; }

    /// Signed mode index for storage index i in [0, n).
    int mode(int i) const { return i < n / 2 ? i : i - n; }

    /// 2/3-rule cutoff: modes with |m| > n/3 are treated as aliased.
    int dealias_limit() const { return n / 3; }

    std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
        return a.n == b.n && a.box_length == b.box_length;
    }
};

} // namespace cbf
