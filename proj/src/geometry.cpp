// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsalloc {

void validate_bounds(const Bounds& bounds, int expected_size) {
    if (bounds.u_min.size() != bounds.u_max.size())
        throw std::invalid_argument("bounds: u_min and u_max lengths differ");
    if (bounds.u_min.size() == 0)
        throw std::invalid_argument("bounds: empty");
    if (expected_size >= 0 && bounds.u_min.size() != expected_size)
        throw std::invalid_argument("bounds: expected length " +
                                    std::to_string(expected_size) + ", got " +
                                    std::to_string(bounds.u_min.size()));
    for (Eigen::Index l = 0; l < bounds.u_min.size(); ++l) {
        if (!std::isfinite(bounds.u_min(l)) || !std::isfinite(bounds.u_max(l)))
            throw std::invalid_argument("bounds: non-finite limit at element " +
                                        std::to_string(l + 1));
        if (!(bounds.u_min(l) < bounds.u_max(l)))
            throw std::invalid_argument("bounds: u_min >= u_max at element " +
                                        std::to_string(l + 1));
    }
}

Vector center(const Bounds& bounds) {
    return 0.5 * (bounds.u_max + bounds.u_min);
}

Vector border(const Vector& u, const Bounds& bounds) {
    const Vector c = center(bounds);
    Vector b(u.size());
    for (Eigen::Index l = 0; l < u.size(); ++l)
        b(l) = (u(l) >= c(l)) ? bounds.u_max(l) : bounds.u_min(l);
    return b;
}

WeightedDistance weighted_distance(const Vector& u, const Bounds& bounds) {
    WeightedDistance wd;
    wd.center = center(bounds);
    wd.border = border(u, bounds);
    wd.w = (u - wd.center).cwiseQuotient(wd.border - wd.center);
    return wd;
}

SaturationState saturated_set(const WeightedDistance& wd, double tie_tol) {
    SaturationState sat;
    const double wmax = wd.w.maxCoeff();
    const double cut = wmax * (1.0 - tie_tol);
    for (int l = 0; l < static_cast<int>(wd.w.size()); ++l) {
        if (wd.w(l) >= cut)
            sat.saturated.push_back(l);
        else
            sat.free_set.push_back(l);
    }
    sat.delta_bar.resize(static_cast<Eigen::Index>(sat.saturated.size()));
    for (std::size_t i = 0; i < sat.saturated.size(); ++i) {
        const int l = sat.saturated[i];
        sat.delta_bar(static_cast<Eigen::Index>(i)) =
            (wd.border(l) - wd.center(l)) > 0.0 ? 1.0 : -1.0;
    }
    sat.pivot = sat.saturated.front();
    return sat;
}

Vector saturated_step(const SaturationState& sat, const WeightedDistance& wd) {
    const Vector hb = wd.border - wd.center;
    const double scale = std::abs(hb(sat.pivot));
    Vector step(static_cast<Eigen::Index>(sat.saturated.size()));
    for (std::size_t i = 0; i < sat.saturated.size(); ++i)
        step(static_cast<Eigen::Index>(i)) = hb(sat.saturated[i]) / scale;
    return step;
}

}  // namespace nsalloc
