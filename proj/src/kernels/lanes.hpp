#pragma once

// Per-element formulas shared by the scalar backend and the AVX2 remainder
// loops. The vector code mirrors these expressions operation for operation.

#include <cmath>
#include <limits>

namespace cueforge::kernels::detail {

inline constexpr double kNoContact = std::numeric_limits<double>::infinity();

inline double contact_param(double dpx, double dpy, double dvx, double dvy, double reach_sq) noexcept
{
    const double b = dpx * dvx + dpy * dvy;
    if (!(b < 0.0))
        return kNoContact;
    const double c = dpx * dpx + dpy * dpy - reach_sq;
    if (c <= 0.0)
        return 0.0;
    const double a = dvx * dvx + dvy * dvy;
    const double disc = b * b - a * c;
    if (disc < 0.0)
        return kNoContact;
    return c / (std::sqrt(disc) - b);
}

inline bool segment_blocks(double px, double py, double ax, double ay, double abx, double aby, double len2,
                           double min_dist_sq) noexcept
{
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((px - ax) * abx + (py - ay) * aby) / len2;
        t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    }
    const double dx = px - (ax + t * abx);
    const double dy = py - (ay + t * aby);
    return dx * dx + dy * dy < min_dist_sq;
}

inline bool within_band(double x, double y, double nx, double ny, double offset, double tol) noexcept
{
    return std::abs(nx * x + ny * y - offset) <= tol;
}

} // namespace cueforge::kernels::detail
