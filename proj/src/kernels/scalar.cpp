#include "cueforge/kernels/kernels.hpp"

#include "lanes.hpp"

namespace cueforge::kernels::scalar {

Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept
{
    Contact best;
    for (std::size_t j = 0; j < bodies.count; ++j) {
        const double bvx = bodies.vx ? bodies.vx[j] : 0.0;
        const double bvy = bodies.vy ? bodies.vy[j] : 0.0;
        const double s = detail::contact_param(bodies.x[j] - mover.x, bodies.y[j] - mover.y, bvx - mover.vx,
                                               bvy - mover.vy, reach_sq);
        if (s <= limit && s < best.s) {
            best.s = s;
            best.index = static_cast<int>(j);
        }
    }
    return best;
}

std::uint64_t segment_blockers(const double* x, const double* y, std::size_t count, double ax, double ay,
                               double bx, double by, double min_dist_sq) noexcept
{
    const double abx = bx - ax;
    const double aby = by - ay;
    const double len2 = abx * abx + aby * aby;
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < count; ++i)
        if (detail::segment_blocks(x[i], y[i], ax, ay, abx, aby, len2, min_dist_sq))
            mask |= std::uint64_t{1} << i;
    return mask;
}

std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const bool in = detail::within_band(x[i], y[i], nx, ny, offset, tol);
        mask[i] = in ? 1 : 0;
        n += in ? 1 : 0;
    }
    return n;
}

} // namespace cueforge::kernels::scalar
