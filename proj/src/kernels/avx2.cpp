// Compiled with -mavx2 (and without -mfma); only reached after a runtime CPU check.

#include "cueforge/kernels/kernels.hpp"

#include "lanes.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define CUEFORGE_HAVE_AVX2_TU 1
#endif

namespace cueforge::kernels::avx2 {

#ifdef CUEFORGE_HAVE_AVX2_TU

Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept
{
    Contact best;
    const std::size_t n = bodies.count;
    const __m256d mx = _mm256_set1_pd(mover.x);
    const __m256d my = _mm256_set1_pd(mover.y);
    const __m256d mvx = _mm256_set1_pd(mover.vx);
    const __m256d mvy = _mm256_set1_pd(mover.vy);
    const __m256d reach = _mm256_set1_pd(reach_sq);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d none = _mm256_set1_pd(detail::kNoContact);
    alignas(32) double lane[4];

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d bvx = bodies.vx ? _mm256_loadu_pd(bodies.vx + j) : zero;
        const __m256d bvy = bodies.vy ? _mm256_loadu_pd(bodies.vy + j) : zero;
        const __m256d dpx = _mm256_sub_pd(_mm256_loadu_pd(bodies.x + j), mx);
        const __m256d dpy = _mm256_sub_pd(_mm256_loadu_pd(bodies.y + j), my);
        const __m256d dvx = _mm256_sub_pd(bvx, mvx);
        const __m256d dvy = _mm256_sub_pd(bvy, mvy);

        const __m256d b = _mm256_add_pd(_mm256_mul_pd(dpx, dvx), _mm256_mul_pd(dpy, dvy));
        const __m256d c = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(dpx, dpx), _mm256_mul_pd(dpy, dpy)), reach);
        const __m256d a = _mm256_add_pd(_mm256_mul_pd(dvx, dvx), _mm256_mul_pd(dvy, dvy));
        const __m256d disc = _mm256_sub_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(a, c));

        const __m256d approaching = _mm256_cmp_pd(b, zero, _CMP_LT_OQ);
        const __m256d touching = _mm256_cmp_pd(c, zero, _CMP_LE_OQ);
        const __m256d real_root = _mm256_cmp_pd(disc, zero, _CMP_GE_OQ);

        __m256d s = _mm256_div_pd(c, _mm256_sub_pd(_mm256_sqrt_pd(disc), b));
        s = _mm256_blendv_pd(s, zero, touching);
        s = _mm256_blendv_pd(none, s, _mm256_and_pd(approaching, _mm256_or_pd(touching, real_root)));
        _mm256_store_pd(lane, s);

        for (int k = 0; k < 4; ++k) {
            if (lane[k] <= limit && lane[k] < best.s) {
                best.s = lane[k];
                best.index = static_cast<int>(j) + k;
            }
        }
    }
    for (; j < n; ++j) {
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

    const __m256d vax = _mm256_set1_pd(ax);
    const __m256d vay = _mm256_set1_pd(ay);
    const __m256d vabx = _mm256_set1_pd(abx);
    const __m256d vaby = _mm256_set1_pd(aby);
    const __m256d vlen2 = _mm256_set1_pd(len2);
    const __m256d vmin = _mm256_set1_pd(min_dist_sq);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const bool has_length = len2 > 0.0;

    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d px = _mm256_loadu_pd(x + i);
        const __m256d py = _mm256_loadu_pd(y + i);
        __m256d t = zero;
        if (has_length) {
            t = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(px, vax), vabx),
                                            _mm256_mul_pd(_mm256_sub_pd(py, vay), vaby)),
                              vlen2);
            t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
        }
        const __m256d dx = _mm256_sub_pd(px, _mm256_add_pd(vax, _mm256_mul_pd(t, vabx)));
        const __m256d dy = _mm256_sub_pd(py, _mm256_add_pd(vay, _mm256_mul_pd(t, vaby)));
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const int bits = _mm256_movemask_pd(_mm256_cmp_pd(d2, vmin, _CMP_LT_OQ));
        mask |= static_cast<std::uint64_t>(bits) << i;
    }
    for (; i < count; ++i)
        if (detail::segment_blocks(x[i], y[i], ax, ay, abx, aby, len2, min_dist_sq))
            mask |= std::uint64_t{1} << i;
    return mask;
}

std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept
{
    const __m256d vnx = _mm256_set1_pd(nx);
    const __m256d vny = _mm256_set1_pd(ny);
    const __m256d voff = _mm256_set1_pd(offset);
    const __m256d vtol = _mm256_set1_pd(tol);
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t n = 0;
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d r = _mm256_sub_pd(
            _mm256_add_pd(_mm256_mul_pd(vnx, _mm256_loadu_pd(x + i)), _mm256_mul_pd(vny, _mm256_loadu_pd(y + i))),
            voff);
        const int bits = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_andnot_pd(sign, r), vtol, _CMP_LE_OQ));
        for (int k = 0; k < 4; ++k) {
            const bool in = (bits >> k) & 1;
            mask[i + k] = in ? 1 : 0;
            n += in ? 1 : 0;
        }
    }
    for (; i < count; ++i) {
        const bool in = detail::within_band(x[i], y[i], nx, ny, offset, tol);
        mask[i] = in ? 1 : 0;
        n += in ? 1 : 0;
    }
    return n;
}

#else

Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept
{
    return scalar::earliest_contact(bodies, mover, reach_sq, limit);
}

std::uint64_t segment_blockers(const double* x, const double* y, std::size_t count, double ax, double ay,
                               double bx, double by, double min_dist_sq) noexcept
{
    return scalar::segment_blockers(x, y, count, ax, ay, bx, by, min_dist_sq);
}

std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept
{
    return scalar::line_inliers(x, y, count, nx, ny, offset, tol, mask);
}

#endif

} // namespace cueforge::kernels::avx2
