#include "cueforge/common/errors.hpp"
#include "cueforge/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace cueforge::kernels {

namespace {

Backend detect() noexcept
{
    if (const char* forced = std::getenv("CUEFORGE_SIMD")) {
        const std::string v = forced;
        if (v == "scalar")
            return Backend::scalar;
        if (v == "avx2" && backend_supported(Backend::avx2))
            return Backend::avx2;
    }
    return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current()
{
    static std::atomic<Backend> backend{detect()};
    return backend;
}

} // namespace

bool backend_supported(Backend b) noexcept
{
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b)
{
    if (!backend_supported(b))
        throw Error("SIMD backend not supported on this CPU: " + std::string(backend_name(b)));
    current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) noexcept
{
    return b == Backend::avx2 ? "avx2" : "scalar";
}

Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept
{
    if (active_backend() == Backend::avx2)
        return avx2::earliest_contact(bodies, mover, reach_sq, limit);
    return scalar::earliest_contact(bodies, mover, reach_sq, limit);
}

std::uint64_t segment_blockers(const double* x, const double* y, std::size_t count, double ax, double ay,
                               double bx, double by, double min_dist_sq) noexcept
{
    if (active_backend() == Backend::avx2)
        return avx2::segment_blockers(x, y, count, ax, ay, bx, by, min_dist_sq);
    return scalar::segment_blockers(x, y, count, ax, ay, bx, by, min_dist_sq);
}

std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept
{
    if (active_backend() == Backend::avx2)
        return avx2::line_inliers(x, y, count, nx, ny, offset, tol, mask);
    return scalar::line_inliers(x, y, count, nx, ny, offset, tol, mask);
}

} // namespace cueforge::kernels
