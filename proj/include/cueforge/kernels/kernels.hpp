#pragma once

// Data-parallel inner loops shared by physics, shot planning and line fitting.
//
// Every kernel has a scalar reference implementation and an AVX2 variant. The
// backend is chosen once at runtime from CPU features (overridable through the
// CUEFORGE_SIMD environment variable or set_backend()). Both backends evaluate
// the same IEEE operations in the same order, so their results are bit-identical;
// the equivalence tests hold them to that.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace cueforge::kernels {

enum class Backend
{
    scalar,
    avx2,
};

bool backend_supported(Backend b) noexcept;
Backend active_backend() noexcept;
// Throws cueforge::Error when the CPU lacks the requested instruction set.
void set_backend(Backend b);
std::string_view backend_name(Backend b) noexcept;

// Structure-of-arrays view over circles. Velocities may be null for static bodies.
struct CircleSoA
{
    const double* x = nullptr;
    const double* y = nullptr;
    const double* vx = nullptr;
    const double* vy = nullptr;
    std::size_t count = 0;
};

struct Mover
{
    double x, y, vx, vy;
};

struct Contact
{
    double s = std::numeric_limits<double>::infinity();
    int index = -1; // -1 when no contact within the limit
};

// Earliest parameter s in [0, limit] at which |(p_j + v_j s) - (p_m + v_m s)|
// reaches sqrt(reach_sq) while the pair is approaching. Pairs already within
// reach and approaching report s = 0. Ties resolve to the lowest index.
Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept;

// Bit i set when point i lies strictly closer than sqrt(min_dist_sq) to segment
// [a, b]. count must be <= 64.
std::uint64_t segment_blockers(const double* x, const double* y, std::size_t count, double ax, double ay,
                               double bx, double by, double min_dist_sq) noexcept;

// Marks points with |nx*x + ny*y - offset| <= tol and returns how many there are.
std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept;

// Direct entry points, used by the equivalence tests.
namespace scalar {
Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept;
std::uint64_t segment_blockers(const double* x, const double* y, std::size_t count, double ax, double ay,
                               double bx, double by, double min_dist_sq) noexcept;
std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept;
} // namespace scalar

namespace avx2 {
Contact earliest_contact(const CircleSoA& bodies, const Mover& mover, double reach_sq, double limit) noexcept;
std::uint64_t segment_blockers(const double* x, const double* y, std::size_t count, double ax, double ay,
                               double bx, double by, double min_dist_sq) noexcept;
std::size_t line_inliers(const double* x, const double* y, std::size_t count, double nx, double ny,
                         double offset, double tol, std::uint8_t* mask) noexcept;
} // namespace avx2

} // namespace cueforge::kernels
