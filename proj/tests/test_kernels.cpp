#include "doctest.h"

#include "cueforge/common/vec2.hpp"
#include "cueforge/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace cueforge;
namespace k = cueforge::kernels;

namespace {

struct Cloud
{
    std::vector<double> x, y, vx, vy;
};

Cloud random_cloud(std::mt19937_64& rng, std::size_t n, bool still)
{
    std::uniform_real_distribution<double> pos(0.0, 100.0), vel(-50.0, 50.0);
    Cloud c;
    for (std::size_t i = 0; i < n; ++i) {
        c.x.push_back(pos(rng));
        c.y.push_back(pos(rng));
        c.vx.push_back(still ? 0.0 : vel(rng));
        c.vy.push_back(still ? 0.0 : vel(rng));
    }
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Smallest nonnegative root of |d + w s| = R via the textbook quadratic formula.
double textbook_contact(Vec2 d, Vec2 w, double reach)
{
    const double a = dot(w, w), b = 2 * dot(d, w), c = dot(d, d) - reach * reach;
    if (dot(d, w) >= 0)
        return INFINITY;
    if (c <= 0)
        return 0;
    const double disc = b * b - 4 * a * c;
    if (disc < 0)
        return INFINITY;
    return (-b - std::sqrt(disc)) / (2 * a);
}

} // namespace

TEST_CASE("earliest_contact matches the textbook root")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const Cloud c = random_cloud(rng, 9, false);
        const k::Mover m{50, 50, 30, -20};
        const double reach = 14.0;
        double best = INFINITY;
        int best_i = -1;
        for (std::size_t i = 0; i < 9; ++i) {
            const double s = textbook_contact({c.x[i] - m.x, c.y[i] - m.y}, {c.vx[i] - m.vx, c.vy[i] - m.vy}, reach);
            if (s <= 2.0 && s < best) {
                best = s;
                best_i = static_cast<int>(i);
            }
        }
        const auto got = k::scalar::earliest_contact({c.x.data(), c.y.data(), c.vx.data(), c.vy.data(), 9}, m,
                                                     reach * reach, 2.0);
        CHECK(got.index == best_i);
        if (best_i >= 0)
            CHECK(got.s == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("earliest_contact edge cases")
{
    const double x[] = {20.0, 10.0, 5.0};
    const double y[] = {0.0, 0.0, 0.0};
    SUBCASE("overlapping and approaching reports zero")
    {
        const auto c = k::scalar::earliest_contact({x + 2, y, nullptr, nullptr, 1}, {0, 0, 1, 0}, 49.0, 1.0);
        CHECK(c.index == 0);
        CHECK(c.s == 0.0);
    }
    SUBCASE("receding pairs never touch")
    {
        const auto c = k::scalar::earliest_contact({x, y, nullptr, nullptr, 3}, {0, 0, -1, 0}, 49.0, 100.0);
        CHECK(c.index == -1);
    }
    SUBCASE("limit excludes late contacts")
    {
        const auto c = k::scalar::earliest_contact({x, y, nullptr, nullptr, 1}, {0, 0, 1, 0}, 49.0, 12.0);
        CHECK(c.index == -1);
        const auto d = k::scalar::earliest_contact({x, y, nullptr, nullptr, 1}, {0, 0, 1, 0}, 49.0, 13.0);
        CHECK(d.s == doctest::Approx(13.0));
    }
    SUBCASE("ties go to the lowest index")
    {
        const double tx[] = {0.0, 30.0, 30.0};
        const double ty[] = {-50.0, 0.0, 0.0};
        const auto c = k::scalar::earliest_contact({tx, ty, nullptr, nullptr, 3}, {0, 0, 1, 0}, 49.0, 100.0);
        CHECK(c.index == 1);
    }
}

TEST_CASE("segment_blockers matches a direct distance oracle")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 500; ++trial) {
        const Cloud c = random_cloud(rng, 40, true);
        const Vec2 a{u(rng), u(rng)};
        const Vec2 b = trial % 10 == 0 ? a : Vec2{u(rng), u(rng)};
        const double md = 14.0;
        std::uint64_t expect = 0;
        for (std::size_t i = 0; i < 40; ++i) {
            const Vec2 p{c.x[i], c.y[i]};
            double dist;
            if (a == b) {
                dist = distance(p, a);
            } else {
                const Vec2 ab = b - a;
                const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
                dist = distance(p, a + ab * t);
            }
            if (dist < md)
                expect |= std::uint64_t{1} << i;
        }
        CHECK(k::scalar::segment_blockers(c.x.data(), c.y.data(), 40, a.x, a.y, b.x, b.y, md * md) == expect);
    }
}

TEST_CASE("line_inliers counts the band")
{
    const double x[] = {0, 1, 2, 3, 4, 5};
    const double y[] = {0, 0.5, -2.5, 2, 0, 1.99};
    std::uint8_t mask[6];
    CHECK(k::scalar::line_inliers(x, y, 6, 0, 1, 0, 2.0, mask) == 5);
    CHECK(mask[2] == 0);
    CHECK(mask[3] == 1);
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference")
{
    if (!k::backend_supported(k::Backend::avx2)) {
        MESSAGE("AVX2 not available; skipping equivalence");
        return;
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 100.0), v(-60.0, 60.0);
    for (std::size_t n = 0; n <= 37; ++n) {
        for (int trial = 0; trial < 300; ++trial) {
            const Cloud c = random_cloud(rng, n, trial % 3 == 0);
            const k::Mover m{u(rng), u(rng), v(rng), v(rng)};
            const double reach = trial % 5 == 0 ? 30000.0 : 196.0;
            const k::CircleSoA soa{c.x.data(), c.y.data(), trial % 4 == 0 ? nullptr : c.vx.data(),
                                   trial % 4 == 0 ? nullptr : c.vy.data(), n};
            const double limit = trial % 2 ? 0.5 : 1e9;
            const auto s = k::scalar::earliest_contact(soa, m, reach, limit);
            const auto a = k::avx2::earliest_contact(soa, m, reach, limit);
            REQUIRE(s.index == a.index);
            REQUIRE(same_bits(s.s, a.s));

            if (n <= 64) {
                const double bx = trial % 7 == 0 ? m.x : u(rng);
                const double by = trial % 7 == 0 ? m.y : u(rng);
                REQUIRE(k::scalar::segment_blockers(c.x.data(), c.y.data(), n, m.x, m.y, bx, by, 196.0) ==
                        k::avx2::segment_blockers(c.x.data(), c.y.data(), n, m.x, m.y, bx, by, 196.0));
            }

            std::vector<std::uint8_t> ms(n + 1), ma(n + 1);
            const double ang = u(rng);
            const double nx = std::cos(ang), ny = std::sin(ang);
            REQUIRE(k::scalar::line_inliers(c.x.data(), c.y.data(), n, nx, ny, 40.0, 10.0, ms.data()) ==
                    k::avx2::line_inliers(c.x.data(), c.y.data(), n, nx, ny, 40.0, 10.0, ma.data()));
            REQUIRE(ms == ma);
        }
    }
}

TEST_CASE("backend selection")
{
    const auto before = k::active_backend();
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(k::backend_name(k::Backend::scalar) == "scalar");
    if (k::backend_supported(k::Backend::avx2)) {
        k::set_backend(k::Backend::avx2);
        CHECK(k::active_backend() == k::Backend::avx2);
    }
    k::set_backend(before);
}
