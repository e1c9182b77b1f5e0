#include "cueforge/geometry/lines.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cueforge {

LineFit fit_line(const std::vector<Vec2>& points)
{
    if (points.size() < 2)
        throw GeometryError(GeometryFailure::line_estimation, "a line needs at least two points");
    Vec2 c{0, 0};
    for (Vec2 p : points)
        c += p;
    c = c / static_cast<double>(points.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (Vec2 p : points) {
        const Vec2 d = p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    // Principal axis of the 2x2 scatter matrix.
    const double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
    LineFit line;
    line.direction = {std::cos(theta), std::sin(theta)};
    line.normal = perp(line.direction);
    line.offset = dot(line.normal, c);
    return line;
}

std::optional<Vec2> intersect(const LineFit& a, const LineFit& b)
{
    const double det = cross(a.normal, b.normal);
    if (std::abs(det) < 1e-12)
        return std::nullopt;
    return Vec2{(a.offset * b.normal.y - b.offset * a.normal.y) / det,
                (a.normal.x * b.offset - b.normal.x * a.offset) / det};
}

namespace {

struct Pool
{
    std::vector<int> index;
    std::vector<double> x, y;
    std::vector<std::uint8_t> mask;

    std::size_t inliers(Vec2 n, double offset, double tol)
    {
        mask.assign(index.size(), 0);
        return kernels::line_inliers(x.data(), y.data(), index.size(), n.x, n.y, offset, tol, mask.data());
    }
};

Pool make_pool(const std::vector<Vec2>& dots, const std::vector<bool>& used)
{
    Pool pool;
    for (std::size_t i = 0; i < dots.size(); ++i) {
        if (used[i])
            continue;
        pool.index.push_back(static_cast<int>(i));
        pool.x.push_back(dots[i].x);
        pool.y.push_back(dots[i].y);
    }
    return pool;
}

long minority_side(const Pool& pool, Vec2 n, double offset, double tol)
{
    long above = 0, below = 0;
    for (std::size_t i = 0; i < pool.index.size(); ++i) {
        const double d = n.x * pool.x[i] + n.y * pool.y[i] - offset;
        if (d > tol)
            ++above;
        else if (d < -tol)
            ++below;
    }
    return std::min(above, below);
}

std::pair<double, double> span(const LineFit& line, const std::vector<Vec2>& dots)
{
    double lo = INFINITY, hi = -INFINITY;
    for (int i : line.inliers) {
        const double s = dot(line.direction, dots[static_cast<std::size_t>(i)]);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {lo, hi};
}

// A rail corner sits just past the end dots of both of its rails; intersections
// of opposite rails land far outside at least one of them.
bool near_span(const LineFit& line, const std::vector<Vec2>& dots, Vec2 p)
{
    const auto [lo, hi] = span(line, dots);
    const double margin = hi - lo;
    const double s = dot(line.direction, p);
    return s >= lo - margin && s <= hi + margin;
}

} // namespace

std::array<LineFit, 4> fit_table_lines(const std::vector<Vec2>& dots, const LineOptions& opt)
{
    if (!(opt.tolerance > 0) || opt.max_iters < 1)
        throw Error("fit_table_lines: tolerance and iteration count must be positive");
    if (dots.size() < 8)
        throw GeometryError(GeometryFailure::line_estimation,
                            "need at least 8 dots to fit the table sides, got " + std::to_string(dots.size()), 0);

    std::mt19937_64 rng(opt.seed);
    std::vector<bool> used(dots.size(), false);
    const Pool all = make_pool(dots, used);
    std::array<LineFit, 4> lines;

    for (int k = 0; k < 4; ++k) {
        Pool pool = make_pool(dots, used);
        const std::size_t n = pool.index.size();
        if (n < 2)
            throw GeometryError(GeometryFailure::line_estimation, "ran out of dots after " + std::to_string(k) + " lines", k);

        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        long best_score = std::numeric_limits<long>::min();
        Vec2 best_n{};
        double best_off = 0;
        for (int it = 0; it < opt.max_iters; ++it) {
            const std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            if (i == j)
                continue;
            const Vec2 a{pool.x[i], pool.y[i]}, b{pool.x[j], pool.y[j]};
            const Vec2 d = b - a;
            if (d.norm() < 1e-12)
                continue;
            const Vec2 nrm = perp(d / d.norm());
            const double off = dot(nrm, a);
            const long count = static_cast<long>(pool.inliers(nrm, off, opt.tolerance));
            const long score = count - minority_side(all, nrm, off, opt.tolerance);
            if (score > best_score) {
                best_score = score;
                best_n = nrm;
                best_off = off;
            }
        }
        if (best_score == std::numeric_limits<long>::min())
            throw GeometryError(GeometryFailure::line_estimation, "no candidate line found", k);

        auto collect = [&](Vec2 nrm, double off) {
            pool.inliers(nrm, off, opt.tolerance);
            std::vector<int> idx;
            for (std::size_t i = 0; i < n; ++i)
                if (pool.mask[i])
                    idx.push_back(pool.index[i]);
            return idx;
        };
        std::vector<int> inl = collect(best_n, best_off);
        if (inl.size() < 2)
            throw GeometryError(GeometryFailure::line_estimation,
                                "line " + std::to_string(k + 1) + " has fewer than 2 inliers", k);

        std::vector<Vec2> pts;
        for (int i : inl)
            pts.push_back(dots[static_cast<std::size_t>(i)]);
        LineFit fit = fit_line(pts);
        for (int pass = 0; pass < 3; ++pass) {
            std::vector<int> refit = collect(fit.normal, fit.offset);
            if (refit.size() < inl.size() || refit == inl)
                break;
            inl = std::move(refit);
            pts.clear();
            for (int i : inl)
                pts.push_back(dots[static_cast<std::size_t>(i)]);
            fit = fit_line(pts);
        }
        fit.inliers = inl;
        for (int i : inl)
            used[static_cast<std::size_t>(i)] = true;
        lines[static_cast<std::size_t>(k)] = std::move(fit);
    }

    int corners = 0;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) {
            const auto p = intersect(lines[a], lines[b]);
            if (p && near_span(lines[a], dots, *p) && near_span(lines[b], dots, *p))
                ++corners;
        }
    if (corners != 4)
        throw GeometryError(GeometryFailure::degenerate_configuration,
                            "expected 4 table corners among the line intersections, found " + std::to_string(corners), 4);
    return lines;
}

namespace {

Vec2 mean_of(const LineFit& line, const std::vector<Vec2>& dots)
{
    Vec2 m{0, 0};
    for (int i : line.inliers)
        m += dots[static_cast<std::size_t>(i)];
    return m / static_cast<double>(line.inliers.size());
}

double shoelace(const std::array<Vec2, 4>& q)
{
    double s = 0;
    for (std::size_t i = 0; i < 4; ++i)
        s += cross(q[i], q[(i + 1) % 4]);
    return s;
}

} // namespace

std::vector<Correspondence> order_correspondences(const std::array<LineFit, 4>& lines,
                                                  const std::vector<Vec2>& dots, const TableTemplate& t)
{
    std::vector<int> counts;
    std::vector<std::size_t> longs, shorts;
    for (std::size_t i = 0; i < 4; ++i) {
        const int c = static_cast<int>(lines[i].inliers.size());
        counts.push_back(c);
        if (c == 6)
            longs.push_back(i);
        else if (c == 3)
            shorts.push_back(i);
    }
    if (longs.size() != 2 || shorts.size() != 2) {
        std::string msg = "rail dot counts must be 6, 6, 3, 3; got";
        for (int c : counts)
            msg += " " + std::to_string(c);
        throw GeometryError(GeometryFailure::correspondence, msg, 4, counts);
    }

    const Vec2 m0 = mean_of(lines[longs[0]], dots), m1 = mean_of(lines[longs[1]], dots);
    const Vec2 d = m1 - m0;
    const bool first_is_top = std::abs(d.y) >= 0.25 * std::abs(d.x) ? d.y > 0 : d.x > 0;
    const LineFit& top = lines[first_is_top ? longs[0] : longs[1]];
    const LineFit& bottom = lines[first_is_top ? longs[1] : longs[0]];
    const LineFit* left = &lines[shorts[0]];
    const LineFit* right = &lines[shorts[1]];

    auto corner = [](const LineFit& a, const LineFit& b) {
        const auto p = intersect(a, b);
        if (!p)
            throw GeometryError(GeometryFailure::degenerate_configuration, "adjacent rails are parallel");
        return *p;
    };
    std::array<Vec2, 4> q{corner(top, *left), corner(top, *right), corner(bottom, *right), corner(bottom, *left)};
    if (shoelace(q) < 0) {
        std::swap(left, right);
        q = {corner(top, *left), corner(top, *right), corner(bottom, *right), corner(bottom, *left)};
    }

    std::vector<Correspondence> out;
    out.reserve(22);
    const std::array<const LineFit*, 4> sides{&top, right, &bottom, left};
    int index = 0;
    for (std::size_t s = 0; s < 4; ++s) {
        const Vec2 from = q[s], to = q[(s + 1) % 4];
        const Vec2 dir = to - from;
        std::vector<Vec2> pts;
        for (int i : sides[s]->inliers)
            pts.push_back(dots[static_cast<std::size_t>(i)]);
        std::sort(pts.begin(), pts.end(),
                  [&](Vec2 a, Vec2 b) { return dot(a - from, dir) < dot(b - from, dir); });
        for (Vec2 p : pts) {
            out.push_back({p, t.point(index), index});
            ++index;
        }
    }
    for (std::size_t c = 0; c < 4; ++c)
        out.push_back({q[c], t.corners[c], 18 + static_cast<int>(c)});
    return out;
}

} // namespace cueforge
