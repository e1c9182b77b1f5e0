#pragma once

#include "cueforge/common/vec2.hpp"
#include "cueforge/geometry/template.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace cueforge {

// Line in normal form dot(normal, p) == offset; direction = perp(normal).
struct LineFit
{
    Vec2 direction;
    Vec2 normal;
    double offset = 0;
    std::vector<int> inliers; // indices into the input dots

    double distance(Vec2 p) const { return dot(normal, p) - offset; }
};

struct LineOptions
{
    double tolerance = 2.0;
    int max_iters = 500;
    std::uint64_t seed = 0;
};

// 2 px at 640 px, scaled with the image width.
inline double default_line_tolerance(double image_width) { return 2.0 * image_width / 640.0; }

// Sequential RANSAC: the best-supported line is fitted, its inliers removed,
// four times over. Candidates are scored by inlier count minus the number of
// dots (all of them, claimed or not) on the minority side; a rail has every
// other dot on one side, a diagonal or a line through clutter does not.
// Throws GeometryError (line_estimation, degenerate_configuration).
std::array<LineFit, 4> fit_table_lines(const std::vector<Vec2>& dots, const LineOptions& options = {});

// Total least squares through the given points.
LineFit fit_line(const std::vector<Vec2>& points);

std::optional<Vec2> intersect(const LineFit& a, const LineFit& b);

struct Correspondence
{
    Vec2 image;
    Vec2 table;
    int index = 0; // template point index, 0..21
};

// 22 pairs in template order: 18 dots then the 4 corner intersections.
// The image side with the smaller mean y (or x when the long rails are near
// vertical) is taken as the top rail; the rest follow the template's
// traversal. Throws GeometryError (correspondence) with the per-line counts.
std::vector<Correspondence> order_correspondences(const std::array<LineFit, 4>& lines,
                                                  const std::vector<Vec2>& dots, const TableTemplate& t);

} // namespace cueforge
