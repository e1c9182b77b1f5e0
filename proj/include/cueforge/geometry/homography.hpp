#pragma once

#include "cueforge/common/vec2.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace cueforge {

// Image frame -> template frame.
struct Homography
{
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    Vec2 apply(Vec2 p) const;
    // Homogeneous weight of p; near zero means p maps to the line at infinity.
    double weight(Vec2 p) const { return m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2); }
    Homography inverse() const;
    // Scales so the bottom-right entry is 1 (when it is not ~0).
    Homography normalized() const;
};

struct HomographyFit
{
    Homography h;
    double rmse_px = 0; // reprojection error in the source (image) frame
};

// Hartley-normalized DLT over all pairs (source, destination).
// Throws GeometryError(degenerate_configuration) on rank deficiency.
HomographyFit estimate_homography(const std::vector<std::pair<Vec2, Vec2>>& pairs);

} // namespace cueforge
