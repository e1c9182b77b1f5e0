#pragma once

#include "cueforge/common/vec2.hpp"
#include "cueforge/geometry/homography.hpp"
#include "cueforge/ingest/ingest.hpp"

#include <Eigen/Dense>

#include <optional>

namespace cueforge {

struct TableTemplate;

// 3x4 projection from table space (template x, y; z up from the bed) to the
// image. Covers both pinhole cameras and the affine top-down view (third row
// 0 0 0 1).
struct Camera
{
    Eigen::Matrix<double, 3, 4> p = Eigen::Matrix<double, 3, 4>::Zero();

    bool affine() const { return p(2, 0) == 0 && p(2, 1) == 0 && p(2, 2) == 0; }
    double depth(const Eigen::Vector3d& x) const { return p.row(2).head<3>().dot(x) + p(2, 3); }
    Vec2 project(const Eigen::Vector3d& x) const;
    // Homography from the plane z = height to the image.
    Homography plane_to_image(double height) const;
};

// Image-space bounding box of a sphere, nullopt when the sphere is not
// entirely in front of the camera.
std::optional<Box> sphere_bbox(const Camera& cam, const Eigen::Vector3d& center, double radius);

// Recovers a camera from the image -> dot-plane homography, assuming square
// pixels and the principal point at the image centre. A near-affine h with
// isotropic scale gives the top-down affine camera. nullopt when the
// homography does not admit such a camera.
std::optional<Camera> recover_camera(const Homography& h, double dot_plane_height, double image_width,
                                     double image_height);

// Camera-elevation factor from h: 1 - (minor / major) singular value of the
// template -> image Jacobian at the table centre, which equals 1 - cos of the
// camera's angle from vertical for a camera aimed at the centre.
double elevation_factor(const Homography& h, const TableTemplate& t);

} // namespace cueforge
