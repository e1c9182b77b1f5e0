#include "cueforge/geometry/camera.hpp"

#include "cueforge/geometry/template.hpp"

#include <algorithm>
#include <cmath>

namespace cueforge {

Vec2 Camera::project(const Eigen::Vector3d& x) const
{
    const Eigen::Vector3d q = p * x.homogeneous();
    return {q.x() / q.z(), q.y() / q.z()};
}

Homography Camera::plane_to_image(double height) const
{
    Homography h;
    h.m.col(0) = p.col(0);
    h.m.col(1) = p.col(1);
    h.m.col(2) = p.col(2) * height + p.col(3);
    return h.normalized();
}

namespace {

// Image coordinate c where the plane (a - c*b) . X = 0 touches the sphere:
// (a.S - c b.S)^2 = r^2 |a3 - c b3|^2, solved for both roots.
std::optional<std::pair<double, double>> tangent_coords(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                                                        const Eigen::Vector3d& s, double r)
{
    const Eigen::Vector4d sh = s.homogeneous();
    const double da = a.dot(sh), db = b.dot(sh);
    const Eigen::Vector3d a3 = a.head<3>(), b3 = b.head<3>();
    const double qa = db * db - r * r * b3.squaredNorm();
    const double qb = da * db - r * r * a3.dot(b3);
    const double qc = da * da - r * r * a3.squaredNorm();
    if (!(qa > 0))
        return std::nullopt;
    const double disc = qb * qb - qa * qc;
    if (disc < 0)
        return std::nullopt;
    const double root = std::sqrt(disc);
    return std::pair{(qb - root) / qa, (qb + root) / qa};
}

} // namespace

std::optional<Box> sphere_bbox(const Camera& cam, const Eigen::Vector3d& center, double radius)
{
    if (!cam.affine()) {
        // every point of the sphere must be in front of the camera
        const double n = cam.p.row(2).head<3>().norm();
        if (cam.depth(center) <= radius * n)
            return std::nullopt;
    }
    const Eigen::Vector4d row0 = cam.p.row(0).transpose(), row1 = cam.p.row(1).transpose(),
                          row2 = cam.p.row(2).transpose();
    const auto xs = tangent_coords(row0, row2, center, radius);
    const auto ys = tangent_coords(row1, row2, center, radius);
    if (!xs || !ys)
        return std::nullopt;
    if (cam.depth(center) < 0)
        return std::nullopt;
    return Box{xs->first, ys->first, xs->second - xs->first, ys->second - ys->first};
}

std::optional<Camera> recover_camera(const Homography& h, double dot_height, double width, double height)
{
    // g maps the dot plane (x, y, 1) to the image.
    Eigen::Matrix3d g = h.m.inverse();
    g /= g.col(0).head<2>().norm() + g.col(1).head<2>().norm();

    const double cx = width / 2, cy = height / 2;
    const double u1 = g(0, 0) - cx * g(2, 0), v1 = g(1, 0) - cy * g(2, 0), w1 = g(2, 0);
    const double u2 = g(0, 1) - cx * g(2, 1), v2 = g(1, 1) - cy * g(2, 1), w2 = g(2, 1);

    // Near-affine with orthogonal, equal-length axes: top-down view.
    const double n1 = std::hypot(u1, v1), n2 = std::hypot(u2, v2);
    const double persp = (std::abs(w1) + std::abs(w2)) * std::max(width, height) / std::abs(g(2, 2));
    if (persp < 1e-6) {
        if (std::abs(n1 - n2) > 1e-3 * std::max(n1, n2) || std::abs(u1 * u2 + v1 * v2) > 1e-3 * n1 * n2)
            return std::nullopt;
        Camera cam;
        cam.p.col(0) = g.col(0) / g(2, 2);
        cam.p.col(1) = g.col(1) / g(2, 2);
        cam.p.col(3) = g.col(2) / g(2, 2);
        cam.p(2, 3) = 1;
        return cam;
    }

    // Orthogonality and equal norm of the first two rotation columns, each
    // linear in q = 1 / f^2; solved jointly in the least-squares sense.
    const double a1 = u1 * u2 + v1 * v2, b1 = w1 * w2;
    const double a2 = (u1 * u1 + v1 * v1) - (u2 * u2 + v2 * v2), b2 = w1 * w1 - w2 * w2;
    const double den = a1 * a1 + a2 * a2;
    if (den <= 0)
        return std::nullopt;
    const double q = -(a1 * b1 + a2 * b2) / den;
    if (!(q > 0))
        return std::nullopt;
    const double f = 1 / std::sqrt(q);
    if (!(f > 1e-2 * width && f < 1e3 * width))
        return std::nullopt;

    Eigen::Matrix3d k;
    k << f, 0, cx, 0, f, cy, 0, 0, 1;
    Eigen::Matrix3d m = k.inverse() * g;
    m /= 0.5 * (m.col(0).norm() + m.col(1).norm());
    if (m(2, 2) < 0)
        m = -m;

    // nearest matrix with orthonormal columns
    Eigen::MatrixXd r12(3, 2);
    r12 << m.col(0), m.col(1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r12, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r12 = svd.matrixU() * svd.matrixV().transpose();

    const Eigen::Vector3d r1 = r12.col(0), r2 = r12.col(1);
    Eigen::Vector3d r3 = r1.cross(r2);
    Eigen::Matrix3d rot;
    for (int sign : {1, -1}) {
        rot << r1, r2, sign * r3;
        const Eigen::Vector3d t = m.col(2) - dot_height * rot.col(2);
        const Eigen::Vector3d centre = -rot.transpose() * t;
        if (centre.z() > dot_height) {
            Camera cam;
            cam.p.leftCols<3>() = k * rot;
            cam.p.col(3) = k * t;
            return cam;
        }
    }
    return std::nullopt;
}

double elevation_factor(const Homography& h, const TableTemplate& t)
{
    const Eigen::Matrix3d g = h.m.inverse();
    const Eigen::Vector3d c(t.width() / 2, t.height() / 2, 1);
    const Eigen::Vector3d q = g * c;
    const double w = q.z();
    if (std::abs(w) < 1e-15)
        return 1.0;
    Eigen::Matrix2d j;
    j << g(0, 0) - q.x() / w * g(2, 0), g(0, 1) - q.x() / w * g(2, 1), g(1, 0) - q.y() / w * g(2, 0),
        g(1, 1) - q.y() / w * g(2, 1);
    j /= w;
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2d>(j).singularValues();
    if (!(sv(0) > 0))
        return 1.0;
    return std::clamp(1.0 - sv(1) / sv(0), 0.0, 1.0);
}

} // namespace cueforge
