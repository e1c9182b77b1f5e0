#include "cueforge/geometry/homography.hpp"

#include "cueforge/common/errors.hpp"

#include <cmath>

namespace cueforge {

Vec2 Homography::apply(Vec2 p) const
{
    const Eigen::Vector3d q = m * Eigen::Vector3d(p.x, p.y, 1.0);
    return {q.x() / q.z(), q.y() / q.z()};
}

Homography Homography::inverse() const
{
    return Homography{m.inverse()}.normalized();
}

Homography Homography::normalized() const
{
    Homography h = *this;
    if (std::abs(m(2, 2)) > 1e-12 * m.cwiseAbs().maxCoeff())
        h.m /= m(2, 2);
    return h;
}

namespace {

Eigen::Matrix3d conditioning(const std::vector<Vec2>& pts)
{
    Vec2 c{0, 0};
    for (Vec2 p : pts)
        c += p;
    c = c / static_cast<double>(pts.size());
    double mean_dist = 0;
    for (Vec2 p : pts)
        mean_dist += distance(p, c);
    mean_dist /= static_cast<double>(pts.size());
    if (mean_dist < 1e-12)
        throw GeometryError(GeometryFailure::degenerate_configuration, "homography: all points coincide");
    const double s = std::sqrt(2.0) / mean_dist;
    Eigen::Matrix3d t;
    t << s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1;
    return t;
}

Vec2 transform(const Eigen::Matrix3d& t, Vec2 p)
{
    const Eigen::Vector3d q = t * Eigen::Vector3d(p.x, p.y, 1.0);
    return {q.x() / q.z(), q.y() / q.z()};
}

} // namespace

HomographyFit estimate_homography(const std::vector<std::pair<Vec2, Vec2>>& pairs)
{
    if (pairs.size() < 4)
        throw GeometryError(GeometryFailure::degenerate_configuration, "homography needs at least 4 point pairs");
    std::vector<Vec2> src, dst;
    for (const auto& [a, b] : pairs) {
        src.push_back(a);
        dst.push_back(b);
    }
    const Eigen::Matrix3d ts = conditioning(src), td = conditioning(dst);

    const auto n = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 9);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec2 p = transform(ts, src[static_cast<std::size_t>(i)]);
        const Vec2 q = transform(td, dst[static_cast<std::size_t>(i)]);
        a.row(2 * i) << -p.x, -p.y, -1, 0, 0, 0, q.x * p.x, q.x * p.y, q.x;
        a.row(2 * i + 1) << 0, 0, 0, -p.x, -p.y, -1, q.y * p.x, q.y * p.y, q.y;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // The null space must be one-dimensional: the 8th singular value stays clear of zero.
    if (sv.size() < 8 || sv(7) < 1e-9 * sv(0))
        throw GeometryError(GeometryFailure::degenerate_configuration, "homography: point configuration is rank deficient");

    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    HomographyFit fit;
    fit.h = Homography{td.inverse() * hn * ts}.normalized();
    if (std::abs(fit.h.m.determinant()) < 1e-12)
        throw GeometryError(GeometryFailure::degenerate_configuration, "homography is singular");

    const Homography back = fit.h.inverse();
    double sq = 0;
    for (const auto& [a_img, b_tpl] : pairs)
        sq += (back.apply(b_tpl) - a_img).norm_sq();
    fit.rmse_px = std::sqrt(sq / static_cast<double>(pairs.size()));
    return fit;
}

} // namespace cueforge
