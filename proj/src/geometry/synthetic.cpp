#include "cueforge/geometry/synthetic.hpp"

#include "cueforge/common/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cueforge {

CameraView top_down_view(int width, int height)
{
    CameraView v;
    v.width = width;
    v.height = height;
    return v;
}

CameraView pinhole_view(double zenith_deg, double azimuth_deg, double distance)
{
    CameraView v;
    v.kind = CameraView::Kind::pinhole;
    v.zenith_deg = zenith_deg;
    v.azimuth_deg = azimuth_deg;
    v.distance = distance;
    return v;
}

namespace {

constexpr double kDotRadius = 3.0;

// Everything that must be visible: rail corners on the dot plane and the
// ball-height extremes of the playable area.
std::vector<Eigen::Vector3d> frame_points(const TableTemplate& t)
{
    std::vector<Eigen::Vector3d> pts;
    for (Vec2 c : t.corners) {
        pts.emplace_back(c.x, c.y, t.dot_plane_height);
        pts.emplace_back(c.x, c.y, 0.0);
    }
    return pts;
}

Eigen::Matrix3d roll_matrix(double deg)
{
    const double a = deg_to_rad(deg);
    Eigen::Matrix3d m;
    m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return m;
}

} // namespace

Camera make_camera(const CameraView& v, const TableTemplate& t)
{
    if (v.width <= 0 || v.height <= 0)
        throw GeometryError(GeometryFailure::camera, "image size must be positive");
    const double cx = v.width / 2.0, cy = v.height / 2.0;
    const Eigen::Vector3d centre(t.width() / 2, t.height() / 2, 0);
    const auto pts = frame_points(t);
    const double margin = t.ball_radius + kDotRadius;
    Camera cam;

    if (v.kind == CameraView::Kind::top_down) {
        const Eigen::Matrix3d rr = roll_matrix(v.roll_deg);
        double ex = 0, ey = 0;
        for (const auto& p : pts) {
            const Eigen::Vector3d d = rr * Eigen::Vector3d(p.x() - centre.x(), p.y() - centre.y(), 0);
            ex = std::max(ex, std::abs(d.x()) + margin);
            ey = std::max(ey, std::abs(d.y()) + margin);
        }
        const double s = v.focal > 0 ? v.focal : v.fill * std::min(cx / ex, cy / ey);
        if (s * ex > cx || s * ey > cy)
            throw GeometryError(GeometryFailure::camera, "table does not fit in the frame");
        Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
        a.topLeftCorner<2, 2>() = s * rr.topLeftCorner<2, 2>();
        cam.p.col(0) = a.col(0);
        cam.p.col(1) = a.col(1);
        const Eigen::Vector2d off = -s * rr.topLeftCorner<2, 2>() * centre.head<2>();
        cam.p(0, 3) = off.x() + cx;
        cam.p(1, 3) = off.y() + cy;
        cam.p(2, 3) = 1;
        return cam;
    }

    if (!(v.distance > 0) || v.zenith_deg < 0 || v.zenith_deg >= 90)
        throw GeometryError(GeometryFailure::camera, "pinhole view needs distance > 0 and zenith in [0, 90)");
    const double th = deg_to_rad(v.zenith_deg), ph = deg_to_rad(v.azimuth_deg);
    const Eigen::Vector3d toward(std::cos(ph), std::sin(ph), 0);
    const Eigen::Vector3d pos = centre + v.distance * Eigen::Vector3d(std::sin(th) * toward.x(),
                                                                    std::sin(th) * toward.y(), std::cos(th));
    const Eigen::Vector3d zc = (centre - pos).normalized();
    // image "down" points at the near rail
    const Eigen::Vector3d yc = (toward - toward.dot(zc) * zc).normalized();
    const Eigen::Vector3d xc = zc.cross(yc);
    Eigen::Matrix3d rot;
    rot.row(0) = xc.transpose();
    rot.row(1) = yc.transpose();
    rot.row(2) = zc.transpose();
    rot = roll_matrix(v.roll_deg) * rot;
    const Eigen::Vector3d tr = -rot * pos;

    double ex = 0, ey = 0;
    for (const auto& p : pts) {
        const Eigen::Vector3d c = rot * p + tr;
        if (c.z() <= margin)
            throw GeometryError(GeometryFailure::camera, "table extends behind the camera");
        ex = std::max(ex, (std::abs(c.x()) + margin) / (c.z() - margin));
        ey = std::max(ey, (std::abs(c.y()) + margin) / (c.z() - margin));
    }
    const double f = v.focal > 0 ? v.focal : v.fill * std::min(cx / ex, cy / ey);
    if (f * ex > cx || f * ey > cy)
        throw GeometryError(GeometryFailure::camera, "table does not fit in the frame");
    Eigen::Matrix3d k;
    k << f, 0, cx, 0, f, cy, 0, 0, 1;
    cam.p.leftCols<3>() = k * rot;
    cam.p.col(3) = k * tr;
    return cam;
}

namespace {

DetClass class_of(const Ball& b)
{
    if (b.cls == BallClass::cue)
        return DetClass::cue;
    if (b.cls == BallClass::black)
        return DetClass::black;
    return b.id < kBlackId ? DetClass::solid : DetClass::stripe;
}

Box noisy(Box b, double sigma, std::mt19937_64& rng)
{
    if (sigma <= 0)
        return b;
    std::normal_distribution<double> n(0.0, sigma);
    double l = b.x + n(rng), top = b.y + n(rng), r = b.x + b.w + n(rng), bot = b.y + b.h + n(rng);
    if (r - l < 0.5)
        r = l + 0.5;
    if (bot - top < 0.5)
        bot = top + 0.5;
    return {l, top, r - l, bot - top};
}

void check_in_frame(const Box& b, const CameraView& v)
{
    if (b.x < 0 || b.y < 0 || b.x + b.w > v.width || b.y + b.h > v.height)
        throw GeometryError(GeometryFailure::camera, "object projects outside the frame");
}

} // namespace

SyntheticScene make_synthetic_scene(const CameraView& view, const TableState& state, double sigma,
                                    std::uint64_t seed, const TableTemplate& t)
{
    if (!(sigma >= 0))
        throw Error("noise sigma must be non-negative");
    SyntheticScene scene;
    scene.camera = make_camera(view, t);
    scene.truth = scene.camera.plane_to_image(t.dot_plane_height).inverse();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> conf(0.6, 0.99);

    struct Item
    {
        Detection det;
        int label;
    };
    std::vector<Item> items;

    for (const Ball& b : state.balls) {
        if (!b.live())
            continue;
        const auto box = sphere_bbox(scene.camera, {b.pos.x, b.pos.y, t.ball_radius}, t.ball_radius);
        if (!box)
            throw GeometryError(GeometryFailure::camera, "ball behind the camera");
        check_in_frame(*box, view);
        items.push_back({{*box, class_of(b), 0}, b.id});
    }
    for (int i = 0; i < 18; ++i) {
        const Vec2 d = t.dots[static_cast<std::size_t>(i)];
        const Vec2 c = scene.camera.project({d.x, d.y, t.dot_plane_height});
        // symmetric box around the exact projection of the dot centre
        double hx = 0, hy = 0;
        for (Vec2 o : {Vec2{kDotRadius, 0}, Vec2{-kDotRadius, 0}, Vec2{0, kDotRadius}, Vec2{0, -kDotRadius}}) {
            const Vec2 q = scene.camera.project({d.x + o.x, d.y + o.y, t.dot_plane_height});
            hx = std::max(hx, std::abs(q.x - c.x));
            hy = std::max(hy, std::abs(q.y - c.y));
        }
        const Box box{c.x - hx, c.y - hy, 2 * hx, 2 * hy};
        check_in_frame(box, view);
        items.push_back({{box, DetClass::dot, 0}, -1 - i});
    }

    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    scene.detections.image_id = "synthetic-" + std::to_string(seed);
    scene.detections.width = view.width;
    scene.detections.height = view.height;
    for (std::size_t i : order) {
        Detection d = items[i].det;
        d.box = noisy(d.box, sigma, rng);
        d.box.x = std::clamp(d.box.x, 0.0, view.width - d.box.w);
        d.box.y = std::clamp(d.box.y, 0.0, view.height - d.box.h);
        d.conf = conf(rng);
        scene.detections.detections.push_back(d);
        scene.label.push_back(items[i].label);
    }
    return scene;
}

std::vector<int> add_overdetections(DetectionSet& ds, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t genuine = ds.detections.size();
    std::vector<Detection> extra;

    auto fits = [&](const Box& b) { return b.x >= 0 && b.y >= 0 && b.x + b.w <= ds.width && b.y + b.h <= ds.height; };

    // Near-duplicate boxes from the detector firing twice, always less confident.
    for (std::size_t i = 0; i < genuine; ++i) {
        if (u(rng) > 0.25)
            continue;
        Detection d = ds.detections[i];
        d.box.x += (u(rng) - 0.5) * 0.2 * d.box.w;
        d.box.y += (u(rng) - 0.5) * 0.2 * d.box.h;
        d.conf = d.conf * (0.5 + 0.45 * u(rng));
        if (u(rng) < 0.3)
            d.cls = d.cls == DetClass::solid ? DetClass::stripe : d.cls == DetClass::stripe ? DetClass::solid : d.cls;
        if (fits(d.box))
            extra.push_back(d);
    }
    // Isolated ghosts: spare dots and balls, low confidence.
    const int ghosts = static_cast<int>(u(rng) * 4);
    for (int g = 0; g < ghosts; ++g) {
        Detection d;
        const double s = 4 + 8 * u(rng);
        d.box = {u(rng) * (ds.width - s), u(rng) * (ds.height - s), s, s};
        d.cls = u(rng) < 0.5 ? DetClass::dot : DetClass::solid;
        d.conf = 0.05 + 0.4 * u(rng);
        extra.push_back(d);
    }

    std::vector<int> genuine_idx(genuine);
    std::iota(genuine_idx.begin(), genuine_idx.end(), 0);
    ds.detections.insert(ds.detections.end(), extra.begin(), extra.end());
    return genuine_idx;
}

} // namespace cueforge
