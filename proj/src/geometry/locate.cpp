#include "cueforge/geometry/locate.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/geometry/lines.hpp"

#include <algorithm>
#include <cmath>

namespace cueforge {

Vec2 approximate_center(const Detection& det, const Homography& h, const TableTemplate& t)
{
    const double lambda = elevation_factor(h, t);
    const Vec2 c{det.box.cx(), det.box.cy()};
    const Vec2 top{det.box.cx(), det.box.y};
    return c + lambda * (top - c);
}

Projected clamp_to_table(Vec2 p, const TableTemplate& t)
{
    Projected out{p};
    const double r = t.ball_radius;
    const double dx = std::max({0.0, -p.x, p.x - t.width()});
    const double dy = std::max({0.0, -p.y, p.y - t.height()});
    if (std::hypot(dx, dy) > r) {
        out.out_of_table = true;
        return out;
    }
    const Vec2 c{std::clamp(p.x, r, t.width() - r), std::clamp(p.y, r, t.height() - r)};
    out.clamped = !(c == p);
    out.p = c;
    return out;
}

Projected project_to_template(Vec2 p, const Homography& h, const TableTemplate& t)
{
    const double w = h.weight(p);
    const double scale = h.m.row(2).cwiseAbs().maxCoeff() * (std::abs(p.x) + std::abs(p.y) + 1);
    if (!std::isfinite(w) || std::abs(w) <= 1e-12 * scale)
        throw GeometryError(GeometryFailure::projection, "point maps to the line at infinity");
    return clamp_to_table(h.apply(p), t);
}

namespace {

Eigen::Vector4d edges(const Box& b) { return {b.x, b.y, b.x + b.w, b.y + b.h}; }

} // namespace

std::optional<Vec2> refine_center(const Box& box, const Camera& cam, const TableTemplate& t, Vec2 start)
{
    const double r = t.ball_radius;
    const Eigen::Vector4d observed = edges(box);
    auto residual = [&](Vec2 p) -> std::optional<Eigen::Vector4d> {
        const auto b = sphere_bbox(cam, {p.x, p.y, r}, r);
        if (!b)
            return std::nullopt;
        return edges(*b) - observed;
    };

    Vec2 x = start;
    constexpr double step = 1e-3;
    for (int it = 0; it < 30; ++it) {
        const auto f0 = residual(x);
        if (!f0)
            return std::nullopt;
        Eigen::Matrix<double, 4, 2> jac;
        for (int k = 0; k < 2; ++k) {
            const Vec2 d = k == 0 ? Vec2{step, 0} : Vec2{0, step};
            const auto fp = residual(x + d), fm = residual(x - d);
            if (!fp || !fm)
                return std::nullopt;
            jac.col(k) = (*fp - *fm) / (2 * step);
        }
        const Eigen::Vector2d delta = (jac.transpose() * jac).ldlt().solve(-jac.transpose() * *f0);
        if (!delta.allFinite())
            return std::nullopt;
        x += Vec2{delta.x(), delta.y()};
        if (delta.norm() < 1e-10)
            return x;
    }
    return x;
}

LocateResult locate(const DetectionSet& ds, const TableTemplate& t, const LocateOptions& opt)
{
    LocateResult out;
    out.kept = postprocess(ds, opt.iou_threshold);
    out.warnings = missing_object_warnings(out.kept);

    std::vector<Vec2> dots;
    for (const auto& d : out.kept.detections)
        if (d.cls == DetClass::dot)
            dots.push_back({d.box.cx(), d.box.cy()});

    LineOptions lo;
    lo.tolerance = opt.tolerance_at_640 * ds.width / 640.0;
    lo.max_iters = opt.ransac_iters;
    lo.seed = opt.seed;
    const auto lines = fit_table_lines(dots, lo);
    const auto pairs = order_correspondences(lines, dots, t);

    std::vector<std::pair<Vec2, Vec2>> pp;
    for (const auto& c : pairs)
        pp.emplace_back(c.image, c.table);
    const HomographyFit fit = estimate_homography(pp);
    out.h = fit.h;
    out.rmse_px = fit.rmse_px;
    out.elevation = elevation_factor(fit.h, t);

    std::optional<Camera> cam;
    if (opt.refine && out.elevation >= opt.min_refine_elevation)
        cam = recover_camera(fit.h, t.dot_plane_height, ds.width, ds.height);
    out.camera_model = cam.has_value();

    for (std::size_t i = 0; i < out.kept.detections.size(); ++i) {
        const Detection& d = out.kept.detections[i];
        if (!is_ball(d.cls))
            continue;
        const Vec2 approx = approximate_center(d, fit.h, t);
        const double w = fit.h.weight(approx);
        if (!std::isfinite(w) || std::abs(w) < 1e-12) {
            out.warnings.push_back("ball detection " + std::to_string(i) + " maps to infinity");
            continue;
        }
        Vec2 p = fit.h.apply(approx);
        if (cam)
            if (const auto refined = refine_center(d.box, *cam, t, p))
                p = *refined;
        const Projected pr = clamp_to_table(p, t);
        out.balls.push_back({static_cast<int>(i), d.cls, pr.p, pr.clamped, pr.out_of_table});
    }
    return out;
}

namespace {

void number_group(std::vector<Ball>& group, int first)
{
    std::stable_sort(group.begin(), group.end(), [](const Ball& a, const Ball& b) {
        return a.pos.x != b.pos.x ? a.pos.x < b.pos.x : a.pos.y < b.pos.y;
    });
    for (std::size_t i = 0; i < group.size(); ++i)
        group[i].id = first + static_cast<int>(i);
}

TableState assemble(std::vector<Ball> others, std::vector<Ball> solids, std::vector<Ball> stripes)
{
    if (solids.size() > 7 || stripes.size() > 7)
        throw ValidationError("more than 7 solids or stripes");
    number_group(solids, 1);
    number_group(stripes, 9);
    std::vector<Ball> all = std::move(others);
    all.insert(all.end(), solids.begin(), solids.end());
    all.insert(all.end(), stripes.begin(), stripes.end());
    std::sort(all.begin(), all.end(), [](const Ball& a, const Ball& b) { return a.id < b.id; });
    TableState s;
    s.balls = std::move(all);
    return s;
}

} // namespace

TableState located_state(const LocateResult& r, const TableGeometry& table)
{
    std::vector<Ball> others, solids, stripes;
    for (const auto& b : r.balls) {
        if (b.out_of_table)
            continue;
        Ball ball;
        ball.pos = b.position;
        switch (b.cls) {
        case DetClass::cue: ball.id = kCueId; ball.cls = BallClass::cue; others.push_back(ball); break;
        case DetClass::black: ball.id = kBlackId; ball.cls = BallClass::black; others.push_back(ball); break;
        case DetClass::solid: ball.cls = BallClass::blue; solids.push_back(ball); break;
        case DetClass::stripe: ball.cls = BallClass::blue; stripes.push_back(ball); break;
        case DetClass::dot: break;
        }
    }
    TableState s = assemble(std::move(others), std::move(solids), std::move(stripes));
    s.variant = infer_variant(s.balls);
    validate_state(s, table);
    return s;
}

TableState canonical_ids(const TableState& s)
{
    std::vector<Ball> others, solids, stripes;
    for (const auto& b : s.balls) {
        if (b.cls != BallClass::blue)
            others.push_back(b);
        else if (b.id < kBlackId)
            solids.push_back(b);
        else
            stripes.push_back(b);
    }
    TableState out = assemble(std::move(others), std::move(solids), std::move(stripes));
    out.variant = s.variant;
    out.turn_index = s.turn_index;
    return out;
}

} // namespace cueforge
