#pragma once

#include "cueforge/common/vec2.hpp"
#include "cueforge/geometry/camera.hpp"
#include "cueforge/geometry/homography.hpp"
#include "cueforge/geometry/template.hpp"
#include "cueforge/ingest/ingest.hpp"
#include "cueforge/physics/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cueforge {

// Box centre moved towards the top edge by the elevation factor of h.
Vec2 approximate_center(const Detection& det, const Homography& h, const TableTemplate& t);

struct Projected
{
    Vec2 p;
    bool clamped = false;
    bool out_of_table = false;
};

// Maps an image point to the template frame. Points at most one ball radius
// outside the playable area are clamped into the valid ball region; further
// out they are flagged. Throws GeometryError(projection) when p maps to infinity.
Projected project_to_template(Vec2 p, const Homography& h, const TableTemplate& t);
Projected clamp_to_table(Vec2 p, const TableTemplate& t);

// Table-frame ball centre whose projected sphere best matches the box edges
// (Gauss-Newton from `start`). nullopt if the fit does not converge.
std::optional<Vec2> refine_center(const Box& box, const Camera& cam, const TableTemplate& t, Vec2 start);

struct LocateOptions
{
    double iou_threshold = 0.5;
    int ransac_iters = 500;
    double tolerance_at_640 = 2.0;
    std::uint64_t seed = 0;
    bool refine = true;
    // Below this elevation factor the focal length is poorly observable from
    // noisy dots and the box-centre estimate is used as is.
    double min_refine_elevation = 0.05;
};

struct LocatedBall
{
    int detection = -1; // index into the post-processed detection set
    DetClass cls = DetClass::cue;
    Vec2 position;
    bool clamped = false;
    bool out_of_table = false;
};

struct LocateResult
{
    std::vector<LocatedBall> balls;
    Homography h;
    double rmse_px = 0;
    double elevation = 0;
    bool camera_model = false;
    DetectionSet kept; // detections after post-processing
    std::vector<std::string> warnings;
};

LocateResult locate(const DetectionSet& ds, const TableTemplate& t = default_template(), const LocateOptions& opt = {});

// Turns located balls into a table state. Solids take ids 1-7 and stripes
// 9-15, each group numbered by position (x, then y); off-table balls are
// dropped. Throws ValidationError if the result is not a valid state.
TableState located_state(const LocateResult& r, const TableGeometry& table);
// Applies the same blue numbering to an existing state (solids = ids 1-7).
TableState canonical_ids(const TableState& s);

} // namespace cueforge
