#pragma once

#include "cueforge/geometry/camera.hpp"
#include "cueforge/geometry/homography.hpp"
#include "cueforge/geometry/template.hpp"
#include "cueforge/ingest/ingest.hpp"
#include "cueforge/physics/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cueforge {

struct CameraView
{
    enum class Kind
    {
        top_down, // affine, looking straight down
        pinhole,
    };
    Kind kind = Kind::top_down;
    double zenith_deg = 0;   // angle of the viewing ray from vertical
    double azimuth_deg = 90; // camera direction from the table centre; 90 = beyond the bottom rail
    double roll_deg = 0;     // image rotation about the optical axis
    double distance = 1400;  // camera to table centre, template px
    double focal = 0;        // pixels; 0 fits the table to `fill` of the frame
    double fill = 0.92;
    int width = 640;
    int height = 640;
};

CameraView top_down_view(int width = 640, int height = 640);
CameraView pinhole_view(double zenith_deg, double azimuth_deg = 90, double distance = 1400);

// Builds the camera for a view; throws GeometryError(camera) when the table
// (rails and balls) does not fit in the frame.
Camera make_camera(const CameraView& view, const TableTemplate& t);

struct SyntheticScene
{
    DetectionSet detections;
    Homography truth;   // image -> template on the dot plane
    Camera camera;
    std::vector<int> label; // per detection: ball id, or -1 - template dot index
};

// Renders the live balls of `state` and the 18 rail dots as detections with
// N(0, noise_sigma) pixel noise on every box edge. Detection order and
// confidences are drawn from `seed`.
SyntheticScene make_synthetic_scene(const CameraView& view, const TableState& state, double noise_sigma,
                                    std::uint64_t seed, const TableTemplate& t = default_template());

// Adds spurious boxes (duplicates, dots on the cloth, low-confidence ghosts)
// to a clean scene. Returns the indices of the genuine detections.
std::vector<int> add_overdetections(DetectionSet& ds, std::uint64_t seed);

} // namespace cueforge
