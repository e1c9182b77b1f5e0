#pragma once

#include "cueforge/common/vec2.hpp"

#include <array>
#include <string>
#include <string_view>

namespace cueforge {

// Canonical top-down table frame. The origin is the top-left corner of the
// playable area; the 18 rail dots sit on the rail tops just outside it.
//
// Point order used for correspondences:
//   0-5   top rail, left to right
//   6-8   right rail, top to bottom
//   9-14  bottom rail, right to left
//   15-17 left rail, bottom to top
//   18-21 rail-line corners TL, TR, BR, BL
struct TableTemplate
{
    int version = 1;
    Vec2 playable_size{662, 337};
    std::array<Vec2, 18> dots{};
    std::array<Vec2, 4> corners{};
    std::array<Vec2, 6> pockets{};
    double ball_radius = 7.0;
    double pocket_radius = 15.0;
    double dot_inset = 18.0;        // distance of the dot lines outside the cushions
    double dot_plane_height = 10.0; // rail top above the bed, same units

    Vec2 point(int index) const { return index < 18 ? dots[static_cast<std::size_t>(index)] : corners[static_cast<std::size_t>(index - 18)]; }
    double width() const { return playable_size.x; }
    double height() const { return playable_size.y; }
};

// Diamond layout: long rails split in eighths (middle one is the side
// pocket), short rails in quarters.
TableTemplate make_template(double width = 662, double height = 337, double dot_inset = 18);
const TableTemplate& default_template();

// Side index (0 top, 1 right, 2 bottom, 3 left) of template point i < 18.
int template_side(int dot_index);

TableTemplate template_from_json(std::string_view text);
std::string template_to_json(const TableTemplate& t);

} // namespace cueforge
