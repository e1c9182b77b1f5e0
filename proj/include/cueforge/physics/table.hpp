#pragma once

#include "cueforge/common/vec2.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace cueforge {

// 9ft table: a 5.7 cm ball spans 14 template px.
inline constexpr double kCmPerPx = 0.4071;

enum class Side
{
    left,
    right,
    top,
    bottom,
};

// Playable area in template px, origin top-left, y pointing down.
// Pockets: 0 top-left, 1 top-middle, 2 top-right, 3 bottom-left, 4 bottom-middle, 5 bottom-right.
struct TableGeometry
{
    double width = 662.0;
    double height = 337.0;
    double ball_radius = 7.0;
    double pocket_radius = 15.0;
    double screen_width = 735.0;
    double screen_height = 410.0;

    std::array<Vec2, 6> pockets() const
    {
        return {Vec2{0, 0}, Vec2{width / 2, 0}, Vec2{width, 0},
                Vec2{0, height}, Vec2{width / 2, height}, Vec2{width, height}};
    }
    Vec2 pocket(int id) const { return pockets()[static_cast<std::size_t>(id)]; }

    double rail_x() const { return (screen_width - width) / 2; }
    double rail_y() const { return (screen_height - height) / 2; }
    double diagonal() const { return Vec2{width, height}.norm(); }

    // Ball centers live in [r, w - r] x [r, h - r].
    double min_x() const { return ball_radius; }
    double max_x() const { return width - ball_radius; }
    double min_y() const { return ball_radius; }
    double max_y() const { return height - ball_radius; }
    bool in_valid_region(Vec2 p) const
    {
        return p.x >= min_x() && p.x <= max_x() && p.y >= min_y() && p.y <= max_y();
    }
    Vec2 clamp_to_valid(Vec2 p) const
    {
        return {p.x < min_x() ? min_x() : (p.x > max_x() ? max_x() : p.x),
                p.y < min_y() ? min_y() : (p.y > max_y() ? max_y() : p.y)};
    }

    // Coordinate of the line a ball center touches when resting against a cushion.
    double contact_line(Side s) const
    {
        switch (s) {
        case Side::left: return min_x();
        case Side::right: return max_x();
        case Side::top: return min_y();
        case Side::bottom: return max_y();
        }
        return 0.0;
    }
};

const TableGeometry& default_table();

// Pocket whose capture disk strictly contains p, if any.
std::optional<int> pocket_at(Vec2 p, const TableGeometry& table);

const char* side_name(Side s);
std::optional<Side> side_from_name(std::string_view name);

} // namespace cueforge
