#include "cueforge/physics/table.hpp"

namespace cueforge {

const TableGeometry& default_table()
{
    static const TableGeometry table{};
    return table;
}

std::optional<int> pocket_at(Vec2 p, const TableGeometry& table)
{
    const auto pockets = table.pockets();
    const double r2 = table.pocket_radius * table.pocket_radius;
    for (int i = 0; i < 6; ++i)
        if ((p - pockets[static_cast<std::size_t>(i)]).norm_sq() < r2)
            return i;
    return std::nullopt;
}

const char* side_name(Side s)
{
    switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::top: return "top";
    case Side::bottom: return "bottom";
    }
    return "?";
}

std::optional<Side> side_from_name(std::string_view name)
{
    if (name == "left") return Side::left;
    if (name == "right") return Side::right;
    if (name == "top") return Side::top;
    if (name == "bottom") return Side::bottom;
    return std::nullopt;
}

} // namespace cueforge
