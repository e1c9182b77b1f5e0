#include "cueforge/geometry/template.hpp"

#include "cueforge/common/errors.hpp"

#include "json.hpp"

namespace cueforge {

using nlohmann::json;

TableTemplate make_template(double width, double height, double inset)
{
    TableTemplate t;
    t.playable_size = {width, height};
    t.dot_inset = inset;
    const double top = -inset, bottom = height + inset, left = -inset, right = width + inset;
    std::size_t i = 0;
    for (int k : {1, 2, 3, 5, 6, 7})
        t.dots[i++] = {width * k / 8.0, top};
    for (int k : {1, 2, 3})
        t.dots[i++] = {right, height * k / 4.0};
    for (int k : {7, 6, 5, 3, 2, 1})
        t.dots[i++] = {width * k / 8.0, bottom};
    for (int k : {3, 2, 1})
        t.dots[i++] = {left, height * k / 4.0};
    t.corners = {Vec2{left, top}, Vec2{right, top}, Vec2{right, bottom}, Vec2{left, bottom}};
    t.pockets = {Vec2{0, 0}, Vec2{width / 2, 0}, Vec2{width, 0}, Vec2{0, height}, Vec2{width / 2, height},
                 Vec2{width, height}};
    return t;
}

const TableTemplate& default_template()
{
    static const TableTemplate t = make_template();
    return t;
}

int template_side(int i)
{
    if (i < 6) return 0;
    if (i < 9) return 1;
    if (i < 15) return 2;
    return 3;
}

namespace {

Vec2 read_point(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(std::string("template: ") + what + " entries must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <std::size_t N>
void read_points(const json& doc, const char* key, std::array<Vec2, N>& out)
{
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_array() || it->size() != N)
        throw ParseError(std::string("template: '") + key + "' must list " + std::to_string(N) + " points");
    for (std::size_t i = 0; i < N; ++i)
        out[i] = read_point((*it)[i], key);
}

double read_number(const json& doc, const char* key)
{
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_number())
        throw ParseError(std::string("template: '") + key + "' missing or not a number");
    return it->get<double>();
}

json points_json(const auto& pts)
{
    json a = json::array();
    for (const auto& p : pts)
        a.push_back({p.x, p.y});
    return a;
}

} // namespace

TableTemplate template_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("template: invalid JSON: ") + e.what());
    }
    TableTemplate t;
    t.version = doc.value("version", 1);
    t.playable_size = read_point(doc.at("playable_size"), "playable_size");
    read_points(doc, "dots", t.dots);
    read_points(doc, "corners", t.corners);
    read_points(doc, "pockets", t.pockets);
    t.ball_radius = read_number(doc, "ball_radius");
    t.pocket_radius = read_number(doc, "pocket_radius");
    t.dot_inset = doc.value("dot_inset", 18.0);
    t.dot_plane_height = doc.value("dot_plane_height", 10.0);
    return t;
}

std::string template_to_json(const TableTemplate& t)
{
    json doc;
    doc["version"] = t.version;
    doc["playable_size"] = {t.playable_size.x, t.playable_size.y};
    doc["dots"] = points_json(t.dots);
    doc["corners"] = points_json(t.corners);
    doc["pockets"] = points_json(t.pockets);
    doc["ball_radius"] = t.ball_radius;
    doc["pocket_radius"] = t.pocket_radius;
    doc["dot_inset"] = t.dot_inset;
    doc["dot_plane_height"] = t.dot_plane_height;
    return doc.dump(2) + "\n";
}

} // namespace cueforge
