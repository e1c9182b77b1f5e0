#include "cueforge/ingest/ingest.hpp"

#include "cueforge/common/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace cueforge {

using nlohmann::json;

const char* det_class_name(DetClass c)
{
    switch (c) {
    case DetClass::cue: return "cue";
    case DetClass::black: return "black";
    case DetClass::solid: return "solid";
    case DetClass::stripe: return "stripe";
    case DetClass::dot: return "dot";
    }
    return "?";
}

std::optional<DetClass> det_class_from_name(std::string_view name)
{
    if (name == "cue") return DetClass::cue;
    if (name == "black") return DetClass::black;
    if (name == "solid") return DetClass::solid;
    if (name == "stripe") return DetClass::stripe;
    if (name == "dot") return DetClass::dot;
    return std::nullopt;
}

double iou(const Box& a, const Box& b)
{
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

int ClassCaps::of(DetClass c) const
{
    switch (c) {
    case DetClass::cue: return cue;
    case DetClass::black: return black;
    case DetClass::solid: return solid;
    case DetClass::stripe: return stripe;
    case DetClass::dot: return dot;
    }
    return 0;
}

namespace {

double number_field(const json& rec, const char* key, int index)
{
    const auto it = rec.find(key);
    if (it == rec.end() || !it->is_number())
        throw ParseError(std::string("detection ") + std::to_string(index) + ": field '" + key +
                             "' missing or not a number",
                         index);
    const double v = it->get<double>();
    if (!std::isfinite(v))
        throw ParseError(std::string("detection ") + std::to_string(index) + ": field '" + key + "' is not finite",
                         index);
    return v;
}

} // namespace

DetectionSet parse_detections(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("detection file must be a JSON object");

    DetectionSet ds;
    const auto id = doc.find("image_id");
    if (id == doc.end() || !id->is_string())
        throw ParseError("field 'image_id' missing or not a string");
    ds.image_id = id->get<std::string>();
    for (const char* key : {"width", "height"}) {
        const auto it = doc.find(key);
        if (it == doc.end() || !it->is_number_integer())
            throw ParseError(std::string("field '") + key + "' missing or not an integer");
        if (it->get<long long>() <= 0)
            throw ValidationError(std::string("field '") + key + "' must be positive");
    }
    ds.width = doc["width"].get<int>();
    ds.height = doc["height"].get<int>();

    const auto dets = doc.find("detections");
    if (dets == doc.end() || !dets->is_array())
        throw ParseError("field 'detections' missing or not an array");

    int index = 0;
    for (const auto& rec : *dets) {
        if (!rec.is_object())
            throw ParseError("detection " + std::to_string(index) + " is not an object", index);
        Detection d;
        d.box = {number_field(rec, "x", index), number_field(rec, "y", index), number_field(rec, "w", index),
                 number_field(rec, "h", index)};
        d.conf = number_field(rec, "conf", index);
        const auto cls = rec.find("class");
        if (cls == rec.end() || !cls->is_string())
            throw ParseError("detection " + std::to_string(index) + ": field 'class' missing or not a string", index);
        const auto c = det_class_from_name(cls->get<std::string>());
        if (!c)
            throw ValidationError("detection " + std::to_string(index) + ": unknown class '" +
                                      cls->get<std::string>() + "'",
                                  index);
        d.cls = *c;
        if (!(d.box.w > 0) || !(d.box.h > 0))
            throw ValidationError("detection " + std::to_string(index) + ": box must have positive size", index);
        if (d.conf < 0.0 || d.conf > 1.0)
            throw ValidationError("detection " + std::to_string(index) + ": confidence outside [0, 1]", index);
        if (d.box.x < 0 || d.box.y < 0 || d.box.x + d.box.w > ds.width || d.box.y + d.box.h > ds.height)
            throw ValidationError("detection " + std::to_string(index) + ": box exceeds the image", index);
        ds.detections.push_back(d);
        ++index;
    }
    return ds;
}

std::string serialize_detections(const DetectionSet& ds)
{
    json doc;
    doc["image_id"] = ds.image_id;
    doc["width"] = ds.width;
    doc["height"] = ds.height;
    json arr = json::array();
    for (const auto& d : ds.detections)
        arr.push_back({{"x", d.box.x}, {"y", d.box.y}, {"w", d.box.w}, {"h", d.box.h},
                       {"class", det_class_name(d.cls)}, {"conf", d.conf}});
    doc["detections"] = std::move(arr);
    return doc.dump();
}

DetectionSet postprocess(const DetectionSet& ds, double iou_threshold, const ClassCaps& caps)
{
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
        throw Error("iou_threshold must lie in (0, 1)");
    const auto& dets = ds.detections;
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].conf != dets[b].conf)
            return dets[a].conf > dets[b].conf;
        return dets[a].box.area() < dets[b].box.area();
    });

    std::vector<std::size_t> survivors;
    for (std::size_t i : order) {
        const bool suppressed = std::any_of(survivors.begin(), survivors.end(), [&](std::size_t k) {
            return iou(dets[i].box, dets[k].box) > iou_threshold;
        });
        if (!suppressed)
            survivors.push_back(i);
    }

    std::array<int, 5> count{};
    int balls = 0;
    std::vector<bool> keep(dets.size(), false);
    for (std::size_t i : survivors) {
        const DetClass c = dets[i].cls;
        if (count[static_cast<std::size_t>(c)] >= caps.of(c))
            continue;
        if (is_ball(c) && balls >= caps.balls)
            continue;
        ++count[static_cast<std::size_t>(c)];
        balls += is_ball(c) ? 1 : 0;
        keep[i] = true;
    }

    DetectionSet out;
    out.image_id = ds.image_id;
    out.width = ds.width;
    out.height = ds.height;
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (keep[i])
            out.detections.push_back(dets[i]);
    return out;
}

std::vector<std::string> missing_object_warnings(const DetectionSet& ds)
{
    int cue = 0, black = 0, dots = 0;
    for (const auto& d : ds.detections) {
        cue += d.cls == DetClass::cue;
        black += d.cls == DetClass::black;
        dots += d.cls == DetClass::dot;
    }
    std::vector<std::string> w;
    if (!cue)
        w.push_back("no cue ball detected");
    if (!black)
        w.push_back("no black ball detected");
    if (dots < 18)
        w.push_back("only " + std::to_string(dots) + " of 18 rail dots detected");
    return w;
}

} // namespace cueforge
