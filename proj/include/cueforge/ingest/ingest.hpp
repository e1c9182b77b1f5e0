#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cueforge {

enum class DetClass
{
    cue,
    black,
    solid,
    stripe,
    dot,
};

const char* det_class_name(DetClass c);
std::optional<DetClass> det_class_from_name(std::string_view name);
inline bool is_ball(DetClass c) { return c != DetClass::dot; }

// Image-pixel box, (x, y) upper-left.
struct Box
{
    double x = 0, y = 0, w = 0, h = 0;

    double area() const { return w * h; }
    double cx() const { return x + w / 2; }
    double cy() const { return y + h / 2; }
};

double iou(const Box& a, const Box& b);

struct Detection
{
    Box box;
    DetClass cls = DetClass::dot;
    double conf = 0.0;
};

struct DetectionSet
{
    std::string image_id;
    int width = 0;
    int height = 0;
    std::vector<Detection> detections;
};

struct ClassCaps
{
    int cue = 1;
    int black = 1;
    int solid = 7;
    int stripe = 7;
    int dot = 18;
    int balls = 16;

    int of(DetClass c) const;
};

// Throws ParseError (malformed record, with its index) or ValidationError
// (unknown class, box outside the image, bad confidence).
DetectionSet parse_detections(std::string_view json);
std::string serialize_detections(const DetectionSet& ds);

// Class-agnostic NMS, then greedy per-class caps, both in descending
// confidence (ties: smaller area, then input order). Output keeps input order.
DetectionSet postprocess(const DetectionSet& ds, double iou_threshold = 0.5, const ClassCaps& caps = {});

// Human-readable notes about mandatory objects that are missing (cue, black, 18 dots).
std::vector<std::string> missing_object_warnings(const DetectionSet& ds);

} // namespace cueforge
