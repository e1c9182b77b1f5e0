#include "doctest.h"

#include "cueforge/common/errors.hpp"
#include "cueforge/ingest/ingest.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace cueforge;

namespace {

Detection det(double x, double y, double w, DetClass c, double conf) { return {{x, y, w, w}, c, conf}; }

DetectionSet set_of(std::vector<Detection> d)
{
    DetectionSet ds;
    ds.image_id = "t";
    ds.width = 640;
    ds.height = 640;
    ds.detections = std::move(d);
    return ds;
}

bool same(const Detection& a, const Detection& b)
{
    return a.box.x == b.box.x && a.box.y == b.box.y && a.box.w == b.box.w && a.box.h == b.box.h && a.cls == b.cls &&
           a.conf == b.conf;
}

bool same(const DetectionSet& a, const DetectionSet& b)
{
    if (a.detections.size() != b.detections.size())
        return false;
    for (std::size_t i = 0; i < a.detections.size(); ++i)
        if (!same(a.detections[i], b.detections[i]))
            return false;
    return true;
}

DetectionSet random_set(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> pos(0, 560), size(8, 40), conf(0, 1);
    std::uniform_int_distribution<int> cls(0, 4);
    std::vector<Detection> d;
    for (int i = 0; i < n; ++i)
        d.push_back({{pos(rng), pos(rng), size(rng), size(rng)}, static_cast<DetClass>(cls(rng)), conf(rng)});
    return set_of(std::move(d));
}

} // namespace

TEST_CASE("parse detections")
{
    const auto ds = parse_detections(
        R"({"image_id":"a","width":640,"height":480,"detections":[{"x":1,"y":2,"w":3,"h":4,"class":"cue","conf":0.5}]})");
    CHECK(ds.image_id == "a");
    CHECK(ds.width == 640);
    REQUIRE(ds.detections.size() == 1);
    CHECK(ds.detections[0].cls == DetClass::cue);
    CHECK(ds.detections[0].box.h == 4);

    CHECK(parse_detections(R"({"image_id":"e","width":10,"height":10,"detections":[]})").detections.empty());

    try {
        parse_detections(
            R"({"image_id":"a","width":64,"height":64,"detections":[{"x":1,"y":2,"w":3,"h":4,"class":"cue","conf":0.5},{"x":1,"y":2,"w":3,"h":4,"class":"purple","conf":0.5}]})");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.index() == 1);
    }
    try {
        parse_detections(R"({"image_id":"a","width":64,"height":64,"detections":[{"x":1,"y":"2","w":3,"h":4,"class":"cue","conf":0.5}]})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.index() == 0);
    }
    CHECK_THROWS_AS(parse_detections("{not json"), ParseError);
    CHECK_THROWS_AS(parse_detections(R"({"image_id":"a","width":64,"height":64,"detections":[{"x":60,"y":2,"w":9,"h":4,"class":"cue","conf":0.5}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_detections(R"({"image_id":"a","width":64,"height":64,"detections":[{"x":6,"y":2,"w":9,"h":4,"class":"cue","conf":1.5}]})"),
                    ValidationError);

    std::mt19937_64 rng(1);
    const auto r = random_set(rng, 30);
    CHECK(same(parse_detections(serialize_detections(r)), r));
}

TEST_CASE("iou")
{
    CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
    CHECK(iou({0, 0, 10, 10}, {10, 0, 10, 10}) == 0.0);
    CHECK(iou({0, 0, 10, 10}, {5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
}

TEST_CASE("postprocess examples")
{
    SUBCASE("cross-class NMS")
    {
        // IoU 0.9 between the boxes.
        const double shift = 10.0 * (1 - 0.9) / (1 + 0.9) * 2;
        REQUIRE(iou({100, 100, 20, 20}, {100 + shift, 100, 20, 20}) == doctest::Approx(0.9));
        const auto out = postprocess(set_of({det(100, 100, 20, DetClass::cue, 0.8), det(100 + shift, 100, 20, DetClass::solid, 0.6)}));
        REQUIRE(out.detections.size() == 1);
        CHECK(out.detections[0].cls == DetClass::cue);
    }
    SUBCASE("cue cap")
    {
        const auto out = postprocess(set_of({det(10, 10, 20, DetClass::cue, 0.4), det(300, 300, 20, DetClass::cue, 0.7)}));
        REQUIRE(out.detections.size() == 1);
        CHECK(out.detections[0].conf == 0.7);
    }
    SUBCASE("twenty dots")
    {
        std::vector<Detection> d;
        for (int i = 0; i < 18; ++i)
            d.push_back(det(20.0 * i, 5, 8, DetClass::dot, 0.6 + 0.01 * i));
        d.push_back(det(200, 300, 8, DetClass::dot, 0.3));
        d.push_back(det(400, 300, 8, DetClass::dot, 0.35));
        const auto out = postprocess(set_of(d));
        CHECK(out.detections.size() == 18);
        for (const auto& x : out.detections)
            CHECK(x.conf >= 0.6);
    }
    SUBCASE("tie breaks prefer the smaller box, then input order")
    {
        const auto out = postprocess(set_of({det(100, 100, 20, DetClass::cue, 0.5), det(101, 101, 18, DetClass::cue, 0.5)}));
        REQUIRE(out.detections.size() == 1);
        CHECK(out.detections[0].box.w == 18);
        const auto out2 = postprocess(set_of({det(100, 100, 20, DetClass::black, 0.5), det(300, 300, 20, DetClass::black, 0.5)}));
        REQUIRE(out2.detections.size() == 1);
        CHECK(out2.detections[0].box.x == 100);
    }
    CHECK_THROWS(postprocess(set_of({}), 1.0));
}

TEST_CASE("greedy caps match a brute-force optimum on small sets")
{
    // Non-overlapping boxes, so only the caps act. Under per-class caps the
    // greedy pick maximizes the total confidence; check against every subset.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    std::uniform_int_distribution<int> cls(0, 4);
    ClassCaps caps;
    caps.cue = 1;
    caps.black = 1;
    caps.solid = 2;
    caps.stripe = 1;
    caps.dot = 2;
    caps.balls = 4;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        std::vector<Detection> d;
        for (int i = 0; i < n; ++i)
            d.push_back(det(60.0 * i, 10, 20, static_cast<DetClass>(cls(rng)), conf(rng)));
        double best = -1;
        unsigned best_mask = 0;
        for (unsigned m = 0; m < (1u << n); ++m) {
            int counts[5] = {}, balls = 0;
            double sum = 0;
            for (int i = 0; i < n; ++i)
                if (m >> i & 1) {
                    counts[static_cast<int>(d[static_cast<std::size_t>(i)].cls)]++;
                    balls += is_ball(d[static_cast<std::size_t>(i)].cls);
                    sum += d[static_cast<std::size_t>(i)].conf;
                }
            bool ok = balls <= caps.balls;
            for (int c = 0; c < 5; ++c)
                ok = ok && counts[c] <= caps.of(static_cast<DetClass>(c));
            if (ok && sum > best) {
                best = sum;
                best_mask = m;
            }
        }
        const auto out = postprocess(set_of(d), 0.5, caps);
        unsigned got = 0;
        for (const auto& x : out.detections)
            for (int i = 0; i < n; ++i)
                if (same(x, d[static_cast<std::size_t>(i)]))
                    got |= 1u << i;
        CHECK(got == best_mask);
    }
}

TEST_CASE("postprocess invariants")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        const auto in = random_set(rng, 10 + static_cast<int>(rng() % 60));
        const auto out = postprocess(in);
        CHECK(same(postprocess(out), out));

        int counts[5] = {}, balls = 0;
        for (const auto& d : out.detections) {
            counts[static_cast<int>(d.cls)]++;
            balls += is_ball(d.cls);
            CHECK(std::any_of(in.detections.begin(), in.detections.end(), [&](const Detection& x) { return same(x, d); }));
        }
        ClassCaps caps;
        for (int c = 0; c < 5; ++c)
            CHECK(counts[c] <= caps.of(static_cast<DetClass>(c)));
        CHECK(balls <= 16);
        for (std::size_t i = 0; i < out.detections.size(); ++i)
            for (std::size_t j = i + 1; j < out.detections.size(); ++j)
                CHECK(iou(out.detections[i].box, out.detections[j].box) <= 0.5);

        // Removing a detection that NMS suppressed leaves the output unchanged.
        for (std::size_t i = 0; i < in.detections.size(); ++i) {
            const auto& d = in.detections[i];
            const bool kept = std::any_of(out.detections.begin(), out.detections.end(), [&](const Detection& x) { return same(x, d); });
            if (kept)
                continue;
            bool suppressed = false;
            for (const auto& k : in.detections)
                suppressed |= (k.conf > d.conf || (k.conf == d.conf && k.box.area() < d.box.area())) &&
                              iou(k.box, d.box) > 0.5 &&
                              std::any_of(out.detections.begin(), out.detections.end(), [&](const Detection& x) { return same(x, k); });
            if (!suppressed)
                continue;
            auto smaller = in;
            smaller.detections.erase(smaller.detections.begin() + static_cast<long>(i));
            CHECK(same(postprocess(smaller), out));
        }
    }
}

TEST_CASE("NMS chains are not monotone under removal")
{
    // A suppresses B, B would suppress C: removing A brings B back and drops C.
    const auto a = det(100, 100, 20, DetClass::solid, 0.9);
    const auto b = det(106, 100, 20, DetClass::solid, 0.8);
    const auto c = det(112, 100, 20, DetClass::solid, 0.7);
    REQUIRE(iou(a.box, b.box) > 0.5);
    REQUIRE(iou(b.box, c.box) > 0.5);
    REQUIRE(iou(a.box, c.box) <= 0.5);
    const auto full = postprocess(set_of({a, b, c}));
    CHECK(full.detections.size() == 2);
    const auto without_a = postprocess(set_of({b, c}));
    REQUIRE(without_a.detections.size() == 1);
    CHECK(same(without_a.detections[0], b));
}

TEST_CASE("missing object warnings")
{
    CHECK(missing_object_warnings(set_of({})).size() == 3);
    CHECK(missing_object_warnings(set_of({det(1, 1, 5, DetClass::cue, 1), det(10, 1, 5, DetClass::black, 1)})).size() == 1);
}
