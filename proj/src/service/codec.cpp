#include "cueforge/service/codec.hpp"

#include "cueforge/common/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cueforge {

namespace {

Json vec(Vec2 v) { return Json::array({v.x, v.y}); }

Json path(const std::vector<Vec2>& pts)
{
    Json a = Json::array();
    for (Vec2 p : pts)
        a.push_back(vec(p));
    return a;
}

double number(const Json& j, const char* key, int index)
{
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw ParseError(std::string("field '") + key + "' must be a number", index);
    return it->get<double>();
}

int integer(const Json& j, const char* key, int index)
{
    const double v = number(j, key, index);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ParseError(std::string("field '") + key + "' must be an integer", index);
    return static_cast<int>(v);
}

const char* failure_name(GeometryFailure f)
{
    switch (f) {
    case GeometryFailure::line_estimation: return "line_estimation";
    case GeometryFailure::degenerate_configuration: return "degenerate_configuration";
    case GeometryFailure::correspondence: return "correspondence";
    case GeometryFailure::projection: return "projection";
    case GeometryFailure::camera: return "camera";
    }
    return "?";
}

} // namespace

TableState state_from_json(const Json& j)
{
    if (!j.is_object())
        throw ParseError("state must be an object");
    const auto balls = j.find("balls");
    if (balls == j.end() || !balls->is_array())
        throw ParseError("state needs a 'balls' array");

    TableState s;
    int index = 0;
    for (const auto& jb : *balls) {
        if (!jb.is_object())
            throw ParseError("ball must be an object", index);
        Ball b;
        b.id = integer(jb, "id", index);
        b.cls = class_for_id(b.id);
        if (const auto c = jb.find("class"); c != jb.end()) {
            const auto cls = c->is_string() ? class_from_name(c->get<std::string>()) : std::nullopt;
            if (!cls)
                throw ParseError("unknown ball class", index);
            b.cls = *cls;
        }
        b.pos = {number(jb, "x", index), number(jb, "y", index)};
        if (const auto p = jb.find("pocketed"); p != jb.end()) {
            if (!p->is_boolean())
                throw ParseError("field 'pocketed' must be a boolean", index);
            b.pocketed = p->get<bool>();
        }
        s.balls.push_back(b);
        ++index;
    }
    std::sort(s.balls.begin(), s.balls.end(), [](const Ball& a, const Ball& b) { return a.id < b.id; });

    s.variant = infer_variant(s.balls);
    if (const auto v = j.find("variant"); v != j.end()) {
        const auto var = v->is_string() ? variant_from_name(v->get<std::string>()) : std::nullopt;
        if (!var)
            throw ParseError("unknown variant");
        s.variant = *var;
    }
    if (j.contains("turn_index"))
        s.turn_index = integer(j, "turn_index", -1);
    return s;
}

Json state_to_json(const TableState& s)
{
    Json balls = Json::array();
    for (const auto& b : s.balls) {
        Json jb;
        jb["id"] = b.id;
        jb["class"] = class_name(b.cls);
        jb["x"] = b.pos.x;
        jb["y"] = b.pos.y;
        jb["pocketed"] = b.pocketed;
        balls.push_back(std::move(jb));
    }
    Json j;
    j["variant"] = variant_name(s.variant);
    j["turn_index"] = s.turn_index;
    j["balls"] = std::move(balls);
    return j;
}

Shot shot_from_json(const Json& j)
{
    if (!j.is_object())
        throw ParseError("shot must be an object");
    Shot s;
    if (j.contains("alpha_index"))
        s.alpha_index = integer(j, "alpha_index", -1);
    else
        s.alpha_index = snap_alpha(number(j, "alpha_deg", -1));
    s.rho_index = integer(j, "rho_index", -1);
    return s;
}

Json shot_to_json(const Shot& s)
{
    Json j;
    j["alpha_index"] = s.alpha_index;
    j["rho_index"] = s.rho_index;
    j["alpha_deg"] = s.alpha_deg();
    return j;
}

Json event_to_json(const Event& e)
{
    Json j;
    j["kind"] = event_kind_name(e.kind);
    j["time"] = e.time;
    j["ball"] = e.ball;
    j["position"] = vec(e.position);
    j["velocity"] = vec(e.velocity);
    switch (e.kind) {
    case EventKind::ball_hit:
        j["other"] = e.other;
        j["other_position"] = vec(e.other_position);
        j["other_velocity"] = vec(e.other_velocity);
        break;
    case EventKind::cushion_hit: j["side"] = side_name(e.side); break;
    case EventKind::pocketed: j["pocket"] = e.pocket; break;
    }
    return j;
}

Json events_to_json(const std::vector<Event>& events)
{
    Json a = Json::array();
    for (const auto& e : events)
        a.push_back(event_to_json(e));
    return a;
}

Json reward_to_json(const RewardBreakdown& r)
{
    Json terms = Json::object();
    for (const auto& t : r.terms)
        terms[t.name] = t.value;
    Json j;
    j["terms"] = std::move(terms);
    j["clipped"] = r.clipped;
    j["normalized"] = r.normalized;
    return j;
}

Json verdict_to_json(const ShotVerdict& v)
{
    Json j;
    j["success"] = v.success;
    j["win"] = v.win;
    j["loss"] = v.loss;
    j["cue_pocketed"] = v.cue_pocketed;
    j["black_pocketed"] = v.black_pocketed;
    j["blues_pocketed"] = v.blues_pocketed;
    return j;
}

Json scored_to_json(const ScoredShot& s)
{
    const Hitpoint& hp = s.hitpoint;
    Json j;
    j["target_ball"] = hp.target_ball;
    j["pocket"] = hp.pocket;
    j["alpha_index"] = hp.alpha_index;
    j["alpha_deg"] = hp.alpha_index * 0.01;
    j["rho_index"] = s.rho;
    j["ghost"] = vec(hp.aim_point);
    j["virtual_aim"] = vec(hp.virtual_aim);
    j["virtual_pocket"] = vec(hp.virtual_pocket);
    Json kick = Json::array(), bank = Json::array();
    for (Side c : hp.cue_sides)
        kick.push_back(side_name(c));
    for (Side c : hp.target_sides)
        bank.push_back(side_name(c));
    j["kick_cushions"] = std::move(kick);
    j["bank_cushions"] = std::move(bank);
    j["cue_path"] = path(hp.cue_path);
    j["target_path"] = path(hp.target_path);
    j["cos_cut"] = s.cos_cut;
    j["target_window_deg"] = s.target_window * 180 / kPi;
    j["cushion_penalty"] = s.cushion_penalty;
    j["score"] = s.score;
    return j;
}

Json suggestion_to_json(const Suggestion& s)
{
    Json j;
    j["shot"] = shot_to_json(s.shot);
    j["scored"] = scored_to_json(s.scored);
    j["verified"] = s.verified;
    j["predicted_events"] = events_to_json(s.predicted.events);
    j["predicted_state"] = state_to_json(s.predicted.final_state);
    return j;
}

Json step_to_json(const StepResult& r)
{
    Json j;
    j["state"] = state_to_json(r.state);
    j["verdict"] = verdict_to_json(r.verdict);
    j["reward"] = reward_to_json(r.reward);
    j["terminated"] = r.terminated;
    j["events"] = events_to_json(r.outcome.events);
    j["timed_out"] = r.outcome.timed_out;
    return j;
}

Json locate_to_json(const LocateResult& r)
{
    Json balls = Json::array();
    for (const auto& b : r.balls) {
        Json jb;
        jb["class"] = det_class_name(b.cls);
        jb["x"] = b.position.x;
        jb["y"] = b.position.y;
        if (b.clamped)
            jb["clamped"] = true;
        if (b.out_of_table)
            jb["out_of_table"] = true;
        balls.push_back(std::move(jb));
    }
    Json h = Json::array();
    for (int i = 0; i < 3; ++i)
        h.push_back(Json::array({r.h.m(i, 0), r.h.m(i, 1), r.h.m(i, 2)}));
    Json j;
    j["balls"] = std::move(balls);
    j["rmse_px"] = r.rmse_px;
    j["homography"] = std::move(h);
    j["elevation"] = r.elevation;
    j["camera_model"] = r.camera_model;
    j["detections_kept"] = r.kept.detections.size();
    j["warnings"] = r.warnings;
    j["cm_per_px"] = kCmPerPx;
    return j;
}

Json error_json(const std::exception& e)
{
    Json j;
    j["error"] = e.what();
    if (const auto* g = dynamic_cast<const GeometryError*>(&e)) {
        j["kind"] = failure_name(g->kind());
        if (g->lines_found() >= 0)
            j["lines_found"] = g->lines_found();
        if (!g->side_counts().empty())
            j["side_counts"] = g->side_counts();
    } else if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        j["kind"] = "parse";
        if (p->index() >= 0)
            j["index"] = p->index();
    } else if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        j["kind"] = "validation";
        if (v->index() >= 0)
            j["index"] = v->index();
    }
    return j;
}

} // namespace cueforge
