#include "cueforge/physics/state.hpp"

#include "cueforge/common/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cueforge {

const Ball* TableState::find(int id) const
{
    for (const auto& b : balls)
        if (b.id == id)
            return &b;
    return nullptr;
}

Ball* TableState::find(int id)
{
    for (auto& b : balls)
        if (b.id == id)
            return &b;
    return nullptr;
}

int TableState::live_blues() const
{
    return static_cast<int>(std::count_if(balls.begin(), balls.end(), [](const Ball& b) {
        return b.cls == BallClass::blue && b.live();
    }));
}

bool TableState::cue_live() const
{
    const Ball* c = cue();
    return c && c->live();
}

bool TableState::at_rest() const
{
    return std::all_of(balls.begin(), balls.end(), [](const Ball& b) { return b.pocketed || b.vel == Vec2{}; });
}

const std::vector<int>& blue_ids()
{
    static const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15};
    return ids;
}

const char* class_name(BallClass c)
{
    switch (c) {
    case BallClass::cue: return "cue";
    case BallClass::black: return "black";
    case BallClass::blue: return "blue";
    }
    return "?";
}

std::optional<BallClass> class_from_name(std::string_view name)
{
    if (name == "cue") return BallClass::cue;
    if (name == "black") return BallClass::black;
    if (name == "blue") return BallClass::blue;
    return std::nullopt;
}

const char* variant_name(Variant v)
{
    switch (v) {
    case Variant::one_ball: return "1ball";
    case Variant::two_ball: return "2ball";
    case Variant::all_ball: return "allball";
    }
    return "?";
}

std::optional<Variant> variant_from_name(std::string_view name)
{
    if (name == "1ball" || name == "one_ball") return Variant::one_ball;
    if (name == "2ball" || name == "two_ball") return Variant::two_ball;
    if (name == "allball" || name == "all_ball") return Variant::all_ball;
    return std::nullopt;
}

Variant infer_variant(const std::vector<Ball>& balls)
{
    bool black = false, blue = false;
    for (const auto& b : balls) {
        black |= b.cls == BallClass::black;
        blue |= b.cls == BallClass::blue;
    }
    if (blue)
        return Variant::all_ball;
    return black ? Variant::two_ball : Variant::one_ball;
}

BallClass class_for_id(int id)
{
    if (id == kCueId)
        return BallClass::cue;
    if (id == kBlackId)
        return BallClass::black;
    return BallClass::blue;
}

void validate_state(const TableState& state, const TableGeometry& table)
{
    const auto& balls = state.balls;
    if (balls.size() > static_cast<std::size_t>(kMaxBalls))
        throw ValidationError("more than 16 balls");

    int cues = 0, blacks = 0, blues = 0;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const Ball& b = balls[i];
        const int idx = static_cast<int>(i);
        if (b.id < 0 || b.id >= kMaxBalls)
            throw ValidationError("ball id out of range: " + std::to_string(b.id), idx);
        if (b.cls != class_for_id(b.id))
            throw ValidationError("ball " + std::to_string(b.id) + " must have class " + class_name(class_for_id(b.id)),
                                  idx);
        if (i > 0 && balls[i - 1].id >= b.id)
            throw ValidationError("ball ids must be unique and ascending", idx);
        cues += b.cls == BallClass::cue;
        blacks += b.cls == BallClass::black;
        blues += b.cls == BallClass::blue;
        if (!std::isfinite(b.pos.x) || !std::isfinite(b.pos.y))
            throw ValidationError("non-finite ball position", idx);
        if (b.pocketed)
            continue;
        if (!table.in_valid_region(b.pos))
            throw ValidationError("ball " + std::to_string(b.id) + " overlaps a cushion", idx);
        if (pocket_at(b.pos, table))
            throw ValidationError("ball " + std::to_string(b.id) + " lies inside a pocket", idx);
        const double min_sq = 4.0 * table.ball_radius * table.ball_radius;
        for (std::size_t j = 0; j < i; ++j) {
            if (balls[j].pocketed)
                continue;
            if ((balls[j].pos - b.pos).norm_sq() < min_sq - 1e-9)
                throw ValidationError(
                    "balls " + std::to_string(balls[j].id) + " and " + std::to_string(b.id) + " overlap", idx);
        }
    }
    if (cues != 1)
        throw ValidationError("state needs exactly one cue ball");
    switch (state.variant) {
    case Variant::one_ball:
        if (blacks || blues)
            throw ValidationError("1ball state holds only the cue ball");
        break;
    case Variant::two_ball:
        if (blacks != 1 || blues)
            throw ValidationError("2ball state holds the cue ball and the black ball");
        break;
    case Variant::all_ball:
        if (blacks != 1)
            throw ValidationError("allball state needs the black ball");
        break;
    }
}

} // namespace cueforge
