#pragma once

#include "cueforge/common/vec2.hpp"
#include "cueforge/physics/table.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace cueforge {

enum class BallClass
{
    cue,
    black,
    blue,
};

enum class Variant
{
    one_ball,
    two_ball,
    all_ball,
};

inline constexpr int kCueId = 0;
inline constexpr int kBlackId = 8;
inline constexpr int kMaxBalls = 16;

struct Ball
{
    int id = 0;
    BallClass cls = BallClass::blue;
    Vec2 pos;
    Vec2 vel;
    bool pocketed = false;

    bool live() const { return !pocketed; }
};

struct TableState
{
    std::vector<Ball> balls; // sorted by id
    Variant variant = Variant::all_ball;
    int turn_index = 0;

    const Ball* find(int id) const;
    Ball* find(int id);
    const Ball* cue() const { return find(kCueId); }
    int live_blues() const;
    bool cue_live() const;
    bool at_rest() const;
};

// Ids used for blue balls in placement order.
const std::vector<int>& blue_ids();

const char* class_name(BallClass c);
std::optional<BallClass> class_from_name(std::string_view name);
const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);
// 0 is the cue, 8 the black, every other id a blue.
BallClass class_for_id(int id);
// Variant implied by which classes appear in the ball list.
Variant infer_variant(const std::vector<Ball>& balls);

// Throws ValidationError if ids, classes, composition, placement or overlap
// violate the table-state rules. `index` names the offending ball.
void validate_state(const TableState& state, const TableGeometry& table);

} // namespace cueforge
