#pragma once

#include "cueforge/env/env.hpp"
#include "cueforge/physics/simulator.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace cueforge {

// Mirror image across a cushion's contact line (where a ball center touches it).
Vec2 reflect(Vec2 p, Side side, const TableGeometry& table);

// Point a target ball is sent toward: the pocket center pulled into the
// valid ball-center region, so the final leg never grazes a cushion first.
Vec2 pocket_aim(int pocket, const TableGeometry& table);

// Where the pocket circle meets the two cushion lines bounding its mouth.
std::pair<Vec2, Vec2> pocket_mouth(int pocket, const TableGeometry& table);

// Ghost-ball center: one ball diameter behind `target` on the line to `aim`.
inline Vec2 ghost_point(Vec2 target, Vec2 aim, double ball_radius)
{
    return target - normalized(aim - target) * (2.0 * ball_radius);
}

// Cushions whose edge carries the pocket; banks off these are skipped.
bool pocket_on_side(int pocket, Side side);

// Straight-line path from `start` to `end` bouncing off `sides` in order,
// computed by aiming at the mirrored end point. Empty when a crossing falls
// outside the cushion span.
struct Unfolded
{
    std::vector<Vec2> points; // start, cushion contacts..., end
    Vec2 virtual_end;

    double length() const;
};
std::optional<Unfolded> unfold(Vec2 start, const std::vector<Side>& sides, Vec2 end, const TableGeometry& table);

struct Hitpoint
{
    Vec2 aim_point; // ghost-ball center the cue reaches at contact
    Vec2 virtual_aim; // what the cue aims at in mirror space
    int target_ball = -1;
    int pocket = -1;
    std::vector<Side> cue_sides;    // kick cushions
    std::vector<Side> target_sides; // bank cushions
    int cushions_cue = 0;
    int cushions_target = 0;
    double alpha_deg = 0.0;
    int alpha_index = 0;
    bool feasible = false;
    std::vector<Vec2> cue_path;
    std::vector<Vec2> target_path;
    Vec2 virtual_pocket;

    int cushions() const { return cushions_cue + cushions_target; }
};

struct ScoredShot
{
    Hitpoint hitpoint;
    double cos_cut = 0.0;
    double target_window = 0.0; // radians
    double cushion_penalty = 1.0;
    double score = 0.0;
    int rho = kRhoSteps - 1;
};

struct PlanConfig
{
    int mirror_depth = 1;
    double cushion_multiplier = 0.33;
    int verify_budget = 8; // candidates simulated before settling on the top score
};

std::vector<Hitpoint> direct_hitpoints(const TableState& state, const TableGeometry& table = default_table());
// Kick and bank hitpoints with up to `depth` cushions in total.
std::vector<Hitpoint> mirror_hitpoints(const TableState& state, int depth,
                                       const TableGeometry& table = default_table());
std::vector<Hitpoint> enumerate_hitpoints(const TableState& state, bool use_mirror, const PlanConfig& config = {},
                                          const TableGeometry& table = default_table());

// rho is set to the analytic lower bound on the power that reaches the pocket.
ScoredShot oracle_score(const TableState& state, const Hitpoint& hp, const PlanConfig& config = {},
                        const Simulator& sim = default_simulator());

// Smallest power index that can carry the target into the pocket, from the
// closed-form speed loss k per unit distance.
int power_lower_bound(const Hitpoint& hp, double cos_cut, const Simulator& sim);

// True when simulating `shot` pockets the hitpoint's target and keeps the turn.
bool shot_pockets_target(const TableState& state, const Hitpoint& hp, Shot shot, const Simulator& sim,
                         SimOutcome* outcome = nullptr);

// Simulate-and-pick power: the least power on a ladder above the lower bound
// that pockets the target, or nullopt.
std::optional<int> verified_power(const TableState& state, const ScoredShot& s, const Simulator& sim,
                                  SimOutcome* outcome = nullptr);

struct Suggestion
{
    Shot shot;
    ScoredShot scored;
    SimOutcome predicted;
    bool verified = false;
};

// Feasible hitpoints ranked by score, then fewer cushions, then wider window.
std::vector<ScoredShot> ranked_shots(const TableState& state, bool use_mirror, const PlanConfig& config = {},
                                     const Simulator& sim = default_simulator());

std::optional<Suggestion> best_shot(const TableState& state, bool use_mirror, const PlanConfig& config = {},
                                    const Simulator& sim = default_simulator());

std::vector<Shot> masked_action_space(const TableState& state, bool use_mirror, const PlanConfig& config = {},
                                      const TableGeometry& table = default_table());

} // namespace cueforge
