#pragma once

#include "cueforge/physics/simulator.hpp"
#include "cueforge/physics/state.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cueforge {

inline constexpr double kRewardClip = 210.0;

struct RewardTerm
{
    std::string name;
    double value = 0.0;
};

struct RewardBreakdown
{
    // win, lose, blue_hit, blue_pocketed, angle_term, miss_distance_term, cue_pocket_penalty
    std::vector<RewardTerm> terms;
    double clipped = 0.0;
    double normalized = 0.0;

    double term(std::string_view name) const;
};

double angle_reward(double v_deg);                    // 1000 / (v + 10) - 50
double miss_reward(double d, double diagonal);        // -50 d / D

struct ShotVerdict
{
    bool win = false;
    bool loss = false;
    bool cue_pocketed = false;
    bool black_pocketed = false;
    int blues_pocketed = 0;
    bool success = false; // the shooter keeps the turn (or has won)
};

// Balls the shooter should pocket next: the cue itself in 1ball, the black in
// 2ball, live blues in allball (the black once no blue is left).
std::vector<int> target_ids(const TableState& state);

ShotVerdict judge_shot(const TableState& before, const SimOutcome& outcome);
bool is_win(const TableState& before, const SimOutcome& outcome);
bool is_loss(const TableState& before, const SimOutcome& outcome);

RewardBreakdown compute_reward(const SimOutcome& outcome, const TableState& before, const TableState& after,
                               const TableGeometry& table = default_table());

struct EnvConfig
{
    Variant variant = Variant::two_ball;
    int n_blue = 14;
    TableGeometry table{};
    PhysicsParams physics{};
};

// Uniform rejection sampling of a valid layout; throws PlacementError after
// 10^6 rejected draws.
TableState reset_state(const EnvConfig& config, std::uint64_t seed);

struct StepResult
{
    TableState state;
    RewardBreakdown reward;
    ShotVerdict verdict;
    bool terminated = false;
    SimOutcome outcome;
};

StepResult step_env(const TableState& state, Shot shot, const Simulator& sim = default_simulator());

// Agent-environment loop in the usual reset/step shape.
class PoolEnv
{
  public:
    explicit PoolEnv(EnvConfig config = {});

    const TableState& reset(std::uint64_t seed);
    const StepResult& step(Shot shot);

    const TableState& state() const { return state_; }
    bool terminated() const { return terminated_; }
    const EnvConfig& config() const { return config_; }
    const Simulator& simulator() const { return sim_; }
    // Replaces the current state (validated); clears the terminal flag.
    void set_state(TableState state);

  private:
    EnvConfig config_;
    Simulator sim_;
    TableState state_;
    StepResult last_;
    bool terminated_ = false;
};

} // namespace cueforge
