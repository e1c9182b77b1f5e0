#pragma once

#include "cueforge/physics/simulator.hpp"
#include "cueforge/physics/state.hpp"
#include "cueforge/shotplan/shotplan.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cueforge {

enum class AgentKind
{
    random,            // uniform over all 36000 x 30 actions
    masked_random,     // uniform over feasible hitpoints x 30 powers
    oracle_rand_angle, // random feasible hitpoint, random or verified power
    oracle_best,       // best hitpoint at verified power
    cem_learner,       // parametric policy trained by train_cem
    fixed,             // always the same shot
};

const char* agent_kind_name(AgentKind k);
std::optional<AgentKind> agent_kind_from_name(std::string_view name);

// Parameters searched by the cross-entropy method.
//   w[0..3]  hitpoint preference: score, cos_cut, window, -cushions
//   w[4]     angle offset (deg)
//   w[5]     log angle jitter (deg)
//   w[6]     power offset (x5 steps from the lower bound; absolute around 15 unmasked)
struct CemPolicy
{
    static constexpr int kDims = 7;
    std::array<double, kDims> w{};
    bool masked = true;
};

struct AgentConfig
{
    AgentKind kind = AgentKind::oracle_best;
    bool mirror = true;
    bool max_power = true; // oracle_rand_angle: F_max rather than F_rand
    double sigma_deg = 0;  // angular noise added to the chosen shot
    PlanConfig plan{};
    CemPolicy policy{};
    Shot fixed_shot{};
};

class Agent
{
  public:
    explicit Agent(AgentConfig config = {}, const Simulator& sim = default_simulator());

    // Reproducible for a given (state, seed).
    Shot act(const TableState& state, std::uint64_t seed) const;
    const AgentConfig& config() const { return config_; }

  private:
    AgentConfig config_;
    const Simulator* sim_;
};

// Angle in degrees perturbed and snapped to the action grid.
Shot with_angle_noise(Shot s, double noise_deg);

// CEM action from precomputed hitpoint scores; `z` are two standard normals
// (angle jitter) drawn by the caller.
Shot cem_action(const CemPolicy& p, const TableState& state, const std::vector<ScoredShot>& scored, double z);

} // namespace cueforge
