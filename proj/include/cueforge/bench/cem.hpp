#pragma once

#include "cueforge/bench/agent.hpp"
#include "cueforge/bench/report.hpp"
#include "cueforge/physics/state.hpp"

#include <cstdint>
#include <vector>

namespace cueforge {

struct CemConfig
{
    Variant variant = Variant::one_ball;
    int iterations = 200;
    int population = 16;
    double elite_fraction = 0.25;
    int batch = 16;       // layouts per iteration, shared by the whole population
    bool masked = true;   // choose among planner hitpoints, or aim at raw targets
    bool mirror = false;  // hitpoint set used when masked
    int patience = 50;    // iterations with an all-zero elite set before giving up
    // Variance added to every refit, decaying linearly to zero at `noise_until`
    // of the run; keeps noisy elite sets from collapsing the search early.
    double extra_noise = 1.0;
    double noise_until = 0.5;
};

enum class TrainStatus
{
    completed,
    diverged,
};

struct TrainResult
{
    CemPolicy policy;
    TrainStatus status = TrainStatus::completed;
    int iterations = 0;
    std::vector<double> elite_success; // per iteration, mean over the elite set
    std::vector<double> mean_success;  // per iteration, mean over the population
};

// Cross-entropy search over CemPolicy weights with a diagonal Gaussian.
// Throws Error when population < 8.
TrainResult train_cem(const CemConfig& config, std::uint64_t seed);

AgentConfig cem_agent(const TrainResult& r, const CemConfig& config);
ExperimentReport training_report(const TrainResult& r, const CemConfig& config, std::uint64_t seed);

// Trains, then measures per-shot success of the learned policy on
// `eval_episodes` held-out layouts (row "cem/eval").
ExperimentReport run_cem_experiment(const CemConfig& config, long eval_episodes, std::uint64_t seed);

// Layout seed of the held-out evaluation set, shared by masked and unmasked runs.
constexpr std::uint64_t cem_eval_seed(std::uint64_t seed) { return seed ^ (0xe7a1ULL << 32); }

} // namespace cueforge
