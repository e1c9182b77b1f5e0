#pragma once

#include "cueforge/bench/agent.hpp"
#include "cueforge/bench/report.hpp"
#include "cueforge/physics/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cueforge {

// Episode i uses the layout reset_state(variant, seed + i) and the agent seed
// mix_seed(seed, i); episodes run on a worker pool and are reduced in order.

// Per-shot success of the first shot from a fresh layout.
ExperimentReport run_success_rate(const AgentConfig& agent, Variant variant, long episodes, std::uint64_t seed);

// All-ball episodes: success iff every blue and then the black are pocketed
// without an unsuccessful shot, within `cap` shots.
ExperimentReport run_full_turn(const AgentConfig& agent, long episodes, std::uint64_t seed, int cap = 50);

// The 8-point sweep used by the CLI and the acceptance run (degrees).
inline std::vector<double> default_noise_sigmas() { return {0, 0.01, 0.05, 0.1, 0.25, 1, 3, 5}; }

// Best planned shot per layout with N(0, sigma^2) degrees of angular noise.
// Noise is paired across sigmas: episode i uses sigma * z_i. extra.transitions
// counts episodes that flip between neighbouring sigmas.
ExperimentReport run_noise_sweep(const std::vector<double>& sigmas_deg, const std::vector<Variant>& variants,
                                 long episodes, std::uint64_t seed, bool mirror = false);

enum class ShiftModel
{
    none,
    empirical_band, // distance drawn from measured per-scene projection shifts
    fixed_cm,
};

const char* shift_model_name(ShiftModel m);

struct ShiftConfig
{
    ShiftModel model = ShiftModel::empirical_band;
    double fixed_cm = 2.5;
    std::vector<double> band_cm; // empty: measured with projection_error_experiment
};

// 2-ball: the planner sees the true layout, the shot is played after the
// black is moved by the sampled distance in a uniform random direction.
// Rows: direct/baseline, direct/shifted, mirror/baseline, mirror/shifted.
ExperimentReport run_shift_experiment(const ShiftConfig& shift, long episodes, std::uint64_t seed);

struct ViewClassShift
{
    std::string name;
    std::vector<double> scene_shift_cm; // per-scene mean ball shift against the top-down view
    long failures = 0;                  // scenes where either view failed to locate

    double mean_cm() const;
};

struct ProjectionErrorResult
{
    double noiseless_max_px = 0; // worst ball error over all views, no noise
    long noiseless_failures = 0;
    std::vector<ViewClassShift> views; // 45 degrees, near-front

    std::vector<double> band_cm() const;
    double mean_cm() const;
    double best_view_mean_cm() const;
};

// Top-down, 45 degree and near-front renders of the same all-ball layouts
// with `sigma_px` noise on every box edge.
ProjectionErrorResult projection_error_experiment(int scenes, double sigma_px, std::uint64_t seed,
                                                  int width = 1920, int height = 1080);

} // namespace cueforge
