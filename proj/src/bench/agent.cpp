#include "cueforge/bench/agent.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cueforge {

const char* agent_kind_name(AgentKind k)
{
    switch (k) {
    case AgentKind::random: return "random";
    case AgentKind::masked_random: return "masked_random";
    case AgentKind::oracle_rand_angle: return "oracle_rand_angle";
    case AgentKind::oracle_best: return "oracle_best";
    case AgentKind::cem_learner: return "cem_learner";
    case AgentKind::fixed: return "fixed";
    }
    return "?";
}

std::optional<AgentKind> agent_kind_from_name(std::string_view name)
{
    for (AgentKind k : {AgentKind::random, AgentKind::masked_random, AgentKind::oracle_rand_angle,
                        AgentKind::oracle_best, AgentKind::cem_learner, AgentKind::fixed})
        if (name == agent_kind_name(k))
            return k;
    return std::nullopt;
}

Agent::Agent(AgentConfig config, const Simulator& sim) : config_(config), sim_(&sim) {}

Shot with_angle_noise(Shot s, double noise_deg)
{
    if (noise_deg != 0)
        s.alpha_index = snap_alpha(s.alpha_deg() + noise_deg);
    return s;
}

namespace {

Shot random_shot(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> a(0, kAlphaSteps - 1), r(0, kRhoSteps - 1);
    const int alpha = a(rng);
    return {alpha, r(rng)};
}

double preference(const CemPolicy& p, const ScoredShot& s)
{
    return p.w[0] * s.score + p.w[1] * s.cos_cut + p.w[2] * s.target_window - p.w[3] * s.hitpoint.cushions();
}

} // namespace

Shot cem_action(const CemPolicy& p, const TableState& state, const std::vector<ScoredShot>& scored, double z)
{
    const double jitter = std::exp(std::clamp(p.w[5], -10.0, 5.0)) * z;
    if (p.masked && !scored.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < scored.size(); ++i)
            if (preference(p, scored[i]) > preference(p, scored[best]))
                best = i;
        const ScoredShot& s = scored[best];
        const int rho = std::clamp(s.rho + static_cast<int>(std::lround(5 * p.w[6])), 0, kRhoSteps - 1);
        return {snap_alpha(s.hitpoint.alpha_deg + p.w[4] + jitter), rho};
    }
    // Without the mask: aim straight at the nearest target (the nearest pocket in 1ball).
    const Ball* cue = state.cue();
    Vec2 aim = cue ? cue->pos : Vec2{};
    double best = INFINITY;
    if (state.variant == Variant::one_ball) {
        for (int k = 0; k < 6; ++k) {
            const Vec2 q = pocket_aim(k, default_table());
            if (cue && distance(q, cue->pos) < best) {
                best = distance(q, cue->pos);
                aim = q;
            }
        }
    } else {
        for (int id : target_ids(state)) {
            const Ball* b = state.find(id);
            if (cue && b && distance(b->pos, cue->pos) < best) {
                best = distance(b->pos, cue->pos);
                aim = b->pos;
            }
        }
    }
    const Vec2 d = cue ? aim - cue->pos : Vec2{1, 0};
    const double base = rad_to_deg(std::atan2(d.y, d.x));
    const int rho = std::clamp(15 + static_cast<int>(std::lround(5 * p.w[6])), 0, kRhoSteps - 1);
    return {snap_alpha(base + p.w[4] + jitter), rho};
}

Shot Agent::act(const TableState& state, std::uint64_t seed) const
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Shot shot{};
    switch (config_.kind) {
    case AgentKind::random:
        shot = random_shot(rng);
        break;
    case AgentKind::fixed:
        shot = config_.fixed_shot;
        break;
    case AgentKind::masked_random: {
        const auto actions = masked_action_space(state, config_.mirror, config_.plan);
        if (actions.empty()) {
            shot = random_shot(rng);
            break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
        shot = actions[pick(rng)];
        break;
    }
    case AgentKind::oracle_rand_angle: {
        const auto ranked = ranked_shots(state, config_.mirror, config_.plan, *sim_);
        if (ranked.empty()) {
            shot = random_shot(rng);
            break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, ranked.size() - 1);
        const ScoredShot& s = ranked[pick(rng)];
        int rho;
        if (config_.max_power) {
            rho = verified_power(state, s, *sim_).value_or(kRhoSteps - 1);
        } else {
            std::uniform_int_distribution<int> r(0, kRhoSteps - 1);
            rho = r(rng);
        }
        shot = {s.hitpoint.alpha_index, rho};
        break;
    }
    case AgentKind::oracle_best: {
        const auto best = best_shot(state, config_.mirror, config_.plan, *sim_);
        shot = best ? best->shot : random_shot(rng);
        break;
    }
    case AgentKind::cem_learner: {
        std::vector<ScoredShot> scored;
        if (config_.policy.masked)
            scored = ranked_shots(state, config_.mirror, config_.plan, *sim_);
        shot = cem_action(config_.policy, state, scored, normal(rng));
        break;
    }
    }
    if (config_.sigma_deg > 0)
        shot = with_angle_noise(shot, config_.sigma_deg * normal(rng));
    return shot;
}

} // namespace cueforge
