#include "cueforge/env/env.hpp"

#include "cueforge/common/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace cueforge {

double RewardBreakdown::term(std::string_view name) const
{
    for (const auto& t : terms)
        if (t.name == name)
            return t.value;
    return 0.0;
}

double angle_reward(double v_deg) { return 1000.0 / (v_deg + 10.0) - 50.0; }

double miss_reward(double d, double diagonal) { return -50.0 * d / diagonal; }

std::vector<int> target_ids(const TableState& state)
{
    std::vector<int> ids;
    switch (state.variant) {
    case Variant::one_ball:
        if (state.cue_live())
            ids.push_back(kCueId);
        break;
    case Variant::two_ball:
        if (const Ball* b = state.find(kBlackId); b && b->live())
            ids.push_back(kBlackId);
        break;
    case Variant::all_ball:
        for (const auto& b : state.balls)
            if (b.cls == BallClass::blue && b.live())
                ids.push_back(b.id);
        if (ids.empty())
            if (const Ball* b = state.find(kBlackId); b && b->live())
                ids.push_back(kBlackId);
        break;
    }
    return ids;
}

ShotVerdict judge_shot(const TableState& before, const SimOutcome& outcome)
{
    ShotVerdict v;
    int blues_live = before.live_blues();
    bool black_with_blues = false;
    for (const auto& e : outcome.events) {
        if (e.kind != EventKind::pocketed)
            continue;
        const Ball* b = before.find(e.ball);
        if (!b)
            continue;
        switch (b->cls) {
        case BallClass::cue:
            v.cue_pocketed = true;
            break;
        case BallClass::black:
            v.black_pocketed = true;
            black_with_blues = blues_live > 0;
            break;
        case BallClass::blue:
            ++v.blues_pocketed;
            --blues_live;
            break;
        }
    }

    switch (before.variant) {
    case Variant::one_ball:
        v.win = v.cue_pocketed;
        v.success = v.win;
        break;
    case Variant::two_ball:
        v.loss = v.cue_pocketed;
        v.win = v.black_pocketed && !v.loss;
        v.success = v.win;
        break;
    case Variant::all_ball:
        v.loss = v.cue_pocketed || black_with_blues;
        v.win = v.black_pocketed && !v.loss;
        v.success = !v.loss && (v.win || v.blues_pocketed > 0);
        break;
    }
    if (outcome.timed_out) {
        v.win = false;
        v.success = false;
    }
    return v;
}

bool is_win(const TableState& before, const SimOutcome& outcome) { return judge_shot(before, outcome).win; }
bool is_loss(const TableState& before, const SimOutcome& outcome) { return judge_shot(before, outcome).loss; }

RewardBreakdown compute_reward(const SimOutcome& outcome, const TableState& before, const TableState& after,
                               const TableGeometry& table)
{
    const ShotVerdict v = judge_shot(before, outcome);
    const bool blue_terms = before.variant == Variant::all_ball;
    const auto pockets = table.pockets();

    std::set<int> blues_hit;
    double best_angle = INFINITY;
    bool anything_hit = false;
    for (const auto& e : outcome.events) {
        if (e.kind != EventKind::ball_hit)
            continue;
        anything_hit = true;
        const std::pair<int, std::pair<Vec2, Vec2>> sides[2] = {{e.ball, {e.position, e.velocity}},
                                                                {e.other, {e.other_position, e.other_velocity}}};
        for (const auto& [id, pv] : sides) {
            const Ball* b = before.find(id);
            if (!b || b->cls != BallClass::blue || blues_hit.count(id))
                continue;
            blues_hit.insert(id);
            const auto [pos, vel] = pv;
            if (vel.norm_sq() == 0.0)
                continue;
            for (const Vec2& p : pockets)
                best_angle = std::min(best_angle, rad_to_deg(angle_between(vel, p - pos)));
        }
    }

    double miss = 0.0;
    if (!anything_hit) {
        const Ball* cue_after = after.find(kCueId);
        const Vec2 rest = cue_after ? cue_after->pos : Vec2{};
        double d = INFINITY;
        if (before.variant == Variant::one_ball) {
            for (const Vec2& p : pockets)
                d = std::min(d, distance(rest, p));
        } else {
            for (int id : target_ids(before))
                d = std::min(d, distance(rest, before.find(id)->pos));
        }
        if (std::isfinite(d))
            miss = miss_reward(d, table.diagonal());
    }

    RewardBreakdown r;
    r.terms = {
        {"win", v.win ? 100.0 : 0.0},
        {"lose", v.loss ? -100.0 : 0.0},
        {"blue_hit", blue_terms ? 10.0 * static_cast<double>(blues_hit.size()) : 0.0},
        {"blue_pocketed", blue_terms ? 50.0 * v.blues_pocketed : 0.0},
        {"angle_term", blue_terms && std::isfinite(best_angle) ? angle_reward(best_angle) : 0.0},
        {"miss_distance_term", miss},
        {"cue_pocket_penalty", v.cue_pocketed && before.variant != Variant::one_ball ? -80.0 : 0.0},
    };
    double sum = 0.0;
    for (const auto& t : r.terms)
        sum += t.value;
    r.clipped = std::clamp(sum, -kRewardClip, kRewardClip);
    r.normalized = r.clipped / kRewardClip;
    return r;
}

TableState reset_state(const EnvConfig& config, std::uint64_t seed)
{
    const TableGeometry& t = config.table;
    if (config.variant == Variant::all_ball && (config.n_blue < 0 || config.n_blue > 14))
        throw Error("n_blue must lie in [0, 14]");

    std::vector<int> ids{kCueId};
    if (config.variant != Variant::one_ball)
        ids.push_back(kBlackId);
    if (config.variant == Variant::all_ball)
        for (int i = 0; i < config.n_blue; ++i)
            ids.push_back(blue_ids()[static_cast<std::size_t>(i)]);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(t.min_x(), t.max_x()), uy(t.min_y(), t.max_y());
    const double min_sq = 4.0 * t.ball_radius * t.ball_radius;

    TableState s;
    s.variant = config.variant;
    long attempts = 0;
    for (int id : ids) {
        for (;;) {
            if (++attempts > 1'000'000)
                throw PlacementError("could not place balls without overlap");
            const Vec2 p{ux(rng), uy(rng)};
            if (pocket_at(p, t))
                continue;
            bool clear = true;
            for (const auto& b : s.balls)
                clear = clear && (b.pos - p).norm_sq() >= min_sq;
            if (!clear)
                continue;
            Ball b;
            b.id = id;
            b.cls = id == kCueId ? BallClass::cue : (id == kBlackId ? BallClass::black : BallClass::blue);
            b.pos = p;
            s.balls.push_back(b);
            break;
        }
    }
    std::sort(s.balls.begin(), s.balls.end(), [](const Ball& a, const Ball& b) { return a.id < b.id; });
    return s;
}

StepResult step_env(const TableState& state, Shot shot, const Simulator& sim)
{
    if (!shot.valid())
        throw ActionError("shot indices out of range: alpha " + std::to_string(shot.alpha_index) + ", rho " +
                          std::to_string(shot.rho_index));
    if (!state.cue_live())
        throw ActionError("cue ball is not on the table");
    StepResult r;
    r.outcome = sim.simulate(state, shot);
    r.state = r.outcome.final_state;
    r.state.turn_index = state.turn_index + 1;
    r.verdict = judge_shot(state, r.outcome);
    r.reward = compute_reward(r.outcome, state, r.state, sim.table());
    r.terminated = r.verdict.win || r.verdict.loss || !r.verdict.success;
    return r;
}

PoolEnv::PoolEnv(EnvConfig config) : config_(config), sim_(config.table, config.physics)
{
    state_ = reset_state(config_, 0);
}

const TableState& PoolEnv::reset(std::uint64_t seed)
{
    state_ = reset_state(config_, seed);
    terminated_ = false;
    return state_;
}

const StepResult& PoolEnv::step(Shot shot)
{
    if (terminated_)
        throw Error("episode has terminated; call reset()");
    last_ = step_env(state_, shot, sim_);
    state_ = last_.state;
    terminated_ = last_.terminated;
    return last_;
}

void PoolEnv::set_state(TableState state)
{
    validate_state(state, config_.table);
    state_ = std::move(state);
    terminated_ = false;
}

} // namespace cueforge
