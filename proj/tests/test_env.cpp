#include "doctest.h"

#include "cueforge/common/errors.hpp"
#include "cueforge/env/env.hpp"
#include "support/scenes.hpp"

#include <random>

using namespace cueforge;
using cueforge::testing::make_ball;
using cueforge::testing::make_state;

namespace {

Event pocket_event(int ball, int pocket, double t)
{
    Event e;
    e.kind = EventKind::pocketed;
    e.ball = ball;
    e.pocket = pocket;
    e.time = t;
    return e;
}

Event hit_event(int a, int b, Vec2 pos_b, Vec2 vel_b)
{
    Event e;
    e.kind = EventKind::ball_hit;
    e.ball = a;
    e.other = b;
    e.velocity = {1, 0};
    e.other_position = pos_b;
    e.other_velocity = vel_b;
    return e;
}

SimOutcome outcome_of(const TableState& before, std::vector<Event> events)
{
    SimOutcome o;
    o.final_state = before;
    for (const auto& e : events)
        if (e.kind == EventKind::pocketed)
            o.final_state.find(e.ball)->pocketed = true;
    o.events = std::move(events);
    return o;
}

TableState rack(int blues)
{
    std::mt19937_64 rng(1);
    return testing::random_layout(rng, blues, Variant::all_ball);
}

} // namespace

TEST_CASE("reward formulas")
{
    CHECK(angle_reward(0) == doctest::Approx(50));
    CHECK(angle_reward(10) == doctest::Approx(0));
    CHECK(miss_reward(0, 100) == 0);
    CHECK(miss_reward(100, 100) == doctest::Approx(-50));
    for (double v = 0; v < 180; v += 0.5)
        CHECK(angle_reward(v + 0.5) < angle_reward(v));
    for (double d = 0; d <= 740; d += 37)
        CHECK(miss_reward(d, 740) == doctest::Approx(-50 * d / 740));
}

TEST_CASE("reset composition and clearance")
{
    for (Variant v : {Variant::one_ball, Variant::two_ball, Variant::all_ball}) {
        EnvConfig c;
        c.variant = v;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const TableState s = reset_state(c, seed);
            CHECK_NOTHROW(validate_state(s, c.table));
            const std::size_t expect = v == Variant::one_ball ? 1 : (v == Variant::two_ball ? 2 : 16);
            CHECK(s.balls.size() == expect);
            CHECK(s.balls[0].cls == BallClass::cue);
            for (const auto& a : s.balls) {
                CHECK(a.pos.x >= 7);
                CHECK(a.pos.x <= 655);
                CHECK(a.pos.y >= 7);
                CHECK(a.pos.y <= 330);
                for (const auto& b : s.balls)
                    if (a.id != b.id)
                        CHECK(distance(a.pos, b.pos) >= 14);
            }
        }
    }
    EnvConfig c;
    c.variant = Variant::all_ball;
    c.n_blue = 7;
    CHECK(reset_state(c, 4).balls.size() == 9);
    const TableState a = reset_state(c, 99), b = reset_state(c, 99);
    for (std::size_t i = 0; i < a.balls.size(); ++i)
        CHECK(a.balls[i].pos == b.balls[i].pos);
}

TEST_CASE("1ball: pocketing the cue wins")
{
    TableState s = make_state({make_ball(0, 331, 168.5)}, Variant::one_ball);
    const double deg = rad_to_deg(std::atan2(-168.5, 331.0));
    const auto r = step_env(s, {snap_alpha(deg), 29});
    CHECK(r.verdict.win);
    CHECK(r.verdict.success);
    CHECK(r.terminated);
    CHECK(r.reward.term("cue_pocket_penalty") == 0);
    CHECK(r.reward.term("win") == 100);
}

TEST_CASE("2ball: scratching is a loss with the cue penalty")
{
    TableState s = make_state({make_ball(0, 331, 168.5), make_ball(8, 331, 300)}, Variant::two_ball);
    const double deg = rad_to_deg(std::atan2(-168.5, 331.0));
    const auto r = step_env(s, {snap_alpha(deg), 29});
    CHECK(r.verdict.loss);
    CHECK(r.terminated);
    CHECK(r.reward.term("cue_pocket_penalty") == -80);
    CHECK(r.reward.term("lose") == -100);
    CHECK(r.reward.term("blue_hit") == 0);
}

TEST_CASE("allball rules")
{
    const TableState s = rack(3);
    const int blue = s.balls[1].id;
    SUBCASE("blue pocketed keeps the turn")
    {
        const auto o = outcome_of(s, {hit_event(0, blue, s.find(blue)->pos, {0, -1}), pocket_event(blue, 0, 1)});
        const auto v = judge_shot(s, o);
        CHECK(v.success);
        CHECK_FALSE(v.win);
        CHECK_FALSE(v.loss);
        const auto r = compute_reward(o, s, o.final_state);
        CHECK(r.term("blue_pocketed") == 50);
        CHECK(r.term("blue_hit") == 10);
    }
    SUBCASE("black with blues live loses")
    {
        const auto o = outcome_of(s, {pocket_event(kBlackId, 2, 1)});
        CHECK(is_loss(s, o));
        CHECK_FALSE(is_win(s, o));
    }
    SUBCASE("cue and blue together is still a loss")
    {
        const auto o = outcome_of(s, {pocket_event(blue, 0, 1), pocket_event(kCueId, 3, 2)});
        CHECK(is_loss(s, o));
        CHECK_FALSE(judge_shot(s, o).success);
    }
    SUBCASE("last blues then black wins")
    {
        TableState t = s;
        for (auto& b : t.balls)
            if (b.cls == BallClass::blue && b.id != blue)
                b.pocketed = true;
        const auto o = outcome_of(t, {pocket_event(blue, 0, 1), pocket_event(kBlackId, 5, 2)});
        CHECK(is_win(t, o));
        const auto early = outcome_of(t, {pocket_event(kBlackId, 5, 1), pocket_event(blue, 0, 2)});
        CHECK(is_loss(t, early));
    }
    SUBCASE("winning shot with a scratch is a loss")
    {
        TableState t = s;
        for (auto& b : t.balls)
            if (b.cls == BallClass::blue)
                b.pocketed = true;
        const auto o = outcome_of(t, {pocket_event(kBlackId, 5, 1), pocket_event(kCueId, 0, 2)});
        CHECK(is_loss(t, o));
        CHECK_FALSE(is_win(t, o));
    }
}

TEST_CASE("angle term uses the best pocket direction of any hit blue")
{
    const TableState s = rack(2);
    const int blue = s.balls[1].id;
    const Vec2 p = s.find(blue)->pos;
    const Vec2 to_pocket = Vec2{662, 337} - p;
    const auto o = outcome_of(s, {hit_event(0, blue, p, normalized(to_pocket) * 300.0)});
    const auto r = compute_reward(o, s, o.final_state);
    CHECK(r.term("angle_term") == doctest::Approx(50));
    CHECK(r.term("miss_distance_term") == 0);
}

TEST_CASE("miss distance term")
{
    TableState s = make_state({make_ball(0, 100, 100), make_ball(8, 400, 100)}, Variant::two_ball);
    const auto o = outcome_of(s, {});
    const auto r = compute_reward(o, s, s);
    CHECK(r.term("miss_distance_term") == doctest::Approx(-50 * 300 / default_table().diagonal()));
    CHECK(r.term("angle_term") == 0);
}

TEST_CASE("clipping")
{
    TableState s = rack(14);
    for (auto& b : s.balls)
        if (b.cls == BallClass::blue && b.id > 2)
            b.pocketed = true;
    const Vec2 aim = Vec2{0, 0} - s.find(1)->pos;
    const auto o = outcome_of(s, {hit_event(0, 1, s.find(1)->pos, aim), pocket_event(1, 0, 1),
                                  hit_event(0, 2, s.find(2)->pos, {0, -1}), pocket_event(2, 1, 2),
                                  pocket_event(kBlackId, 2, 3)});
    const auto r = compute_reward(o, s, o.final_state);
    CHECK(r.clipped == 210);
    CHECK(r.normalized == 1.0);
}

TEST_CASE("reward stays normalized on fuzzed outcomes")
{
    std::mt19937_64 rng(8);
    const TableState base = rack(14);
    std::uniform_int_distribution<int> ball(0, 15), kind(0, 2), pocket(0, 5);
    std::uniform_real_distribution<double> vel(-500, 500);
    for (int trial = 0; trial < 100000; ++trial) {
        TableState s = base;
        s.variant = static_cast<Variant>(trial % 3);
        std::vector<Event> ev;
        std::vector<bool> gone(16, false);
        const int n = static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            const int a = ball(rng), b = ball(rng);
            if (!base.find(a) || !base.find(b) || gone[static_cast<std::size_t>(a)])
                continue;
            if (kind(rng) == 0) {
                ev.push_back(pocket_event(a, pocket(rng), i));
                gone[static_cast<std::size_t>(a)] = true;
            } else if (a != b) {
                ev.push_back(hit_event(a, b, base.find(b)->pos, {vel(rng), vel(rng)}));
            }
        }
        const auto o = outcome_of(s, ev);
        const auto r = compute_reward(o, s, o.final_state);
        REQUIRE(r.normalized >= -1.0);
        REQUIRE(r.normalized <= 1.0);
        REQUIRE(r.normalized == r.clipped / 210.0);
    }
}

TEST_CASE("episodes keep the state valid")
{
    std::mt19937_64 rng(31);
    for (Variant v : {Variant::one_ball, Variant::two_ball, Variant::all_ball}) {
        EnvConfig c;
        c.variant = v;
        PoolEnv env(c);
        for (int ep = 0; ep < 60; ++ep) {
            env.reset(rng());
            const auto classes_before = env.state().balls.size();
            for (int shot = 0; shot < 10 && !env.terminated(); ++shot) {
                const auto& r = env.step({static_cast<int>(rng() % 36000), static_cast<int>(rng() % 30)});
                CHECK(r.reward.normalized >= -1.0);
                CHECK(r.reward.normalized <= 1.0);
                CHECK(r.state.balls.size() == classes_before);
                TableState live = r.state;
                live.balls.erase(std::remove_if(live.balls.begin(), live.balls.end(),
                                                [](const Ball& b) { return b.pocketed && b.id != kCueId; }),
                                 live.balls.end());
                if (live.cue_live())
                    CHECK_NOTHROW(validate_state(r.state, c.table));
            }
        }
    }
}

TEST_CASE("invalid actions")
{
    PoolEnv env;
    env.reset(1);
    CHECK_THROWS_AS(env.step({36000, 0}), ActionError);
    CHECK_THROWS_AS(env.step({0, -1}), ActionError);
}
