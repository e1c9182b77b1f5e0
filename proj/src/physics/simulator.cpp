#include "cueforge/physics/simulator.hpp"

#include "cueforge/kernels/kernels.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace cueforge {

int snap_alpha(double degrees)
{
    long long idx = std::llround(degrees * 100.0) % kAlphaSteps;
    if (idx < 0)
        idx += kAlphaSteps;
    return static_cast<int>(idx);
}

Vec2 shot_direction(double degrees)
{
    const double a = deg_to_rad(degrees);
    return {std::cos(a), std::sin(a)};
}

const char* event_kind_name(EventKind k)
{
    switch (k) {
    case EventKind::ball_hit: return "ball_hit";
    case EventKind::cushion_hit: return "cushion_hit";
    case EventKind::pocketed: return "pocketed";
    }
    return "?";
}

void resolve_ball_contact(Vec2 pa, Vec2& va, Vec2 pb, Vec2& vb)
{
    const Vec2 d = pb - pa;
    const double len = d.norm();
    if (len == 0.0)
        return;
    const Vec2 n = d / len;
    const double rel = dot(va - vb, n);
    if (rel <= 0.0)
        return;
    va -= n * rel;
    vb += n * rel;
}

void resolve_cushion_contact(Side side, Vec2& v)
{
    switch (side) {
    case Side::left:
        if (v.x < 0) v.x = -v.x;
        break;
    case Side::right:
        if (v.x > 0) v.x = -v.x;
        break;
    case Side::top:
        if (v.y < 0) v.y = -v.y;
        break;
    case Side::bottom:
        if (v.y > 0) v.y = -v.y;
        break;
    }
}

std::optional<int> check_pocket(const Ball& ball, const TableGeometry& table)
{
    if (ball.pocketed)
        return std::nullopt;
    return pocket_at(ball.pos, table);
}

Simulator::Simulator(TableGeometry table, PhysicsParams params) : table_(table), params_(params) {}

const Simulator& default_simulator()
{
    static const Simulator sim{};
    return sim;
}

namespace {

constexpr int kMaxEventsPerStep = 4096;

struct Pending
{
    double s = std::numeric_limits<double>::infinity();
    EventKind kind = EventKind::ball_hit;
    int a = -1; // index into state.balls
    int b = -1;
    int pocket = -1;
    Side side = Side::left;
};

// Parameter at which a ball center moving with velocity v reaches the contact
// line of `side`; infinity if it moves away.
double cushion_param(const TableGeometry& t, Side side, Vec2 p, Vec2 v)
{
    const double inf = std::numeric_limits<double>::infinity();
    const double line = t.contact_line(side);
    switch (side) {
    case Side::left:
        if (!(v.x < 0)) return inf;
        return p.x <= line ? 0.0 : (line - p.x) / v.x;
    case Side::right:
        if (!(v.x > 0)) return inf;
        return p.x >= line ? 0.0 : (line - p.x) / v.x;
    case Side::top:
        if (!(v.y < 0)) return inf;
        return p.y <= line ? 0.0 : (line - p.y) / v.y;
    case Side::bottom:
        if (!(v.y > 0)) return inf;
        return p.y >= line ? 0.0 : (line - p.y) / v.y;
    }
    return inf;
}

} // namespace

void Simulator::step(TableState& state, double dt, std::vector<Event>* events, double t0) const
{
    const double k = params_.damping;
    const auto pockets = table_.pockets();
    std::array<double, 6> pocket_x{}, pocket_y{};
    for (std::size_t i = 0; i < 6; ++i) {
        pocket_x[i] = pockets[i].x;
        pocket_y[i] = pockets[i].y;
    }
    const kernels::CircleSoA pocket_soa{pocket_x.data(), pocket_y.data(), nullptr, nullptr, 6};
    const double pocket_reach = table_.pocket_radius * table_.pocket_radius;
    const double ball_reach = 4.0 * table_.ball_radius * table_.ball_radius;
    constexpr std::array<Side, 4> sides{Side::left, Side::right, Side::top, Side::bottom};

    std::array<int, kMaxBalls> live{};
    std::array<double, kMaxBalls> bx{}, by{}, bvx{}, bvy{};

    double f_rem = std::exp(-k * dt);
    double elapsed = 0.0;
    auto& balls = state.balls;

    for (int guard = 0;; ++guard) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < balls.size() && n < live.size(); ++i) {
            if (balls[i].pocketed)
                continue;
            live[n] = static_cast<int>(i);
            bx[n] = balls[i].pos.x;
            by[n] = balls[i].pos.y;
            bvx[n] = balls[i].vel.x;
            bvy[n] = balls[i].vel.y;
            ++n;
        }
        const kernels::CircleSoA ball_soa{bx.data(), by.data(), bvx.data(), bvy.data(), n};
        const double s_max = (1.0 - f_rem) / k;

        Pending next;
        if (guard < kMaxEventsPerStep) {
            for (std::size_t m = 0; m < n; ++m) {
                const Ball& ball = balls[static_cast<std::size_t>(live[m])];
                if (ball.vel == Vec2{})
                    continue;
                const kernels::Mover mover{ball.pos.x, ball.pos.y, ball.vel.x, ball.vel.y};

                const auto pc = kernels::earliest_contact(pocket_soa, mover, pocket_reach, s_max);
                if (pc.index >= 0 && pc.s < next.s)
                    next = {pc.s, EventKind::pocketed, live[m], -1, pc.index, Side::left};

                for (Side side : sides) {
                    const double s = cushion_param(table_, side, ball.pos, ball.vel);
                    if (s <= s_max && s < next.s)
                        next = {s, EventKind::cushion_hit, live[m], -1, -1, side};
                }

                const auto bc = kernels::earliest_contact(ball_soa, mover, ball_reach, s_max);
                if (bc.index >= 0 && bc.s < next.s)
                    next = {bc.s, EventKind::ball_hit, live[m], live[static_cast<std::size_t>(bc.index)], -1,
                            Side::left};
            }
        }

        const double s = std::isfinite(next.s) ? next.s : s_max;
        const double factor = std::isfinite(next.s) ? 1.0 - k * s : f_rem;
        for (std::size_t m = 0; m < n; ++m) {
            Ball& ball = balls[static_cast<std::size_t>(live[m])];
            ball.pos += ball.vel * s;
            ball.vel *= factor;
        }
        if (!std::isfinite(next.s))
            break;

        elapsed += -std::log1p(-k * s) / k;
        f_rem /= factor;

        Ball& a = balls[static_cast<std::size_t>(next.a)];
        Event ev;
        ev.kind = next.kind;
        ev.time = t0 + elapsed;
        ev.ball = a.id;
        ev.velocity_before = a.vel;
        switch (next.kind) {
        case EventKind::pocketed:
            ev.pocket = next.pocket;
            a.pocketed = true;
            a.vel = {};
            break;
        case EventKind::cushion_hit:
            ev.side = next.side;
            if (next.side == Side::left || next.side == Side::right)
                a.pos.x = table_.contact_line(next.side);
            else
                a.pos.y = table_.contact_line(next.side);
            resolve_cushion_contact(next.side, a.vel);
            break;
        case EventKind::ball_hit: {
            Ball& b = balls[static_cast<std::size_t>(next.b)];
            ev.other = b.id;
            ev.other_position = b.pos;
            ev.other_velocity_before = b.vel;
            resolve_ball_contact(a.pos, a.vel, b.pos, b.vel);
            ev.other_velocity = b.vel;
            break;
        }
        }
        ev.position = a.pos;
        ev.velocity = a.vel;
        if (events)
            events->push_back(ev);
    }

    const double eps_sq = params_.rest_epsilon * params_.rest_epsilon;
    for (auto& ball : balls)
        if (!ball.pocketed && ball.vel.norm_sq() < eps_sq)
            ball.vel = {};
}

SimOutcome Simulator::simulate(const TableState& state, Shot shot) const
{
    return simulate_velocity(state, shot_direction(shot.alpha_deg()) * params_.speed(shot.rho_index));
}

SimOutcome Simulator::simulate_velocity(const TableState& state, Vec2 cue_velocity) const
{
    SimOutcome out;
    out.final_state = state;
    TableState& s = out.final_state;
    for (auto& b : s.balls)
        b.vel = {};
    if (Ball* cue = s.find(kCueId); cue && cue->live())
        cue->vel = cue_velocity;

    long long steps = 0;
    double t = 0.0;
    while (!s.at_rest()) {
        if (t >= params_.max_sim_time) {
            out.timed_out = true;
            break;
        }
        step(s, params_.dt, &out.events, t);
        ++steps;
        t = static_cast<double>(steps) * params_.dt;
    }
    out.sim_time = t;
    for (const auto& ev : out.events) {
        if (ev.kind == EventKind::ball_hit) {
            out.first_contact = ev;
            break;
        }
    }
    return out;
}

} // namespace cueforge
