#pragma once

#include "cueforge/physics/state.hpp"
#include "cueforge/physics/table.hpp"

#include <optional>
#include <vector>

namespace cueforge {

inline constexpr int kAlphaSteps = 36000; // 0.01 degree grid
inline constexpr int kRhoSteps = 30;

struct Shot
{
    int alpha_index = 0;
    int rho_index = 0;

    double alpha_deg() const { return alpha_index * 0.01; }
    bool valid() const { return alpha_index >= 0 && alpha_index < kAlphaSteps && rho_index >= 0 && rho_index < kRhoSteps; }
    bool operator==(const Shot&) const = default;
};

// Nearest grid index for an angle in degrees (wraps into [0, 360)).
int snap_alpha(double degrees);
// Unit vector for a shot angle; 0 deg points +x, 90 deg points +y (down the table).
Vec2 shot_direction(double degrees);

struct PhysicsParams
{
    double damping = 0.47;      // k in dv/dt = -k v, 1/s
    double v_max = 1245.0;      // px/s at the top power index
    double dt = 1.0 / 240.0;    // s
    double rest_epsilon = 1.0;  // px/s, speeds below snap to zero at step end
    double max_sim_time = 60.0; // s

    double speed(int rho_index) const { return v_max * (rho_index + 1) / kRhoSteps; }
    // Distance covered from speed v until rest (ignores the rest snap).
    double stopping_distance(double v) const { return v / damping; }
};

enum class EventKind
{
    ball_hit,
    cushion_hit,
    pocketed,
};

const char* event_kind_name(EventKind k);

struct Event
{
    EventKind kind = EventKind::ball_hit;
    double time = 0.0;
    int ball = -1;
    int other = -1;  // ball_hit: second ball
    int pocket = -1; // pocketed
    Side side = Side::left;
    Vec2 position;
    Vec2 velocity_before;
    Vec2 velocity; // after the event
    Vec2 other_position;
    Vec2 other_velocity_before;
    Vec2 other_velocity;
};

struct SimOutcome
{
    TableState final_state;
    std::vector<Event> events;
    std::optional<Event> first_contact; // first ball-ball contact
    double sim_time = 0.0;
    bool timed_out = false;
};

// Equal-mass frictionless elastic contact: swaps the normal velocity
// components when the pair is approaching along n = unit(pb - pa).
void resolve_ball_contact(Vec2 pa, Vec2& va, Vec2 pb, Vec2& vb);
// Specular reflection off an axis-aligned cushion.
void resolve_cushion_contact(Side side, Vec2& v);

class Simulator
{
  public:
    explicit Simulator(TableGeometry table = {}, PhysicsParams params = {});

    const TableGeometry& table() const { return table_; }
    const PhysicsParams& params() const { return params_; }

    // Advances every live ball by dt with exact damping and time-of-impact
    // ordered collision handling. Events are appended when `events` is set;
    // their times are offset by t0.
    void step(TableState& state, double dt, std::vector<Event>* events = nullptr, double t0 = 0.0) const;

    // Strikes the cue ball and runs fixed steps until every ball rests.
    SimOutcome simulate(const TableState& state, Shot shot) const;
    // Same, but with an arbitrary initial cue velocity.
    SimOutcome simulate_velocity(const TableState& state, Vec2 cue_velocity) const;

  private:
    TableGeometry table_;
    PhysicsParams params_;
};

const Simulator& default_simulator();

std::optional<int> check_pocket(const Ball& ball, const TableGeometry& table);

} // namespace cueforge
