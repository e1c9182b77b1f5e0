#include "cueforge/shotplan/shotplan.hpp"

#include "cueforge/kernels/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cueforge {

Vec2 reflect(Vec2 p, Side side, const TableGeometry& table)
{
    const double line = table.contact_line(side);
    if (side == Side::left || side == Side::right)
        return {2.0 * line - p.x, p.y};
    return {p.x, 2.0 * line - p.y};
}

Vec2 pocket_aim(int pocket, const TableGeometry& table) { return table.clamp_to_valid(table.pocket(pocket)); }

std::pair<Vec2, Vec2> pocket_mouth(int pocket, const TableGeometry& table)
{
    const Vec2 c = table.pocket(pocket);
    const double r = table.pocket_radius;
    if (pocket == 1 || pocket == 4)
        return {{c.x - r, c.y}, {c.x + r, c.y}};
    const double sx = c.x == 0.0 ? 1.0 : -1.0;
    const double sy = c.y == 0.0 ? 1.0 : -1.0;
    return {{c.x + sx * r, c.y}, {c.x, c.y + sy * r}};
}

bool pocket_on_side(int pocket, Side side)
{
    switch (side) {
    case Side::top: return pocket <= 2;
    case Side::bottom: return pocket >= 3;
    case Side::left: return pocket == 0 || pocket == 3;
    case Side::right: return pocket == 2 || pocket == 5;
    }
    return false;
}

double Unfolded::length() const
{
    double len = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        len += distance(points[i - 1], points[i]);
    return len;
}

std::optional<Unfolded> unfold(Vec2 start, const std::vector<Side>& sides, Vec2 end, const TableGeometry& table)
{
    Unfolded u;
    Vec2 virt = end;
    for (auto it = sides.rbegin(); it != sides.rend(); ++it)
        virt = reflect(virt, *it, table);
    u.virtual_end = virt;
    u.points.push_back(start);

    Vec2 cur = start;
    for (Side side : sides) {
        const bool vertical = side == Side::left || side == Side::right;
        const double line = table.contact_line(side);
        const double a = vertical ? cur.x : cur.y;
        const double b = vertical ? virt.x : virt.y;
        if (a == b)
            return std::nullopt;
        const double t = (line - a) / (b - a);
        if (!(t > 0.0 && t < 1.0))
            return std::nullopt;
        Vec2 x = cur + (virt - cur) * t;
        if (vertical) {
            x.x = line;
            if (x.y < table.min_y() || x.y > table.max_y())
                return std::nullopt;
        } else {
            x.y = line;
            if (x.x < table.min_x() || x.x > table.max_x())
                return std::nullopt;
        }
        u.points.push_back(x);
        virt = reflect(virt, side, table);
        cur = x;
    }
    u.points.push_back(end);
    return u;
}

namespace {

double path_length(const std::vector<Vec2>& pts)
{
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        len += distance(pts[i - 1], pts[i]);
    return len;
}

struct Obstacles
{
    std::array<double, kMaxBalls> x{}, y{};
    std::array<int, kMaxBalls> id{};
    std::size_t n = 0;
};

Obstacles live_balls(const TableState& s)
{
    Obstacles o;
    for (const auto& b : s.balls) {
        if (b.pocketed || o.n == o.x.size())
            continue;
        o.x[o.n] = b.pos.x;
        o.y[o.n] = b.pos.y;
        o.id[o.n] = b.id;
        ++o.n;
    }
    return o;
}

bool leg_clear_of_balls(const Obstacles& o, Vec2 a, Vec2 b, double min_dist, int skip1, int skip2)
{
    std::uint64_t mask = kernels::segment_blockers(o.x.data(), o.y.data(), o.n, a.x, a.y, b.x, b.y, min_dist * min_dist);
    for (std::size_t i = 0; i < o.n; ++i)
        if (o.id[i] == skip1 || o.id[i] == skip2)
            mask &= ~(std::uint64_t{1} << i);
    return mask == 0;
}

bool leg_clear_of_pockets(const TableGeometry& t, Vec2 a, Vec2 b, int allowed)
{
    const auto pockets = t.pockets();
    std::array<double, 6> px{}, py{};
    for (std::size_t i = 0; i < 6; ++i) {
        px[i] = pockets[i].x;
        py[i] = pockets[i].y;
    }
    std::uint64_t mask =
        kernels::segment_blockers(px.data(), py.data(), 6, a.x, a.y, b.x, b.y, t.pocket_radius * t.pocket_radius);
    if (allowed >= 0)
        mask &= ~(std::uint64_t{1} << allowed);
    return mask == 0;
}

std::vector<std::vector<Side>> side_sequences(int depth)
{
    constexpr std::array<Side, 4> all{Side::left, Side::right, Side::top, Side::bottom};
    std::vector<std::vector<Side>> out{{}};
    std::size_t begin = 0;
    for (int d = 1; d <= depth; ++d) {
        const std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (Side s : all) {
                if (!out[i].empty() && out[i].back() == s)
                    continue;
                auto seq = out[i];
                seq.push_back(s);
                out.push_back(std::move(seq));
            }
        }
        begin = end;
    }
    return out;
}

double heading_deg(Vec2 v)
{
    double d = rad_to_deg(std::atan2(v.y, v.x));
    return d < 0.0 ? d + 360.0 : d;
}

bool legs_clear(const std::vector<Vec2>& pts, const Obstacles& o, const TableGeometry& t, int skip_all1, int skip_all2,
                int skip_last, int last_pocket)
{
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const bool last = i + 1 == pts.size();
        if (!leg_clear_of_balls(o, pts[i - 1], pts[i], 2.0 * t.ball_radius, skip_all1, last ? skip_last : skip_all2))
            return false;
        if (!leg_clear_of_pockets(t, pts[i - 1], pts[i], last ? last_pocket : -1))
            return false;
    }
    return true;
}

// Builds one hitpoint; nullopt when no straight unfolded path exists at all.
std::optional<Hitpoint> make_hitpoint(const TableState& state, const Obstacles& obstacles, int target, int pocket,
                                      const std::vector<Side>& target_sides, const std::vector<Side>& cue_sides,
                                      const TableGeometry& t)
{
    const Ball* cue = state.cue();
    const Ball* tb = state.find(target);
    const Vec2 aim = pocket_aim(pocket, t);
    const auto tp = unfold(tb->pos, target_sides, aim, t);
    if (!tp)
        return std::nullopt;

    Hitpoint hp;
    hp.target_ball = target;
    hp.pocket = pocket;
    hp.target_sides = target_sides;
    hp.cue_sides = cue_sides;
    hp.cushions_target = static_cast<int>(target_sides.size());
    hp.cushions_cue = static_cast<int>(cue_sides.size());
    hp.target_path = tp->points;
    Vec2 vp = t.pocket(pocket);
    for (auto it = target_sides.rbegin(); it != target_sides.rend(); ++it)
        vp = reflect(vp, *it, t);
    hp.virtual_pocket = vp;

    if (target == kCueId) {
        hp.aim_point = aim;
        hp.virtual_aim = tp->virtual_end;
        hp.cue_path = tp->points;
        hp.alpha_deg = heading_deg(tp->virtual_end - tb->pos);
        hp.alpha_index = snap_alpha(hp.alpha_deg);
        hp.feasible = legs_clear(tp->points, obstacles, t, kCueId, kCueId, kCueId, pocket);
        return hp;
    }

    const Vec2 ghost = ghost_point(tb->pos, tp->virtual_end, t.ball_radius);
    hp.aim_point = ghost;
    const auto cp = unfold(cue->pos, cue_sides, ghost, t);
    if (!cp)
        return std::nullopt;
    hp.virtual_aim = cp->virtual_end;
    hp.cue_path = cp->points;
    hp.alpha_deg = heading_deg(cp->virtual_end - cue->pos);
    hp.alpha_index = snap_alpha(hp.alpha_deg);

    const Vec2 last_leg = ghost - cp->points[cp->points.size() - 2];
    const bool cut_ok = dot(last_leg, tb->pos - ghost) > 0.0;
    const bool ghost_ok = t.in_valid_region(ghost) && !pocket_at(ghost, t);
    hp.feasible = cut_ok && ghost_ok &&
                  legs_clear(cp->points, obstacles, t, kCueId, kCueId, target, -1) &&
                  legs_clear(tp->points, obstacles, t, target, kCueId, kCueId, pocket);
    return hp;
}

std::vector<Hitpoint> enumerate(const TableState& state, int depth, bool include_direct, const TableGeometry& t)
{
    std::vector<Hitpoint> out;
    if (!state.cue_live())
        return out;
    const Obstacles obstacles = live_balls(state);
    const auto seqs = side_sequences(depth);
    for (int target : target_ids(state)) {
        for (int pocket = 0; pocket < 6; ++pocket) {
            for (const auto& ts : seqs) {
                if (!ts.empty() && pocket_on_side(pocket, ts.back()))
                    continue;
                for (const auto& cs : seqs) {
                    const std::size_t total = ts.size() + cs.size();
                    if (total > static_cast<std::size_t>(depth) || (total == 0 && !include_direct))
                        continue;
                    if (target == kCueId && !cs.empty())
                        continue;
                    if (auto hp = make_hitpoint(state, obstacles, target, pocket, ts, cs, t))
                        out.push_back(std::move(*hp));
                }
            }
        }
    }
    return out;
}

} // namespace

std::vector<Hitpoint> direct_hitpoints(const TableState& state, const TableGeometry& table)
{
    return enumerate(state, 0, true, table);
}

std::vector<Hitpoint> mirror_hitpoints(const TableState& state, int depth, const TableGeometry& table)
{
    return enumerate(state, depth, false, table);
}

std::vector<Hitpoint> enumerate_hitpoints(const TableState& state, bool use_mirror, const PlanConfig& config,
                                          const TableGeometry& table)
{
    return enumerate(state, use_mirror ? config.mirror_depth : 0, true, table);
}

int power_lower_bound(const Hitpoint& hp, double cos_cut, const Simulator& sim)
{
    const TableGeometry& t = sim.table();
    const PhysicsParams& p = sim.params();
    const Vec2 aim = pocket_aim(hp.pocket, t);
    // Distance the target covers before its center can first enter the pocket disk.
    const double entry =
        std::max(0.0, path_length(hp.target_path) - t.pocket_radius - distance(aim, t.pocket(hp.pocket)));
    double v0;
    if (hp.target_ball == kCueId) {
        v0 = p.damping * entry;
    } else {
        // Speed drops by k per unit distance; the target leaves with the cue speed times cos_cut.
        v0 = p.damping * path_length(hp.cue_path) + p.damping * entry / std::max(cos_cut, 1e-3);
    }
    v0 += p.rest_epsilon;
    const int rho = static_cast<int>(std::ceil(v0 * kRhoSteps / p.v_max)) - 1;
    return std::clamp(rho, 0, kRhoSteps - 1);
}

ScoredShot oracle_score(const TableState& state, const Hitpoint& hp, const PlanConfig& config, const Simulator& sim)
{
    const TableGeometry& t = sim.table();
    ScoredShot s;
    s.hitpoint = hp;
    const Vec2 target = state.find(hp.target_ball)->pos;
    if (hp.target_ball == kCueId) {
        s.cos_cut = 1.0;
    } else {
        const Vec2 cue_dir = hp.aim_point - hp.cue_path[hp.cue_path.size() - 2];
        const Vec2 target_dir = hp.target_path[1] - hp.target_path[0];
        s.cos_cut = std::clamp(dot(normalized(cue_dir), normalized(target_dir)), -1.0, 1.0);
    }
    auto [m1, m2] = pocket_mouth(hp.pocket, t);
    for (auto it = hp.target_sides.rbegin(); it != hp.target_sides.rend(); ++it) {
        m1 = reflect(m1, *it, t);
        m2 = reflect(m2, *it, t);
    }
    s.target_window = angle_between(m1 - target, m2 - target);
    s.cushion_penalty = std::pow(config.cushion_multiplier, hp.cushions());
    s.score = hp.feasible ? std::max(0.0, s.cos_cut) * s.target_window * s.cushion_penalty : 0.0;
    s.rho = power_lower_bound(hp, s.cos_cut, sim);
    return s;
}

bool shot_pockets_target(const TableState& state, const Hitpoint& hp, Shot shot, const Simulator& sim,
                         SimOutcome* outcome)
{
    SimOutcome out = sim.simulate(state, shot);
    const ShotVerdict v = judge_shot(state, out);
    const Ball* tb = out.final_state.find(hp.target_ball);
    const bool ok = v.success && !v.loss && tb && tb->pocketed;
    if (outcome)
        *outcome = std::move(out);
    return ok;
}

std::optional<int> verified_power(const TableState& state, const ScoredShot& s, const Simulator& sim,
                                  SimOutcome* outcome)
{
    const int base = s.rho;
    int last = -1;
    for (int step : {0, 1, 2, 4, 8, 16, kRhoSteps}) {
        const int rho = std::min(base + step, kRhoSteps - 1);
        if (rho == last)
            continue;
        last = rho;
        if (shot_pockets_target(state, s.hitpoint, {s.hitpoint.alpha_index, rho}, sim, outcome))
            return rho;
    }
    return std::nullopt;
}

std::vector<ScoredShot> ranked_shots(const TableState& state, bool use_mirror, const PlanConfig& config,
                                     const Simulator& sim)
{
    std::vector<ScoredShot> out;
    for (const auto& hp : enumerate_hitpoints(state, use_mirror, config, sim.table())) {
        if (!hp.feasible)
            continue;
        ScoredShot s = oracle_score(state, hp, config, sim);
        if (s.score > 0.0)
            out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredShot& a, const ScoredShot& b) {
        if (a.score != b.score)
            return a.score > b.score;
        if (a.hitpoint.cushions() != b.hitpoint.cushions())
            return a.hitpoint.cushions() < b.hitpoint.cushions();
        return a.target_window > b.target_window;
    });
    return out;
}

std::optional<Suggestion> best_shot(const TableState& state, bool use_mirror, const PlanConfig& config,
                                    const Simulator& sim)
{
    const auto ranked = ranked_shots(state, use_mirror, config, sim);
    if (ranked.empty())
        return std::nullopt;
    const std::size_t budget = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(std::max(config.verify_budget, 1)));
    for (std::size_t i = 0; i < budget; ++i) {
        Suggestion sug;
        if (auto rho = verified_power(state, ranked[i], sim, &sug.predicted)) {
            sug.scored = ranked[i];
            sug.scored.rho = *rho;
            sug.shot = {ranked[i].hitpoint.alpha_index, *rho};
            sug.verified = true;
            return sug;
        }
    }
    Suggestion sug;
    sug.scored = ranked.front();
    sug.scored.rho = kRhoSteps - 1;
    sug.shot = {sug.scored.hitpoint.alpha_index, sug.scored.rho};
    sug.predicted = sim.simulate(state, sug.shot);
    return sug;
}

std::vector<Shot> masked_action_space(const TableState& state, bool use_mirror, const PlanConfig& config,
                                      const TableGeometry& table)
{
    std::vector<Shot> out;
    for (const auto& hp : enumerate_hitpoints(state, use_mirror, config, table)) {
        if (!hp.feasible)
            continue;
        for (int rho = 0; rho < kRhoSteps; ++rho)
            out.push_back({hp.alpha_index, rho});
    }
    return out;
}

} // namespace cueforge
