#include "cueforge/bench/experiments.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/common/parallel.hpp"
#include "cueforge/env/env.hpp"
#include "cueforge/geometry/locate.hpp"
#include "cueforge/geometry/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace cueforge {

namespace {

TableState layout(Variant v, std::uint64_t seed)
{
    EnvConfig cfg;
    cfg.variant = v;
    return reset_state(cfg, seed);
}

nlohmann::ordered_json agent_json(const AgentConfig& a)
{
    nlohmann::ordered_json j;
    j["kind"] = agent_kind_name(a.kind);
    j["mirror"] = a.mirror;
    j["max_power"] = a.max_power;
    j["sigma_deg"] = a.sigma_deg;
    j["mirror_depth"] = a.plan.mirror_depth;
    j["cushion_multiplier"] = a.plan.cushion_multiplier;
    j["verify_budget"] = a.plan.verify_budget;
    if (a.kind == AgentKind::cem_learner) {
        j["policy"] = a.policy.w;
        j["masked"] = a.policy.masked;
    }
    if (a.kind == AgentKind::fixed)
        j["shot"] = {a.fixed_shot.alpha_index, a.fixed_shot.rho_index};
    return j;
}

void check_episodes(long episodes)
{
    if (episodes < 1)
        throw Error("episodes must be at least 1");
}

long count(const std::vector<char>& v) { return std::count(v.begin(), v.end(), 1); }

} // namespace

ExperimentReport run_success_rate(const AgentConfig& agent_cfg, Variant variant, long episodes, std::uint64_t seed)
{
    check_episodes(episodes);
    const Agent agent(agent_cfg);
    std::vector<char> ok(static_cast<std::size_t>(episodes), 0);
    parallel_for(ok.size(), [&](std::size_t i) {
        const TableState s = layout(variant, seed + i);
        const Shot shot = agent.act(s, mix_seed(seed, i));
        ok[i] = step_env(s, shot).verdict.success ? 1 : 0;
    });

    ExperimentReport r;
    r.experiment = "success";
    r.seed = seed;
    r.config["agent"] = agent_json(agent_cfg);
    r.config["variant"] = variant_name(variant);
    r.config["episodes"] = episodes;
    RateRow row;
    row.label = std::string(agent_kind_name(agent_cfg.kind)) + "/" + variant_name(variant);
    row.variant = variant_name(variant);
    row.mirror = agent_cfg.mirror;
    row.sigma_deg = agent_cfg.sigma_deg;
    row.n = episodes;
    row.successes = count(ok);
    r.rows.push_back(row);
    return r;
}

ExperimentReport run_full_turn(const AgentConfig& agent_cfg, long episodes, std::uint64_t seed, int cap)
{
    check_episodes(episodes);
    if (cap < 1)
        throw Error("shot cap must be at least 1");
    const Agent agent(agent_cfg);
    std::vector<char> ok(static_cast<std::size_t>(episodes), 0);
    std::vector<int> shots(ok.size(), 0), cleared(ok.size(), 0);
    parallel_for(ok.size(), [&](std::size_t i) {
        TableState s = layout(Variant::all_ball, seed + i);
        const int blues = s.live_blues();
        for (int k = 0; k < cap; ++k) {
            const Shot shot = agent.act(s, mix_seed(seed, i * 1024 + static_cast<std::size_t>(k)));
            const StepResult res = step_env(s, shot);
            ++shots[i];
            s = res.state;
            if (res.terminated) {
                ok[i] = res.verdict.win ? 1 : 0;
                break;
            }
        }
        cleared[i] = blues - s.live_blues();
    });

    ExperimentReport r;
    r.experiment = "fullturn";
    r.seed = seed;
    r.config["agent"] = agent_json(agent_cfg);
    r.config["variant"] = "allball";
    r.config["episodes"] = episodes;
    r.config["shot_cap"] = cap;
    RateRow row;
    row.label = std::string(agent_kind_name(agent_cfg.kind)) + (agent_cfg.mirror ? "/mirror" : "/direct");
    row.variant = "allball";
    row.mirror = agent_cfg.mirror;
    row.sigma_deg = agent_cfg.sigma_deg;
    row.n = episodes;
    row.successes = count(ok);
    r.rows.push_back(row);
    r.extra["mean_shots"] = std::accumulate(shots.begin(), shots.end(), 0.0) / static_cast<double>(episodes);
    r.extra["mean_blues_cleared"] = std::accumulate(cleared.begin(), cleared.end(), 0.0) / static_cast<double>(episodes);
    return r;
}

ExperimentReport run_noise_sweep(const std::vector<double>& sigmas, const std::vector<Variant>& variants,
                                 long episodes, std::uint64_t seed, bool mirror)
{
    check_episodes(episodes);
    if (sigmas.empty() || variants.empty())
        throw Error("noise sweep needs at least one sigma and one variant");
    for (double s : sigmas)
        if (!(s >= 0))
            throw Error("sigma must be non-negative");

    ExperimentReport r;
    r.experiment = "noise";
    r.seed = seed;
    r.config["sigmas_deg"] = sigmas;
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    for (Variant v : variants)
        vs.push_back(variant_name(v));
    r.config["variants"] = vs;
    r.config["episodes"] = episodes;
    r.config["mirror"] = mirror;
    r.config["aimed_shot"] = "oracle_best";

    for (Variant v : variants) {
        const std::size_t ns = sigmas.size();
        std::vector<char> ok(static_cast<std::size_t>(episodes) * ns, 0);
        parallel_for(static_cast<std::size_t>(episodes), [&](std::size_t i) {
            const TableState s = layout(v, seed + i);
            const auto best = best_shot(s, mirror);
            if (!best)
                return;
            std::mt19937_64 rng(mix_seed(seed, i));
            const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
            for (std::size_t k = 0; k < ns; ++k) {
                const Shot shot = with_angle_noise(best->shot, sigmas[k] * z);
                ok[i * ns + k] = step_env(s, shot).verdict.success ? 1 : 0;
            }
        });
        for (std::size_t k = 0; k < ns; ++k) {
            RateRow row;
            std::ostringstream label;
            label << variant_name(v) << "/sigma=" << sigmas[k];
            row.label = label.str();
            row.variant = variant_name(v);
            row.mirror = mirror;
            row.sigma_deg = sigmas[k];
            row.n = episodes;
            for (long i = 0; i < episodes; ++i)
                row.successes += ok[static_cast<std::size_t>(i) * ns + k];
            r.rows.push_back(row);
        }
        // discordant pairs between neighbouring sigmas, for paired tests
        nlohmann::ordered_json steps = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k + 1 < ns; ++k) {
            long gained = 0, lost = 0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(episodes); ++i) {
                gained += !ok[i * ns + k] && ok[i * ns + k + 1];
                lost += ok[i * ns + k] && !ok[i * ns + k + 1];
            }
            steps.push_back({{"from", sigmas[k]}, {"to", sigmas[k + 1]}, {"gained", gained}, {"lost", lost}});
        }
        r.extra["transitions"][variant_name(v)] = steps;
    }
    return r;
}

const char* shift_model_name(ShiftModel m)
{
    switch (m) {
    case ShiftModel::none: return "none";
    case ShiftModel::empirical_band: return "empirical_band";
    case ShiftModel::fixed_cm: return "fixed_cm";
    }
    return "?";
}

namespace {

// Moves ball `id` by d px in a random direction, retrying directions that
// leave the state invalid; returns false if no valid direction was found.
bool shift_ball(TableState& s, int id, double d, std::mt19937_64& rng)
{
    if (d == 0)
        return true;
    const TableGeometry& table = default_table();
    Ball* b = s.find(id);
    const Vec2 origin = b->pos;
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double a = angle(rng);
        b->pos = origin + d * Vec2{std::cos(a), std::sin(a)};
        try {
            validate_state(s, table);
            return true;
        } catch (const ValidationError&) {
        }
    }
    b->pos = origin;
    return false;
}

} // namespace

ExperimentReport run_shift_experiment(const ShiftConfig& shift, long episodes, std::uint64_t seed)
{
    check_episodes(episodes);
    std::vector<double> band_px;
    ExperimentReport r;
    r.experiment = "shift";
    r.seed = seed;
    r.config["variant"] = "2ball";
    r.config["episodes"] = episodes;
    r.config["model"] = shift_model_name(shift.model);
    r.config["cm_per_px"] = kCmPerPx;
    if (shift.model == ShiftModel::fixed_cm) {
        if (!(shift.fixed_cm >= 0))
            throw Error("shift distance must be non-negative");
        r.config["fixed_cm"] = shift.fixed_cm;
    } else if (shift.model == ShiftModel::empirical_band) {
        std::vector<double> band = shift.band_cm;
        if (band.empty())
            band = projection_error_experiment(100, 1.0, seed).band_cm();
        if (band.empty())
            throw Error("empirical shift band is empty");
        for (double cm : band)
            band_px.push_back(cm / kCmPerPx);
        r.extra["band_cm_min"] = *std::min_element(band.begin(), band.end());
        r.extra["band_cm_max"] = *std::max_element(band.begin(), band.end());
        r.extra["band_cm_mean"] = std::accumulate(band.begin(), band.end(), 0.0) / static_cast<double>(band.size());
        r.extra["band_size"] = band.size();
    }

    const auto n = static_cast<std::size_t>(episodes);
    // [mirror][shifted]
    std::vector<char> ok[2][2];
    for (auto& m : ok)
        for (auto& v : m)
            v.assign(n, 0);
    std::vector<char> kept(n, 0);
    parallel_for(n, [&](std::size_t i) {
        const TableState s = layout(Variant::two_ball, seed + i);
        std::mt19937_64 rng(mix_seed(seed, i));
        double d = 0;
        if (shift.model == ShiftModel::fixed_cm)
            d = shift.fixed_cm / kCmPerPx;
        else if (shift.model == ShiftModel::empirical_band)
            d = band_px[std::uniform_int_distribution<std::size_t>(0, band_px.size() - 1)(rng)];
        TableState moved = s;
        kept[i] = shift_ball(moved, kBlackId, d, rng) ? 0 : 1;
        for (int m = 0; m < 2; ++m) {
            const auto best = best_shot(s, m == 1);
            if (!best)
                continue;
            ok[m][0][i] = step_env(s, best->shot).verdict.success ? 1 : 0;
            ok[m][1][i] = step_env(moved, best->shot).verdict.success ? 1 : 0;
        }
    });
    for (int m = 0; m < 2; ++m)
        for (int sh = 0; sh < 2; ++sh) {
            RateRow row;
            row.label = std::string(m ? "mirror" : "direct") + (sh ? "/shifted" : "/baseline");
            row.variant = "2ball";
            row.mirror = m == 1;
            row.shift = sh ? shift_model_name(shift.model) : "none";
            row.n = episodes;
            row.successes = count(ok[m][sh]);
            r.rows.push_back(row);
        }
    r.extra["unshiftable_layouts"] = count(kept);
    return r;
}

double ViewClassShift::mean_cm() const
{
    if (scene_shift_cm.empty())
        return INFINITY;
    return std::accumulate(scene_shift_cm.begin(), scene_shift_cm.end(), 0.0) /
           static_cast<double>(scene_shift_cm.size());
}

std::vector<double> ProjectionErrorResult::band_cm() const
{
    std::vector<double> all;
    for (const auto& v : views)
        all.insert(all.end(), v.scene_shift_cm.begin(), v.scene_shift_cm.end());
    return all;
}

double ProjectionErrorResult::mean_cm() const
{
    const auto all = band_cm();
    if (all.empty())
        return INFINITY;
    return std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
}

double ProjectionErrorResult::best_view_mean_cm() const
{
    double best = INFINITY;
    for (const auto& v : views)
        best = std::min(best, v.mean_cm());
    return best;
}

namespace {

std::map<int, Vec2> locate_by_id(const SyntheticScene& scene)
{
    const LocateResult r = locate(scene.detections);
    std::map<int, Vec2> out;
    for (const auto& b : r.balls)
        out[scene.label[static_cast<std::size_t>(b.detection)]] = b.position;
    return out;
}

} // namespace

ProjectionErrorResult projection_error_experiment(int scenes, double sigma_px, std::uint64_t seed, int width,
                                                  int height)
{
    if (scenes < 1)
        throw Error("need at least one scene");
    struct SceneOut
    {
        double noiseless_max = 0;
        bool noiseless_failed = false;
        double shift[2] = {NAN, NAN};
    };
    std::vector<SceneOut> out(static_cast<std::size_t>(scenes));

    parallel_for(out.size(), [&](std::size_t i) {
        const TableState st = layout(Variant::all_ball, seed + i);
        std::mt19937_64 rng(mix_seed(seed, i));
        std::uniform_real_distribution<double> jitter(-1, 1);
        std::vector<CameraView> views{top_down_view(width, height)};
        for (double zenith : {45.0, 65.0}) {
            CameraView v = pinhole_view(zenith + 5 * jitter(rng), 90 + 15 * jitter(rng));
            v.width = width;
            v.height = height;
            views.push_back(v);
        }
        std::vector<std::map<int, Vec2>> noisy(views.size());
        std::vector<bool> failed(views.size(), false);
        for (std::size_t v = 0; v < views.size(); ++v) {
            const std::uint64_t scene_seed = mix_seed(seed ^ 0x5eedULL, i * 8 + v);
            try {
                const SyntheticScene clean = make_synthetic_scene(views[v], st, 0, scene_seed);
                for (const auto& [id, p] : locate_by_id(clean))
                    out[i].noiseless_max = std::max(out[i].noiseless_max, distance(p, st.find(id)->pos));
            } catch (const Error&) {
                out[i].noiseless_failed = true;
            }
            try {
                noisy[v] = locate_by_id(make_synthetic_scene(views[v], st, sigma_px, scene_seed));
            } catch (const Error&) {
                failed[v] = true;
            }
        }
        for (std::size_t v = 1; v < views.size(); ++v) {
            if (failed[0] || failed[v])
                continue;
            double sum = 0;
            int k = 0;
            for (const auto& [id, p] : noisy[0]) {
                const auto it = noisy[v].find(id);
                if (it == noisy[v].end())
                    continue;
                sum += distance(p, it->second);
                ++k;
            }
            if (k > 0)
                out[i].shift[v - 1] = sum / k * kCmPerPx;
        }
    });

    ProjectionErrorResult res;
    res.views = {{"45deg", {}, 0}, {"near_front", {}, 0}};
    for (const auto& o : out) {
        res.noiseless_max_px = std::max(res.noiseless_max_px, o.noiseless_max);
        res.noiseless_failures += o.noiseless_failed;
        for (int v = 0; v < 2; ++v) {
            if (std::isnan(o.shift[v]))
                ++res.views[static_cast<std::size_t>(v)].failures;
            else
                res.views[static_cast<std::size_t>(v)].scene_shift_cm.push_back(o.shift[v]);
        }
    }
    return res;
}

} // namespace cueforge
