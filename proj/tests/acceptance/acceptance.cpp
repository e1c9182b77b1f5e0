// Runs every primary acceptance criterion at full size and prints one
// PASS/FAIL line each. Exit status is the number of failures.
//   acceptance [--only NAME] [--reports DIR]

#include "cueforge/bench/cem.hpp"
#include "cueforge/bench/experiments.hpp"
#include "cueforge/common/parallel.hpp"
#include "cueforge/env/env.hpp"
#include "cueforge/geometry/synthetic.hpp"
#include "cueforge/ingest/ingest.hpp"
#include "cueforge/physics/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cueforge;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::filesystem::path g_reports;

void keep(const std::string& name, const ExperimentReport& r)
{
    if (g_reports.empty())
        return;
    std::filesystem::create_directories(g_reports);
    std::ofstream(g_reports / (name + ".json")) << report_to_json(r) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

AgentConfig oracle(bool mirror)
{
    AgentConfig a;
    a.kind = AgentKind::oracle_best;
    a.mirror = mirror;
    return a;
}

double kinetic(Vec2 a, Vec2 b = {}) { return dot(a, a) + dot(b, b); }

Outcome physics_conservation()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Simulator sim;
    const double r = sim.table().ball_radius;
    long contacts = 0, cushions = 0, energy_bad = 0, momentum_bad = 0, overlaps = 0;
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> angle(0, 360), power(0.3, 1.0);
    EnvConfig cfg;
    cfg.variant = Variant::all_ball;
    for (std::uint64_t layout = 0; contacts + cushions < 100000; ++layout) {
        TableState s = reset_state(cfg, kSeed + layout);
        s.find(kCueId)->vel = shot_direction(angle(rng)) * (sim.params().v_max * power(rng));
        std::vector<Event> events;
        // the first 2 s hold nearly all contacts; the slow tail adds steps, not collisions
        double t = 0;
        while (!s.at_rest() && t < 2.0) {
            sim.step(s, sim.params().dt, &events, t);
            t += sim.params().dt;
            for (std::size_t i = 0; i < s.balls.size(); ++i)
                for (std::size_t j = i + 1; j < s.balls.size(); ++j)
                    if (s.balls[i].live() && s.balls[j].live() &&
                        distance(s.balls[i].pos, s.balls[j].pos) < 2 * r - 1e-9)
                        ++overlaps;
        }
        for (const auto& e : events) {
            if (e.kind == EventKind::ball_hit) {
                ++contacts;
                const double before = kinetic(e.velocity_before, e.other_velocity_before);
                if (std::abs(kinetic(e.velocity, e.other_velocity) - before) > 1e-9 * before)
                    ++energy_bad;
                const Vec2 pb = e.velocity_before + e.other_velocity_before, pa = e.velocity + e.other_velocity;
                if ((pa - pb).norm() > 1e-9 * pb.norm() + 1e-12 * (e.velocity_before.norm() + e.other_velocity_before.norm()))
                    ++momentum_bad;
            } else if (e.kind == EventKind::cushion_hit) {
                ++cushions;
                const double before = kinetic(e.velocity_before);
                if (std::abs(kinetic(e.velocity) - before) > 1e-9 * before)
                    ++energy_bad;
            }
        }
    }
    const double secs = seconds_since(t0);
    return {energy_bad == 0 && momentum_bad == 0 && overlaps == 0 && secs < 10,
            fmt("%ld ball-ball + %ld cushion collisions; energy violations %ld, momentum violations %ld, "
                "interpenetrations %ld; %.1f s (limit 10 s)",
                contacts, cushions, energy_bad, momentum_bad, overlaps, secs)};
}

Outcome geometry_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ProjectionErrorResult r = projection_error_experiment(100, 1.0, kSeed);
    const double secs = seconds_since(t0);
    long failures = r.noiseless_failures;
    std::string views;
    for (const auto& v : r.views) {
        failures += v.failures;
        views += fmt(" %s %.3f cm;", v.name.c_str(), v.mean_cm());
    }
    const bool pass = r.noiseless_max_px <= 1e-3 && failures == 0 && r.mean_cm() <= 0.8 &&
                      r.best_view_mean_cm() <= 0.45 && secs < 30;
    return {pass, fmt("noiseless max error %.2e px (limit 1e-3); mean shift %.3f cm (limit 0.8), best view %.3f cm "
                      "(limit 0.45);%s failed scenes %ld; %.1f s (limit 30 s)",
                      r.noiseless_max_px, r.mean_cm(), r.best_view_mean_cm(), views.c_str(), failures, secs)};
}

Outcome ghost_ball()
{
    const auto direct = run_success_rate(oracle(false), Variant::two_ball, 1000, kSeed);
    const auto mirror = run_success_rate(oracle(true), Variant::two_ball, 1000, kSeed);
    keep("twoball_direct", direct);
    keep("twoball_mirror", mirror);
    const double d = direct.rows[0].rate(), m = mirror.rows[0].rate();
    return {d >= 0.85 && m >= d, fmt("2-ball oracle direct %.3f (limit >= 0.85), mirror %.3f (>= direct), n=1000", d, m)};
}

Outcome all_ball()
{
    const auto shot = run_success_rate(oracle(true), Variant::all_ball, 1000, kSeed);
    const auto turn_m = run_full_turn(oracle(true), 500, kSeed);
    const auto turn_d = run_full_turn(oracle(false), 500, kSeed);
    keep("allball_shot", shot);
    keep("fullturn_mirror", turn_m);
    keep("fullturn_direct", turn_d);
    const double s = shot.rows[0].rate(), fm = turn_m.rows[0].rate(), fd = turn_d.rows[0].rate();
    return {s >= 0.85 && fm >= 0.15 && fd < fm,
            fmt("per-shot mirror %.3f (limit >= 0.85, n=1000); full turn mirror %.3f (limit >= 0.15), direct %.3f "
                "(< mirror), n=500",
                s, fm, fd)};
}

Outcome noise_sweep()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> sigmas = default_noise_sigmas();
    const long n = 2000;
    const auto r = run_noise_sweep(sigmas, {Variant::one_ball, Variant::two_ball}, n, kSeed);
    const double secs = seconds_since(t0);
    keep("noise", r);

    const auto rate = [&](const char* v, double sigma) {
        std::ostringstream label;
        label << v << "/sigma=" << sigma;
        return r.at(label.str()).rate();
    };
    std::vector<std::string> bad;
    double low_min = 1;
    for (double s : sigmas)
        if (s <= 0.25)
            low_min = std::min(low_min, rate("1ball", s));
    if (low_min < 0.99)
        bad.push_back(fmt("1ball min over sigma<=0.25 is %.4f < 0.99", low_min));
    const double at3 = rate("1ball", 3);
    if (at3 > 0.6)
        bad.push_back(fmt("1ball at sigma=3 is %.4f > 0.6", at3));
    const double ratio = rate("2ball", 0.25) / rate("2ball", 0);
    if (ratio > 0.7)
        bad.push_back(fmt("2ball ratio %.3f > 0.7", ratio));

    // paired test on each neighbouring pair: an increase must not be significant
    int increases = 0;
    for (const char* v : {"1ball", "2ball"})
        for (const auto& step : r.extra["transitions"][v]) {
            const double b = step["gained"].get<double>(), c = step["lost"].get<double>();
            const double diff = (b - c) / static_cast<double>(n);
            const double se = std::sqrt(std::max(0.0, b + c - (b - c) * (b - c) / static_cast<double>(n))) / static_cast<double>(n);
            if (diff > 0 && diff > 1.96 * se) {
                ++increases;
                bad.push_back(fmt("%s rises significantly from sigma=%g to %g", v, step["from"].get<double>(),
                                  step["to"].get<double>()));
            }
        }
    if (secs >= 300)
        bad.push_back(fmt("runtime %.0f s >= 300 s", secs));

    std::string detail = fmt("1ball sigma<=0.25 min %.4f, sigma=3 %.4f; 2ball sigma=0 %.4f, 0.25 %.4f (ratio %.3f); "
                             "significant increases %d; n=%ld/point; %.1f s",
                             low_min, at3, rate("2ball", 0), rate("2ball", 0.25), ratio, increases, n, secs);
    for (const auto& b : bad)
        detail += "; FAILED: " + b;
    return {bad.empty(), detail};
}

Outcome shift_robustness()
{
    ShiftConfig emp;
    emp.model = ShiftModel::empirical_band;
    ShiftConfig fixed;
    fixed.model = ShiftModel::fixed_cm;
    fixed.fixed_cm = 2.5;
    const auto a = run_shift_experiment(emp, 1000, kSeed);
    const auto b = run_shift_experiment(fixed, 1000, kSeed);
    keep("shift_empirical", a);
    keep("shift_fixed", b);
    const double base = a.at("direct/baseline").rate(), emp_rate = a.at("direct/shifted").rate();
    const double fixed_base = b.at("direct/baseline").rate(), fixed_rate = b.at("direct/shifted").rate();
    return {base - emp_rate >= 0.10 && fixed_rate < 0.5 * fixed_base,
            fmt("direct %.3f -> %.3f under empirical band (drop %.1f pp, limit >= 10; band mean %.3f cm); "
                "-> %.3f under 2.5 cm (limit < %.3f); mirror %.3f -> %.3f / %.3f",
                base, emp_rate, 100 * (base - emp_rate), a.extra["band_cm_mean"].get<double>(), fixed_rate,
                0.5 * fixed_base, a.at("mirror/baseline").rate(), a.at("mirror/shifted").rate(),
                b.at("mirror/shifted").rate())};
}

Outcome ingest_corpus()
{
    long raw_total = 0, raw_true = 0, kept_total = 0, kept_true = 0;
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> zenith(0, 60), azimuth(60, 120);
    EnvConfig cfg;
    cfg.variant = Variant::all_ball;
    for (int i = 0; i < 500; ++i) {
        const TableState st = reset_state(cfg, kSeed + static_cast<std::uint64_t>(i));
        const double z = zenith(rng), az = azimuth(rng);
        const CameraView view = z < 5 ? top_down_view(640, 640) : pinhole_view(z, az);
        SyntheticScene scene = make_synthetic_scene(view, st, 1.0, mix_seed(kSeed, static_cast<std::uint64_t>(i)));
        const std::vector<int> genuine = add_overdetections(scene.detections, mix_seed(kSeed ^ 1, static_cast<std::uint64_t>(i)));
        const auto is_genuine = [&](const Detection& d) {
            for (int g : genuine) {
                const Detection& x = scene.detections.detections[static_cast<std::size_t>(g)];
                if (x.box.x == d.box.x && x.box.y == d.box.y && x.box.w == d.box.w && x.box.h == d.box.h &&
                    x.cls == d.cls && x.conf == d.conf)
                    return true;
            }
            return false;
        };
        raw_total += static_cast<long>(scene.detections.detections.size());
        raw_true += static_cast<long>(genuine.size());
        for (const auto& d : postprocess(scene.detections).detections) {
            ++kept_total;
            kept_true += is_genuine(d);
        }
    }
    const double p_raw = static_cast<double>(raw_true) / static_cast<double>(raw_total);
    const double p_post = static_cast<double>(kept_true) / static_cast<double>(kept_total);
    const double recall_post = static_cast<double>(kept_true) / static_cast<double>(raw_true);
    const double drop_pp = 100 * (1 - recall_post);
    return {p_post > p_raw && drop_pp <= 2,
            fmt("precision %.4f -> %.4f; recall 1.0000 -> %.4f (drop %.2f pp, limit 2); %ld raw boxes, %ld genuine",
                p_raw, p_post, recall_post, drop_pp, raw_total, raw_true)};
}

Outcome determinism()
{
    std::vector<std::pair<std::string, std::function<ExperimentReport()>>> runs{
        {"success", [] { return run_success_rate(oracle(true), Variant::all_ball, 200, 5); }},
        {"fullturn", [] { return run_full_turn(oracle(false), 30, 5); }},
        {"noise", [] { return run_noise_sweep(default_noise_sigmas(), {Variant::one_ball, Variant::two_ball}, 200, 5); }},
        {"shift", [] { return run_shift_experiment(ShiftConfig{}, 200, 5); }},
        {"cem", [] {
             CemConfig c;
             c.iterations = 20;
             return run_cem_experiment(c, 200, 5);
         }},
    };
    std::string differing;
    for (const auto& [name, fn] : runs)
        if (report_to_json(fn()) != report_to_json(fn()))
            differing += " " + name;
    return {differing.empty(), differing.empty() ? "success, fullturn, noise, shift, cem reports byte-identical across two runs"
                                                 : "differing:" + differing};
}

Outcome cem_sanity()
{
    CemConfig one;
    const auto a = run_cem_experiment(one, 1000, kSeed);
    keep("cem_1ball", a);

    CemConfig masked;
    masked.variant = Variant::two_ball;
    CemConfig unmasked = masked;
    unmasked.masked = false;
    const auto m = run_cem_experiment(masked, 2000, kSeed);
    const auto u = run_cem_experiment(unmasked, 2000, kSeed);
    keep("cem_2ball_masked", m);
    keep("cem_2ball_unmasked", u);
    const double r1 = a.at("cem/eval").rate(), rm = m.at("cem/eval").rate(), ru = u.at("cem/eval").rate();
    return {r1 >= 0.9 && rm >= ru,
            fmt("1-ball masked CEM %.3f after %d iterations (limit >= 0.9); 2-ball masked %.4f vs unmasked %.4f on "
                "2000 paired layouts",
                r1, a.extra["iterations_run"].get<int>(), rm, ru)};
}

} // namespace

int main(int argc, char** argv)
{
    std::string only;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--only")
            only = argv[i + 1];
        else if (flag == "--reports")
            g_reports = argv[i + 1];
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"physics_conservation", physics_conservation},
        {"geometry_oracle", geometry_oracle},
        {"ghost_ball_soundness", ghost_ball},
        {"all_ball", all_ball},
        {"noise_sweep_shape", noise_sweep},
        {"shift_robustness", shift_robustness},
        {"ingest_overdetection", ingest_corpus},
        {"determinism", determinism},
        {"cem_sanity", cem_sanity},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && only != name)
            continue;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
