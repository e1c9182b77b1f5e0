#include "cueforge/bench/cem.hpp"
#include "cueforge/bench/experiments.hpp"
#include "cueforge/common/errors.hpp"
#include "cueforge/geometry/template.hpp"
#include "cueforge/service/api.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace cueforge;

namespace {

constexpr int kPipelineFailure = 2;

std::string read_input(const std::string& path)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << text << '\n';
}

bool on_off(const std::string& v) { return v == "on"; }

Json parse_json(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

LocateResult run_locate(const std::string& path, std::uint64_t seed)
{
    LocateOptions opt;
    opt.seed = seed;
    return locate(parse_detections(read_input(path)), default_template(), opt);
}

struct BenchArgs
{
    std::string experiment;
    std::string variant;
    long episodes = 1000;
    std::uint64_t seed = 0;
    std::string mirror;
    std::string agent = "oracle_best";
    double sigma = 0;
    std::vector<double> sigmas;
    std::string shift_model = "empirical";
    double shift_cm = 2.5;
    int iterations = 200;
    int population = 16;
    std::string masked = "on";
    int shot_cap = 50;
    std::string out;
    std::string csv;
};

Variant variant_arg(const std::string& name)
{
    const auto v = variant_from_name(name);
    if (!v)
        throw Error("unknown variant " + name);
    return *v;
}

ExperimentReport run_bench(const BenchArgs& a)
{
    const auto mirror_or = [&](bool fallback) { return a.mirror.empty() ? fallback : on_off(a.mirror); };
    AgentConfig agent;
    agent.kind = *agent_kind_from_name(a.agent);
    agent.mirror = mirror_or(true);
    agent.sigma_deg = a.sigma;

    if (a.experiment == "success")
        return run_success_rate(agent, variant_arg(a.variant.empty() ? "2ball" : a.variant), a.episodes, a.seed);
    if (a.experiment == "fullturn")
        return run_full_turn(agent, a.episodes, a.seed, a.shot_cap);
    if (a.experiment == "noise") {
        std::vector<Variant> variants{Variant::one_ball, Variant::two_ball};
        if (!a.variant.empty())
            variants = {variant_arg(a.variant)};
        return run_noise_sweep(a.sigmas.empty() ? default_noise_sigmas() : a.sigmas, variants, a.episodes, a.seed,
                               mirror_or(false));
    }
    if (a.experiment == "shift") {
        ShiftConfig s;
        s.model = a.shift_model == "fixed" ? ShiftModel::fixed_cm : ShiftModel::empirical_band;
        s.fixed_cm = a.shift_cm;
        return run_shift_experiment(s, a.episodes, a.seed);
    }
    CemConfig c;
    c.variant = variant_arg(a.variant.empty() ? "1ball" : a.variant);
    c.iterations = a.iterations;
    c.population = a.population;
    c.masked = on_off(a.masked);
    c.mirror = mirror_or(false);
    return run_cem_experiment(c, a.episodes, a.seed);
}

HttpService* g_service = nullptr;

void on_signal(int)
{
    if (g_service)
        g_service->stop();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pool shot planning, table localization and benchmarks"};
    app.require_subcommand(1);

    auto* loc = app.add_subcommand("locate", "Detections JSON to table positions");
    std::string loc_in, loc_out;
    std::uint64_t loc_seed = 0;
    loc->add_option("--detections", loc_in, "Detection file ('-' for stdin)")->required();
    loc->add_option("--out", loc_out, "Output file (default stdout)");
    loc->add_option("--seed", loc_seed, "RANSAC seed");

    auto* sug = app.add_subcommand("suggest", "Best shot for a state or a detection file");
    std::string sug_state, sug_det, sug_mirror = "on", sug_out;
    std::uint64_t sug_seed = 0;
    auto* opt_state = sug->add_option("--state", sug_state, "Table state JSON");
    auto* opt_det = sug->add_option("--detections", sug_det, "Detection JSON, located first");
    opt_state->excludes(opt_det);
    opt_det->excludes(opt_state);
    sug->add_option("--mirror", sug_mirror, "Include cushion shots")->check(CLI::IsMember({"on", "off"}));
    sug->add_option("--out", sug_out, "Output file (default stdout)");
    sug->add_option("--seed", sug_seed, "RANSAC seed for --detections");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    ServiceConfig svc_flags;
    auto* o_host = serve->add_option("--host", svc_flags.host, "Bind address");
    auto* o_port = serve->add_option("--port", svc_flags.port, "Port (0 picks a free one)");
    auto* o_data = serve->add_option("--data-dir", svc_flags.data_dir, "Session log directory");
    auto* o_ui = serve->add_option("--ui-dir", svc_flags.ui_dir, "Static UI bundle");
    auto* o_seed = serve->add_option("--seed", svc_flags.seed, "Seed for ids and RANSAC");

    auto* tmpl = app.add_subcommand("template", "Print the table template JSON");
    std::string tmpl_out;
    tmpl->add_option("--out", tmpl_out, "Output file (default stdout)");

    auto* bench = app.add_subcommand("bench", "Benchmarks");
    bench->require_subcommand(1);
    auto* run = bench->add_subcommand("run", "Run one experiment and write its report");
    BenchArgs b;
    run->add_option("--experiment", b.experiment)
        ->required()
        ->check(CLI::IsMember({"success", "fullturn", "noise", "shift", "cem"}));
    run->add_option("--variant", b.variant)->check(CLI::IsMember({"1ball", "2ball", "allball"}));
    run->add_option("--episodes", b.episodes)->check(CLI::PositiveNumber);
    run->add_option("--seed", b.seed);
    run->add_option("--mirror", b.mirror)->check(CLI::IsMember({"on", "off"}));
    run->add_option("--agent", b.agent)
        ->check(CLI::IsMember({"random", "masked_random", "oracle_rand_angle", "oracle_best"}));
    run->add_option("--sigma", b.sigma, "Angular noise for the agent (deg)");
    run->add_option("--sigmas", b.sigmas, "Noise sweep points (deg)");
    run->add_option("--shift-model", b.shift_model)->check(CLI::IsMember({"empirical", "fixed"}));
    run->add_option("--shift-cm", b.shift_cm);
    run->add_option("--iterations", b.iterations, "CEM iterations");
    run->add_option("--population", b.population, "CEM population");
    run->add_option("--masked", b.masked)->check(CLI::IsMember({"on", "off"}));
    run->add_option("--shot-cap", b.shot_cap, "Full-turn shot cap");
    run->add_option("--out", b.out, "Report JSON (default stdout)");
    run->add_option("--csv", b.csv, "Also write rows as CSV");

    CLI11_PARSE(app, argc, argv);
    if (*sug && sug_state.empty() && sug_det.empty()) {
        std::cerr << "suggest needs --state or --detections\n";
        return kPipelineFailure;
    }

    try {
        if (*loc) {
            write_output(loc_out, locate_to_json(run_locate(loc_in, loc_seed)).dump(2));
        } else if (*sug) {
            TableState state;
            if (!sug_state.empty()) {
                state = state_from_json(parse_json(read_input(sug_state)));
                validate_state(state, default_table());
            } else {
                state = located_state(run_locate(sug_det, sug_seed), default_table());
            }
            Json out;
            out["state"] = state_to_json(state);
            out.update(suggest_json(state, on_off(sug_mirror)));
            write_output(sug_out, out.dump(2));
        } else if (*serve) {
            ServiceConfig cfg = config_from_env();
            if (*o_host)
                cfg.host = svc_flags.host;
            if (*o_port)
                cfg.port = svc_flags.port;
            if (*o_data)
                cfg.data_dir = svc_flags.data_dir;
            if (*o_ui)
                cfg.ui_dir = svc_flags.ui_dir;
            if (*o_seed)
                cfg.seed = svc_flags.seed;
            HttpService svc(cfg);
            for (const auto& w : svc.store().load_warnings())
                std::cerr << "warning: " << w << '\n';
            const int port = svc.bind();
            std::cerr << "listening on http://" << cfg.host << ':' << port << '\n';
            g_service = &svc;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            svc.listen();
            g_service = nullptr;
        } else if (*tmpl) {
            write_output(tmpl_out, template_to_json(default_template()));
        } else if (*run) {
            const ExperimentReport r = run_bench(b);
            write_output(b.out, report_to_json(r));
            if (!b.csv.empty()) {
                std::ofstream csv(b.csv, std::ios::binary);
                if (!csv)
                    throw Error("cannot write " + b.csv);
                csv << report_to_csv(r);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << error_json(e).dump() << '\n';
        return kPipelineFailure;
    }
    return 0;
}
