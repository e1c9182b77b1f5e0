#include "cueforge/bench/cem.hpp"

#include "cueforge/bench/experiments.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/common/parallel.hpp"
#include "cueforge/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cueforge {

namespace {

constexpr std::array<double, CemPolicy::kDims> kInitMean{0, 0, 0, 0, 0, 0.7, 0};
constexpr std::array<double, CemPolicy::kDims> kInitStd{1, 1, 1, 1, 2, 1, 1};
constexpr double kStdFloor = 0.02;

struct Layout
{
    TableState state;
    std::vector<ScoredShot> scored;
    double z = 0;
};

} // namespace

TrainResult train_cem(const CemConfig& cfg, std::uint64_t seed)
{
    if (cfg.population < 8)
        throw Error("CEM needs a population of at least 8");
    if (cfg.iterations < 1 || cfg.batch < 1 || !(cfg.elite_fraction > 0 && cfg.elite_fraction <= 1))
        throw Error("CEM needs iterations >= 1, batch >= 1 and elite fraction in (0, 1]");
    const int elites = std::max(2, static_cast<int>(std::ceil(cfg.elite_fraction * cfg.population)));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto mean = kInitMean;
    auto sd = kInitStd;

    TrainResult out;
    EnvConfig env;
    env.variant = cfg.variant;
    int barren = 0;

    for (int it = 0; it < cfg.iterations; ++it) {
        std::vector<Layout> batch(static_cast<std::size_t>(cfg.batch));
        for (std::size_t j = 0; j < batch.size(); ++j) {
            batch[j].state = reset_state(env, mix_seed(seed, static_cast<std::uint64_t>(it) * 4096 + j));
            batch[j].z = normal(rng);
        }
        if (cfg.masked)
            parallel_for(batch.size(), [&](std::size_t j) {
                batch[j].scored = ranked_shots(batch[j].state, cfg.mirror);
            });

        std::vector<CemPolicy> pop(static_cast<std::size_t>(cfg.population));
        for (auto& p : pop) {
            p.masked = cfg.masked;
            for (int d = 0; d < CemPolicy::kDims; ++d)
                p.w[static_cast<std::size_t>(d)] = mean[static_cast<std::size_t>(d)] + sd[static_cast<std::size_t>(d)] * normal(rng);
        }

        std::vector<int> wins(pop.size(), 0);
        std::vector<double> fitness(pop.size(), 0);
        parallel_for(pop.size(), [&](std::size_t c) {
            double reward = 0;
            for (const Layout& l : batch) {
                const StepResult res = step_env(l.state, cem_action(pop[c], l.state, l.scored, l.z));
                wins[c] += res.verdict.success;
                reward += res.reward.normalized;
            }
            // success count first, shaped reward only breaks ties
            fitness[c] = wins[c] + 1e-3 * reward / static_cast<double>(batch.size());
        });

        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

        int elite_wins = 0;
        for (int e = 0; e < elites; ++e)
            elite_wins += wins[order[static_cast<std::size_t>(e)]];
        out.elite_success.push_back(static_cast<double>(elite_wins) / (elites * cfg.batch));
        out.mean_success.push_back(std::accumulate(wins.begin(), wins.end(), 0.0) / (cfg.population * cfg.batch));
        out.iterations = it + 1;

        const double horizon = cfg.noise_until * cfg.iterations;
        const double extra = horizon > 0 ? cfg.extra_noise * std::max(0.0, 1.0 - (it + 1) / horizon) : 0.0;
        for (std::size_t d = 0; d < CemPolicy::kDims; ++d) {
            double m = 0;
            for (int e = 0; e < elites; ++e)
                m += pop[order[static_cast<std::size_t>(e)]].w[d];
            m /= elites;
            double v = 0;
            for (int e = 0; e < elites; ++e) {
                const double x = pop[order[static_cast<std::size_t>(e)]].w[d] - m;
                v += x * x;
            }
            mean[d] = m;
            sd[d] = std::max(kStdFloor, std::sqrt(v / elites + extra));
        }

        barren = elite_wins == 0 ? barren + 1 : 0;
        if (barren >= cfg.patience) {
            out.status = TrainStatus::diverged;
            break;
        }
    }
    out.policy.w = mean;
    out.policy.masked = cfg.masked;
    return out;
}

AgentConfig cem_agent(const TrainResult& r, const CemConfig& cfg)
{
    AgentConfig a;
    a.kind = AgentKind::cem_learner;
    a.mirror = cfg.mirror;
    a.policy = r.policy;
    return a;
}

ExperimentReport training_report(const TrainResult& r, const CemConfig& cfg, std::uint64_t seed)
{
    ExperimentReport rep;
    rep.experiment = "cem";
    rep.seed = seed;
    rep.config["variant"] = variant_name(cfg.variant);
    rep.config["iterations"] = cfg.iterations;
    rep.config["population"] = cfg.population;
    rep.config["elite_fraction"] = cfg.elite_fraction;
    rep.config["batch"] = cfg.batch;
    rep.config["masked"] = cfg.masked;
    rep.config["mirror"] = cfg.mirror;
    rep.config["patience"] = cfg.patience;
    rep.config["extra_noise"] = cfg.extra_noise;
    rep.config["noise_until"] = cfg.noise_until;
    rep.extra["status"] = r.status == TrainStatus::completed ? "completed" : "diverged";
    rep.extra["iterations_run"] = r.iterations;
    rep.extra["policy"] = r.policy.w;
    rep.extra["elite_success"] = r.elite_success;
    rep.extra["mean_success"] = r.mean_success;
    return rep;
}

ExperimentReport run_cem_experiment(const CemConfig& cfg, long eval_episodes, std::uint64_t seed)
{
    const TrainResult trained = train_cem(cfg, seed);
    ExperimentReport rep = training_report(trained, cfg, seed);
    rep.config["eval_episodes"] = eval_episodes;
    ExperimentReport eval = run_success_rate(cem_agent(trained, cfg), cfg.variant, eval_episodes, cem_eval_seed(seed));
    RateRow row = eval.rows.at(0);
    row.label = "cem/eval";
    rep.rows.push_back(row);
    return rep;
}

} // namespace cueforge
