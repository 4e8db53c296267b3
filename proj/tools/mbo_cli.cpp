#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>

#include "mbo/episode.hpp"
#include "mbo/experiment.hpp"
#include "mbo/mlp.hpp"
#include "mbo/policies.hpp"
#include "mbo/qlearn.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

// Trains one episode (the seed of point 0 / run 0, so its metrics match that
// run of the full experiment), optionally warm-starting from checkpoints, and
// optionally saving the learners afterwards. One file per miner:
// qtable_miner<n>.json or dqn_miner<n>.json.
int checkpoint_episode(const mbo::ExperimentSpec& spec, const std::string& load_dir,
                       const std::string& save_dir) {
    using namespace mbo;
    if (spec.policies.size() != 1 ||
        (spec.policies[0] != PolicyKind::RLO && spec.policies[0] != PolicyKind::DRLO))
        throw std::runtime_error("--save-policy/--load-policy need a single rlo or drlo policy");
    const std::vector<SweepPoint> points = spec.points();
    if (points.size() != 1)
        throw std::runtime_error("--save-policy/--load-policy need a single sweep point");
    const PolicyKind kind = spec.policies[0];
    const SimConfig cfg = points[0].resolve(spec.base, !spec.task_mean_kb_axis.empty());
    const std::uint64_t seed = derive_seed(cfg.rng_seed, 0, 0);
    const EpsilonSchedule schedule{cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_slots};
    Environment env(cfg);
    EpisodeMetrics metrics;

    namespace fs = std::filesystem;
    if (kind == PolicyKind::RLO) {
        std::vector<QTable> tables(static_cast<std::size_t>(cfg.num_miners),
                                   QTable(num_states(cfg), num_actions(cfg.num_tasks)));
        if (!load_dir.empty())
            for (int n = 0; n < cfg.num_miners; ++n)
                tables[static_cast<std::size_t>(n)] = QTable::from_json(
                    slurp(fs::path(load_dir) / ("qtable_miner" + std::to_string(n) + ".json")));
        metrics = rlo_episode(env, tables, schedule, seed);
        if (!save_dir.empty()) {
            fs::create_directories(save_dir);
            for (int n = 0; n < cfg.num_miners; ++n)
                spit(fs::path(save_dir) / ("qtable_miner" + std::to_string(n) + ".json"),
                     tables[static_cast<std::size_t>(n)].to_json());
        }
    } else {
        std::vector<DqnAgent> agents;
        agents.reserve(static_cast<std::size_t>(cfg.num_miners));
        for (int n = 0; n < cfg.num_miners; ++n)
            agents.emplace_back(cfg, derive_seed(seed, 0x6471u, static_cast<std::uint64_t>(n)));
        if (!load_dir.empty())
            for (int n = 0; n < cfg.num_miners; ++n)
                agents[static_cast<std::size_t>(n)].restore(
                    slurp(fs::path(load_dir) / ("dqn_miner" + std::to_string(n) + ".json")));
        metrics = drlo_episode(env, agents, schedule, seed);
        if (!save_dir.empty()) {
            fs::create_directories(save_dir);
            for (int n = 0; n < cfg.num_miners; ++n)
                spit(fs::path(save_dir) / ("dqn_miner" + std::to_string(n) + ".json"),
                     agents[static_cast<std::size_t>(n)].checkpoint());
        }
    }
    std::cout << "episode mean reward: " << mean(metrics.reward) << '\n';
    if (!save_dir.empty()) std::cout << "saved policy to " << save_dir << '\n';
    return 0;
}

int selftest() {
    using namespace mbo;
    // Gradient check on a mid-sized net.
    Rng rng(7);
    Mlp net({5, 32, 16, 4}, OutputActivation::Identity, rng);
    Eigen::VectorXd x(5), target(4);
    for (int i = 0; i < 5; ++i) x(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 4; ++i) target(i) = rng.uniform(-1.0, 1.0);
    const double err = grad_check(net, x, target);
    std::cout << "gradient check max relative error: " << err << '\n';
    if (err >= 1e-4) return 1;

    // Tiny end-to-end experiment, run twice, byte-identical aggregates.
    ExperimentSpec spec;
    spec.base.total_slots = 50;
    spec.base.dqn_batch_size = 16;
    spec.policies = {PolicyKind::NO, PolicyKind::RLO};
    spec.runs_per_point = 2;
    spec.write_series = false;
    auto row = [](const std::vector<PointAggregate>& aggs) {
        std::string s;
        for (const auto& a : aggs) s += format_double(a.mean.reward_mean) + ";";
        return s;
    };
    spec.out_dir = "selftest_a";
    const std::string a = row(run_experiment(spec));
    spec.out_dir = "selftest_b";
    const std::string b = row(run_experiment(spec));
    std::cout << "determinism check: " << (a == b ? "ok" : "MISMATCH") << '\n';
    std::filesystem::remove_all("selftest_a");
    std::filesystem::remove_all("selftest_b");
    return a == b ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MEC blockchain offloading simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string policy_override;
    std::uint64_t seed_override = 0;
    bool seed_set = false;

    CLI::App* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("config", config_path, "key=value config file")->required();
    run->add_option("--out", out_override, "override the output directory");
    run->add_option("--policy", policy_override, "run a single policy (no|eo|random|rlo|drlo)");
    run->add_option("--seed", seed_override, "override the base seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    std::string save_policy_dir;
    std::string load_policy_dir;
    run->add_option("--save-policy", save_policy_dir,
                    "train one episode and save per-miner policy checkpoints here");
    run->add_option("--load-policy", load_policy_dir,
                    "warm-start one episode from per-miner policy checkpoints");

    std::string results_dir;
    CLI::App* sum = app.add_subcommand("summarize", "Collect aggregate rows into summary.csv");
    sum->add_option("dir", results_dir, "results directory")->required();

    CLI::App* self = app.add_subcommand("selftest", "Run quick built-in oracle checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            mbo::ExperimentSpec spec = mbo::load_config(config_path);
            if (!out_override.empty()) spec.out_dir = out_override;
            if (!policy_override.empty())
                spec.policies = {mbo::policy_from_string(policy_override)};
            if (seed_set) spec.base.rng_seed = seed_override;
            if (!save_policy_dir.empty() || !load_policy_dir.empty())
                return checkpoint_episode(spec, load_policy_dir, save_policy_dir);
            const auto aggregates = mbo::run_experiment(spec);
            std::cout << "wrote " << aggregates.size() << " aggregate rows to " << spec.out_dir
                      << '\n';
            return 0;
        }
        if (sum->parsed()) {
            mbo::summarize(results_dir);
            std::cout << "wrote summary.csv\n";
            return 0;
        }
        if (self->parsed()) return selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
