#include "mbo/episode.hpp"

#include <stdexcept>

#include "mbo/policies.hpp"

namespace mbo {

PolicyKind policy_from_string(const std::string& name) {
    if (name == "no") return PolicyKind::NO;
    if (name == "eo") return PolicyKind::EO;
    if (name == "random") return PolicyKind::RANDOM;
    if (name == "rlo") return PolicyKind::RLO;
    if (name == "drlo") return PolicyKind::DRLO;
    throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::NO: return "no";
    case PolicyKind::EO: return "eo";
    case PolicyKind::RANDOM: return "random";
    case PolicyKind::RLO: return "rlo";
    case PolicyKind::DRLO: return "drlo";
    }
    throw std::logic_error("unreachable");
}

namespace {

void reserve(EpisodeMetrics& m, int slots) {
    const auto n = static_cast<std::size_t>(slots);
    m.reward.reserve(n);
    m.privacy.reserve(n);
    m.mining_reward.reserve(n);
    m.latency_s.reserve(n);
    m.energy_j.reserve(n);
    m.cost.reserve(n);
    m.deadline_violations.reserve(n);
}

void record_slot(EpisodeMetrics& m, const std::vector<StepOutcome>& outs) {
    double reward = 0, privacy = 0, mining = 0, latency = 0, energy = 0, cost = 0;
    int violations = 0;
    for (const StepOutcome& o : outs) {
        reward += o.reward;
        privacy += o.privacy;
        mining += o.mining_reward;
        latency += o.latency_s;
        energy += o.energy_j;
        cost += o.cost;
        for (bool v : o.deadline_violated) violations += v ? 1 : 0;
    }
    m.reward.push_back(reward);
    m.privacy.push_back(privacy);
    m.mining_reward.push_back(mining);
    m.latency_s.push_back(latency / static_cast<double>(outs.size()));
    m.energy_j.push_back(energy);
    m.cost.push_back(cost);
    m.deadline_violations.push_back(violations);
}

} // namespace

EpisodeMetrics baseline_episode(Environment& env, PolicyKind kind, std::uint64_t seed) {
    const SimConfig& cfg = env.config();
    Rng rng(derive_seed(seed, 0x6261u, 0)); // only RANDOM draws from it
    env.reset(seed);

    EpisodeMetrics metrics;
    reserve(metrics, cfg.total_slots);
    while (!env.done()) {
        std::vector<Action> actions;
        actions.reserve(static_cast<std::size_t>(cfg.num_miners));
        for (int n = 0; n < cfg.num_miners; ++n) {
            switch (kind) {
            case PolicyKind::NO: actions.push_back(no_offload_action(cfg.num_tasks)); break;
            case PolicyKind::EO: actions.push_back(full_offload_action(cfg.num_tasks)); break;
            case PolicyKind::RANDOM: actions.push_back(random_action(cfg.num_tasks, rng)); break;
            default: throw std::invalid_argument("baseline_episode: not a baseline policy");
            }
        }
        record_slot(metrics, env.step(actions));
    }
    return metrics;
}

EpisodeMetrics rlo_episode(Environment& env, std::vector<QTable>& tables,
                           const EpsilonSchedule& schedule, std::uint64_t seed) {
    const SimConfig& cfg = env.config();
    if (static_cast<int>(tables.size()) != cfg.num_miners)
        throw std::invalid_argument("rlo_episode: one Q-table per miner required");
    Rng rng(derive_seed(seed, 0x726cu, 0));
    std::vector<Observation> obs = env.reset(seed);

    EpisodeMetrics metrics;
    reserve(metrics, cfg.total_slots);
    std::vector<int> states(static_cast<std::size_t>(cfg.num_miners));
    std::vector<int> chosen(static_cast<std::size_t>(cfg.num_miners));
    while (!env.done()) {
        const double eps = schedule.at(env.slot());
        std::vector<Action> actions;
        actions.reserve(static_cast<std::size_t>(cfg.num_miners));
        for (int n = 0; n < cfg.num_miners; ++n) {
            const auto un = static_cast<std::size_t>(n);
            states[un] = discretize(obs[un], cfg);
            chosen[un] = epsilon_greedy(tables[un], states[un], eps, rng);
            actions.push_back(index_to_action(chosen[un], cfg.num_tasks));
        }
        const std::vector<StepOutcome> outs = env.step(actions);
        for (int n = 0; n < cfg.num_miners; ++n) {
            const auto un = static_cast<std::size_t>(n);
            const int next = discretize(outs[un].next_observation, cfg);
            tables[un].update(states[un], chosen[un], outs[un].reward, next,
                              cfg.qtable_learning_rate, cfg.discount);
            obs[un] = outs[un].next_observation;
        }
        record_slot(metrics, outs);
    }
    return metrics;
}

EpisodeMetrics drlo_episode(Environment& env, std::vector<DqnAgent>& agents,
                            const EpsilonSchedule& schedule, std::uint64_t seed) {
    const SimConfig& cfg = env.config();
    if (static_cast<int>(agents.size()) != cfg.num_miners)
        throw std::invalid_argument("drlo_episode: one agent per miner required");
    std::vector<Observation> obs = env.reset(seed);

    EpisodeMetrics metrics;
    reserve(metrics, cfg.total_slots);
    std::vector<std::vector<double>> states(static_cast<std::size_t>(cfg.num_miners));
    std::vector<int> chosen(static_cast<std::size_t>(cfg.num_miners));
    while (!env.done()) {
        const double eps = schedule.at(env.slot());
        std::vector<Action> actions;
        actions.reserve(static_cast<std::size_t>(cfg.num_miners));
        for (int n = 0; n < cfg.num_miners; ++n) {
            const auto un = static_cast<std::size_t>(n);
            states[un] = obs[un].normalized(cfg);
            chosen[un] = agents[un].act(states[un], eps);
            actions.push_back(index_to_action(chosen[un], cfg.num_tasks));
        }
        const std::vector<StepOutcome> outs = env.step(actions);
        for (int n = 0; n < cfg.num_miners; ++n) {
            const auto un = static_cast<std::size_t>(n);
            Transition t;
            t.state = states[un];
            t.action = chosen[un];
            t.reward = outs[un].reward;
            t.next_state = outs[un].next_observation.normalized(cfg);
            agents[un].observe(t);
            agents[un].train();
            obs[un] = outs[un].next_observation;
        }
        record_slot(metrics, outs);
    }
    return metrics;
}

EpisodeMetrics run_policy(Environment& env, PolicyKind kind, std::uint64_t seed) {
    const SimConfig& cfg = env.config();
    const EpsilonSchedule schedule{cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_slots};
    switch (kind) {
    case PolicyKind::NO:
    case PolicyKind::EO:
    case PolicyKind::RANDOM:
        return baseline_episode(env, kind, seed);
    case PolicyKind::RLO: {
        std::vector<QTable> tables(static_cast<std::size_t>(cfg.num_miners),
                                   QTable(num_states(cfg), num_actions(cfg.num_tasks)));
        return rlo_episode(env, tables, schedule, seed);
    }
    case PolicyKind::DRLO: {
        std::vector<DqnAgent> agents;
        agents.reserve(static_cast<std::size_t>(cfg.num_miners));
        for (int n = 0; n < cfg.num_miners; ++n)
            agents.emplace_back(cfg, derive_seed(seed, 0x6471u, static_cast<std::uint64_t>(n)));
        return drlo_episode(env, agents, schedule, seed);
    }
    }
    throw std::logic_error("unreachable");
}

} // namespace mbo
