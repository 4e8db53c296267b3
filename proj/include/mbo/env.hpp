#ifndef MBO_ENV_HPP
#define MBO_ENV_HPP

#include <array>
#include <vector>

#include "mbo/config.hpp"
#include "mbo/cost_model.hpp"
#include "mbo/rng.hpp"

namespace mbo {

// Offloading decision vector x for one miner, one bit per task.
struct Action {
    std::vector<int> offload; // each entry 0 or 1

    static Action all(int num_tasks, int value) {
        return Action{std::vector<int>(static_cast<std::size_t>(num_tasks), value)};
    }
};

// The RL state s^t = {D1, D0, g, p, Y}, with per-task detail retained.
struct Observation {
    std::vector<double> new_bits;      // D1 per task
    std::vector<double> buffered_bits; // D0 per task
    int channel_gain = 0;              // g
    double hash_power = 0.0;           // p
    double payment = 0.0;              // Y

    double total_new() const;
    double total_buffered() const;
    // {D1 per task, D0 per task, g, p, Y} scaled to [0,1] by configured
    // ranges: 2M + 3 features.
    std::vector<double> normalized(const SimConfig& cfg) const;
};

int observation_feature_count(const SimConfig& cfg);

struct MinerState {
    std::vector<Task> tasks;
    ChannelState channel;
    double hash_power = 0.0; // p_n, fixed per episode
    double payment = 0.0;    // Y_n = c_hash * p_n
};

struct StepOutcome {
    double reward = 0.0;
    double privacy = 0.0;        // usage + weighted location leakage, summed over tasks
    double mining_reward = 0.0;  // expected or sampled block payoff minus hash payment
    double latency_s = 0.0;      // max over this miner's task branches
    double energy_j = 0.0;       // taken-branch energy, summed over tasks
    double cost = 0.0;           // this miner's weighted energy+latency cost
    std::vector<bool> deadline_violated;
    Observation next_observation;
};

// Discrete-time environment: shared server queue, per-miner channels,
// buffers and mining economics. Single-threaded per instance.
class Environment {
public:
    explicit Environment(const SimConfig& cfg);

    std::vector<Observation> reset(std::uint64_t seed);
    std::vector<StepOutcome> step(const std::vector<Action>& actions);

    int slot() const { return slot_; }
    bool done() const { return slot_ >= cfg_.total_slots; }
    const ServerQueue& queue() const { return queue_; }
    const SimConfig& config() const { return cfg_; }
    double network_hash() const { return network_hash_; }
    const std::vector<MinerState>& miners() const { return miners_; }

private:
    Observation observe(const MinerState& m) const;

    SimConfig cfg_;
    Rng rng_;
    std::vector<MinerState> miners_;
    ServerQueue queue_;
    double network_hash_ = 1.0;
    int slot_ = 0;
    bool ready_ = false;
};

} // namespace mbo

#endif
