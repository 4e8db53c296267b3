#ifndef MBO_COST_MODEL_HPP
#define MBO_COST_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "mbo/config.hpp"
#include "mbo/rng.hpp"

namespace mbo {

// Per-slot data processing task R_nm^t: new bits D1, buffered bits D0,
// cycles-per-bit workload X and deadline tau.
struct Task {
    double new_bits = 0.0;      // D1
    double buffered_bits = 0.0; // D0
    double cycles_per_bit = 0.0;
    double deadline_s = 0.0;

    double total_bits() const { return new_bits + buffered_bits; }
};

// Two-state channel gain, 1 = good, 0 = bad.
struct ChannelState {
    int gain = 0;
    bool good() const { return gain == 1; }
};

inline ChannelState step_channel(ChannelState state, double stay_prob, Rng& rng) {
    if (rng.uniform() < stay_prob) return state;
    return ChannelState{1 - state.gain};
}

inline Task generate_task(Rng& rng, const SimConfig& cfg, double carryover_bits) {
    Task t;
    t.new_bits = rng.uniform(cfg.task_size_range_bits.min, cfg.task_size_range_bits.max);
    t.buffered_bits = carryover_bits;
    t.cycles_per_bit = cfg.cycles_per_bit;
    t.deadline_s = cfg.deadline_s;
    return t;
}

// Shared MEC task buffer, in CPU cycles, drained at F cycles per second.
struct ServerQueue {
    double pending_cycles = 0.0;
};

struct BranchCost {
    double latency_s = 0.0;
    double energy_j = 0.0;
};

inline double uplink_latency(const Task& task, const SimConfig& cfg) {
    return task.total_bits() / cfg.uplink_rate_bits_per_s;
}

inline double queuing_latency(const ServerQueue& queue, const SimConfig& cfg) {
    return queue.pending_cycles / cfg.mec_capacity_cycles_per_s;
}

inline double processing_delay(const Task& task, const SimConfig& cfg) {
    return task.total_bits() * task.cycles_per_bit / cfg.mec_capacity_cycles_per_s;
}

inline BranchCost offload_cost(const Task& task, const ServerQueue& queue, const SimConfig& cfg) {
    const double lu = uplink_latency(task, cfg);
    const double lp = processing_delay(task, cfg);
    const double lq = queuing_latency(queue, cfg);
    const double f = cfg.mec_capacity_cycles_per_s;
    BranchCost c;
    c.latency_s = lu + lp + lq;
    c.energy_j = cfg.miner_tx_power_w * lu + cfg.mec_energy_coeff * f * f * f * lp +
                 cfg.mec_circuit_power_w * lq;
    return c;
}

inline BranchCost local_cost(const Task& task, const SimConfig& cfg) {
    BranchCost c;
    c.latency_s = task.total_bits() * cfg.local_time_s_per_bit;
    c.energy_j = task.total_bits() * cfg.local_energy_j_per_bit;
    return c;
}

// Usage-pattern leakage: visible only on a good channel, proportional to the
// gap between the buffered backlog and what the chosen action ships.
inline double usage_pattern_privacy(const Task& task, int x, ChannelState g, const SimConfig&) {
    if (!g.good()) return 0.0;
    return std::abs(task.buffered_bits - x * task.total_bits());
}

// Location leakage: offloading a nonempty task exposes the miner when the
// channel is bad (retransmissions make the position observable).
inline double location_privacy(const Task& task, int x, ChannelState g) {
    return (x * task.total_bits() > 0.0 && !g.good()) ? 1.0 : 0.0;
}

inline double total_privacy(double usage, double location, const SimConfig& cfg) {
    return usage + cfg.privacy_location_weight * location;
}

// Mining payoff. Win probability is the hash share discounted by orphan risk
// over block propagation. Expected mode returns R*P_win - Y; sampled mode
// draws the win.
inline double mining_reward(double hash_power, double payment, double block_size_bits,
                            double network_hash, const SimConfig& cfg, Rng* rng = nullptr) {
    if (network_hash <= 0.0) throw std::invalid_argument("network_hash: must be positive");
    const double mu = hash_power / network_hash;
    const double propagation_s = cfg.propagation_s_per_bit * block_size_bits;
    const double p_win = mu * std::exp(-cfg.orphan_rate_eta * propagation_s);
    if (cfg.mining_mode == MiningMode::Sampled) {
        if (rng == nullptr) throw std::invalid_argument("mining_mode: sampled mode needs an rng");
        return (rng->bernoulli(p_win) ? cfg.mining_reward_tokens : 0.0) - payment;
    }
    return cfg.mining_reward_tokens * p_win - payment;
}

// Slot latency for one miner: max over the branch each task was routed to.
inline double aggregate_latency(std::span<const double> offload_latencies,
                                std::span<const double> local_latencies) {
    double m = 0.0;
    for (double v : offload_latencies) m = std::max(m, v);
    for (double v : local_latencies) m = std::max(m, v);
    return m;
}

// Weighted system cost for one miner: per-task energy of the taken branch
// plus the per-miner latency, each term scaled before summation.
inline double system_cost(std::span<const double> energies, double latency, const SimConfig& cfg) {
    double e = 0.0;
    for (double v : energies) e += v;
    return cfg.alpha1() * cfg.cost_scale_energy * e +
           cfg.alpha2() * cfg.cost_scale_latency * latency;
}

} // namespace mbo

#endif
