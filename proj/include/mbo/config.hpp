#ifndef MBO_CONFIG_HPP
#define MBO_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbo {

enum class RewardMode { Eq17, Eq21 };
enum class MiningMode { Expected, Sampled };
enum class ActionHead { Joint, Relaxed };

struct Range {
    double min = 0.0;
    double max = 0.0;
};

// Every model constant in one place. Defaults describe the reference
// scenario; everything is overridable through the harness config file.
struct SimConfig {
    // topology / horizon
    int num_miners = 1;           // N
    int num_tasks = 2;            // M per miner
    double slot_duration_s = 1.0;
    int total_slots = 8000;      // T

    // channel + MEC + local computation
    double uplink_rate_bits_per_s = 1.0e7;    // r_n
    double mec_capacity_cycles_per_s = 1.0e10; // F
    double cycles_per_bit = 18000.0;          // X
    double deadline_s = 15.0;                 // tau
    double local_time_s_per_bit = 4.75e-7;    // t_l
    double local_energy_j_per_bit = 3.25e-7;  // e_l
    double miner_tx_power_w = 0.5;            // P^M
    double mec_circuit_power_w = 0.05;        // P^C
    double mec_energy_coeff = 1.0e-26;        // gamma_E
    double channel_good_threshold = 0.8;      // zeta
    double channel_stay_prob = 0.95;          // h_00 = h_11

    // privacy
    double privacy_location_weight = 0.5;     // lambda

    // task and mining economics (sizes in bits)
    Range task_size_range_bits{50.0e3 * 8, 150.0e3 * 8};
    Range block_size_range_bits{5.0e3 * 8, 10.0e3 * 8};
    Range miner_hash_range{2.0e7, 1.0e8};
    Range network_hash_range{1.0e12, 1.0e14};
    double mining_reward_tokens = 30.0;       // R
    double orphan_rate_eta = 1.0 / 600.0;     // eta
    double propagation_s_per_bit = 6.25e-5;   // k_prop
    double hash_price_tokens_per_hash_s = 1.0e-12; // c_hash
    MiningMode mining_mode = MiningMode::Expected;

    // reward shaping
    double beta = 0.5;           // alpha1 = beta, alpha2 = 1 - beta
    RewardMode reward_mode = RewardMode::Eq21;
    double reward_scale_privacy = 3.0e-9;  // w_P
    double reward_scale_mining = 1.0;      // w_R
    double reward_scale_cost = 0.1;        // w_C
    double cost_scale_energy = 3.0e-5;     // energy term scale inside the system cost
    double cost_scale_latency = 1.0;
    double deadline_penalty = 0.0;

    // buffer model
    double local_bit_budget_per_slot = 760.0e3;

    // observation / discretization
    double obs_buffer_max_bits = 3.2e6;  // buffer cap for bucketing + normalization
    int state_bins = 10;                 // B
    int hash_bins = 4;

    // learning
    double qtable_learning_rate = 0.1;
    double discount = 0.85;              // gamma
    double dqn_learning_rate = 0.01;
    int dqn_batch_size = 128;
    int replay_capacity = 100000;
    int target_sync_period = 200;
    std::vector<int> dqn_hidden_sizes{32, 32};
    ActionHead action_head = ActionHead::Joint;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int epsilon_decay_slots = 2000;

    std::uint64_t rng_seed = 1;

    double alpha1() const { return beta; }
    double alpha2() const { return 1.0 - beta; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

inline void check(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw std::invalid_argument(field + ": " + why);
}

inline void SimConfig::validate() const {
    check(num_miners > 0, "num_miners", "must be positive");
    check(num_tasks > 0, "num_tasks", "must be positive");
    check(slot_duration_s > 0, "slot_duration", "must be positive");
    check(total_slots > 0, "total_slots", "must be positive");
    check(uplink_rate_bits_per_s > 0, "uplink_rate_bits_per_s", "must be positive");
    check(mec_capacity_cycles_per_s > 0, "mec_capacity_cycles_per_s", "must be positive");
    check(cycles_per_bit > 0, "cycles_per_bit", "must be positive");
    check(deadline_s > 0, "deadline_s", "must be positive");
    check(local_time_s_per_bit > 0, "local_time_s_per_bit", "must be positive");
    check(local_energy_j_per_bit > 0, "local_energy_j_per_bit", "must be positive");
    check(miner_tx_power_w > 0, "miner_tx_power_w", "must be positive");
    check(mec_circuit_power_w > 0, "mec_circuit_power_w", "must be positive");
    check(mec_energy_coeff > 0, "mec_energy_coeff", "must be positive");
    check(channel_stay_prob >= 0 && channel_stay_prob <= 1, "channel_stay_prob", "must be in [0,1]");
    check(privacy_location_weight > 0 && privacy_location_weight < 1,
          "privacy_location_weight", "must be in (0,1)");
    check(task_size_range_bits.min >= 0 && task_size_range_bits.min <= task_size_range_bits.max,
          "task_size_range_bits", "min must be in [0, max]");
    check(block_size_range_bits.min >= 0 && block_size_range_bits.min <= block_size_range_bits.max,
          "block_size_range_bits", "min must be in [0, max]");
    check(miner_hash_range.min > 0 && miner_hash_range.min <= miner_hash_range.max,
          "miner_hash_range", "must be positive with min <= max");
    check(network_hash_range.min > 0 && network_hash_range.min <= network_hash_range.max,
          "network_hash_range", "must be positive with min <= max");
    check(mining_reward_tokens >= 0, "mining_reward_tokens", "must be non-negative");
    check(orphan_rate_eta >= 0, "orphan_rate_eta", "must be non-negative");
    check(propagation_s_per_bit >= 0, "propagation_s_per_bit", "must be non-negative");
    check(hash_price_tokens_per_hash_s >= 0, "hash_price_tokens_per_hash_s", "must be non-negative");
    check(beta >= 0 && beta <= 1, "beta", "must be in [0,1]");
    check(reward_scale_privacy > 0, "reward_scale_privacy", "must be positive");
    check(reward_scale_mining > 0, "reward_scale_mining", "must be positive");
    check(reward_scale_cost > 0, "reward_scale_cost", "must be positive");
    check(cost_scale_energy > 0, "cost_scale_energy", "must be positive");
    check(cost_scale_latency > 0, "cost_scale_latency", "must be positive");
    check(deadline_penalty >= 0, "deadline_penalty", "must be non-negative");
    check(local_bit_budget_per_slot >= 0, "local_bit_budget_per_slot", "must be non-negative");
    check(obs_buffer_max_bits > 0, "obs_buffer_max_bits", "must be positive");
    check(state_bins > 0, "state_bins", "must be positive");
    check(hash_bins > 0, "hash_bins", "must be positive");
    check(qtable_learning_rate > 0 && qtable_learning_rate <= 1,
          "qtable_learning_rate", "must be in (0,1]");
    check(discount > 0 && discount < 1, "discount", "must be in (0,1)");
    check(dqn_learning_rate > 0, "dqn_learning_rate", "must be positive");
    check(dqn_batch_size > 0, "dqn_batch_size", "must be positive");
    check(replay_capacity > 0, "replay_capacity", "must be positive");
    check(target_sync_period > 0, "target_sync_period", "must be positive");
    for (int h : dqn_hidden_sizes)
        check(h > 0, "dqn_hidden_sizes", "every layer size must be positive");
    check(epsilon_start >= 0 && epsilon_start <= 1, "epsilon_start", "must be in [0,1]");
    check(epsilon_end >= 0 && epsilon_end <= epsilon_start,
          "epsilon_end", "must be in [0, epsilon_start]");
    check(epsilon_decay_slots >= 0, "epsilon_decay_slots", "must be non-negative");
    if (action_head == ActionHead::Joint)
        check(num_tasks <= 10, "num_tasks", "joint action head caps M at 10");
}

} // namespace mbo

#endif
