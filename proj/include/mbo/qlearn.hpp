#ifndef MBO_QLEARN_HPP
#define MBO_QLEARN_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mbo/config.hpp"
#include "mbo/env.hpp"
#include "mbo/rng.hpp"

namespace mbo {

// Linear epsilon decay from start to end over decay_slots steps, then flat.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    int decay_slots = 2000;

    double at(int slot) const {
        if (decay_slots <= 0 || slot >= decay_slots) return end;
        if (slot <= 0) return start;
        return start + (end - start) * static_cast<double>(slot) / decay_slots;
    }
};

inline int clamp_bin(double value, double lo, double hi, int bins) {
    if (bins <= 1 || hi <= lo) return 0;
    const double t = (value - lo) / (hi - lo);
    const int b = static_cast<int>(std::floor(t * bins));
    return std::clamp(b, 0, bins - 1);
}

// Maps an observation onto the tabular state index
//   ((d1_bin * B + d0_bin) * 2 + g) * hash_bins + p_bin
// where buffer totals are bucketed over [0, obs_buffer_max_bits] and
// hash power over the configured miner range.
inline int discretize(const Observation& obs, const SimConfig& cfg) {
    const int B = cfg.state_bins;
    const int d1 = clamp_bin(obs.total_new(), 0.0, cfg.obs_buffer_max_bits, B);
    const int d0 = clamp_bin(obs.total_buffered(), 0.0, cfg.obs_buffer_max_bits, B);
    const int g = obs.channel_gain ? 1 : 0;
    const int p = clamp_bin(obs.hash_power, cfg.miner_hash_range.min, cfg.miner_hash_range.max,
                            cfg.hash_bins);
    return ((d1 * B + d0) * 2 + g) * cfg.hash_bins + p;
}

inline int num_states(const SimConfig& cfg) {
    return cfg.state_bins * cfg.state_bins * 2 * cfg.hash_bins;
}

// Dense table of action values, zero-initialized.
class QTable {
public:
    QTable(int states, int actions)
        : states_(states), actions_(actions),
          q_(static_cast<std::size_t>(states) * static_cast<std::size_t>(actions), 0.0) {
        if (states <= 0 || actions <= 0)
            throw std::invalid_argument("QTable: states and actions must be positive");
    }

    double& at(int s, int a) { return q_[index(s, a)]; }
    double at(int s, int a) const { return q_[index(s, a)]; }

    // Lowest index wins ties so greedy choices are deterministic.
    int greedy(int s) const {
        int best = 0;
        for (int a = 1; a < actions_; ++a)
            if (at(s, a) > at(s, best)) best = a;
        return best;
    }

    double max_value(int s) const { return at(s, greedy(s)); }

    // One-step temporal-difference backup; returns the updated value.
    double update(int s, int a, double reward, int s_next, double alpha, double gamma) {
        double& q = q_[index(s, a)];
        q += alpha * (reward + gamma * max_value(s_next) - q);
        return q;
    }

    int states() const { return states_; }
    int actions() const { return actions_; }

    // Checkpoint format: {"states": S, "actions": A, "q": {"<state>": [row]}}
    // with all-zero rows omitted.
    std::string to_json() const;
    static QTable from_json(const std::string& text);

private:
    std::size_t index(int s, int a) const {
        if (s < 0 || s >= states_ || a < 0 || a >= actions_)
            throw std::out_of_range("QTable: state or action out of range");
        return static_cast<std::size_t>(s) * static_cast<std::size_t>(actions_) +
               static_cast<std::size_t>(a);
    }

    int states_;
    int actions_;
    std::vector<double> q_;
};

// Explores with probability epsilon (uniform over actions), otherwise greedy.
inline int epsilon_greedy(const QTable& table, int s, double epsilon, Rng& rng) {
    if (rng.uniform() < epsilon) return static_cast<int>(rng.uniform_index(table.actions()));
    return table.greedy(s);
}

} // namespace mbo

#endif
