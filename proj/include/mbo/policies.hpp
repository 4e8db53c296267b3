#ifndef MBO_POLICIES_HPP
#define MBO_POLICIES_HPP

#include <stdexcept>

#include "mbo/env.hpp"
#include "mbo/rng.hpp"

namespace mbo {

// Bijection between joint action index in [0, 2^M) and the per-task
// offload vector; bit k of the index is the decision for task k.
inline int action_to_index(const Action& a) {
    if (a.offload.size() > 30) throw std::invalid_argument("action_to_index: too many tasks");
    int idx = 0;
    for (std::size_t k = 0; k < a.offload.size(); ++k) {
        if (a.offload[k] != 0 && a.offload[k] != 1)
            throw std::invalid_argument("action_to_index: entries must be 0 or 1");
        idx |= a.offload[k] << k;
    }
    return idx;
}

inline Action index_to_action(int idx, int num_tasks) {
    if (num_tasks < 0 || num_tasks > 30 || idx < 0 || idx >= (1 << num_tasks))
        throw std::invalid_argument("index_to_action: index out of range");
    Action a;
    a.offload.resize(static_cast<std::size_t>(num_tasks));
    for (int k = 0; k < num_tasks; ++k) a.offload[static_cast<std::size_t>(k)] = (idx >> k) & 1;
    return a;
}

inline int num_actions(int num_tasks) { return 1 << num_tasks; }

// Fixed baselines: never offload, always offload, uniform coin per task.
inline Action no_offload_action(int num_tasks) { return Action::all(num_tasks, 0); }
inline Action full_offload_action(int num_tasks) { return Action::all(num_tasks, 1); }

inline Action random_action(int num_tasks, Rng& rng) {
    Action a;
    a.offload.resize(static_cast<std::size_t>(num_tasks));
    for (int k = 0; k < num_tasks; ++k)
        a.offload[static_cast<std::size_t>(k)] = rng.bernoulli(0.5) ? 1 : 0;
    return a;
}

} // namespace mbo

#endif
