#ifndef MBO_TESTS_TOY_ENV_HPP
#define MBO_TESTS_TOY_ENV_HPP

#include <vector>

#include "support/value_iteration.hpp"

namespace mbo::tests {

// Deterministic two-bucket offloading toy: the buffer bucket d0 is empty (0)
// or full (1), the arrival bucket d1 alternates 1,0,1,0,... each slot.
// Offloading (a=1) clears everything for a fee proportional to the shipped
// buckets; keeping (a=0) saturates the buffer and pays a holding cost on the
// resulting backlog. State index = d1 * 2 + d0 (4 states, 2 actions).
class ToyOffloadEnv {
public:
    static constexpr int kNumStates = 4;
    static constexpr int kNumActions = 2;
    static constexpr double kOffloadBase = 0.4;  // flat fee per offload
    static constexpr double kOffloadFee = 0.5;   // per shipped bucket
    static constexpr double kHoldingCost = 1.2;  // per buffered bucket per slot

    static int state_index(int d1, int d0) { return d1 * 2 + d0; }

    // (reward, next state) for one step; arrivals alternate deterministically.
    static std::pair<double, int> transition(int state, int action) {
        const int d1 = state / 2;
        const int d0 = state % 2;
        double reward;
        int d0_next;
        if (action == 1) {
            reward = -(kOffloadBase + kOffloadFee * (d1 + d0));
            d0_next = 0;
        } else {
            d0_next = (d1 + d0 > 0) ? 1 : 0;
            reward = -kHoldingCost * d0_next;
        }
        const int d1_next = 1 - d1;
        return {reward, state_index(d1_next, d0_next)};
    }

    // Five features shaped like the simulator's single-task observation:
    // {d1, d0, g, p, Y}, channel pinned good, economics pinned mid-range.
    static std::vector<double> features(int state) {
        return {static_cast<double>(state / 2), static_cast<double>(state % 2), 1.0, 0.5, 0.5};
    }

    static FiniteMdp mdp() {
        FiniteMdp m;
        m.num_states = kNumStates;
        m.num_actions = kNumActions;
        m.transitions.resize(kNumStates, std::vector<std::vector<Outcome>>(kNumActions));
        for (int s = 0; s < kNumStates; ++s)
            for (int a = 0; a < kNumActions; ++a) {
                const auto [r, next] = transition(s, a);
                m.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = {
                    Outcome{1.0, next, r}};
            }
        return m;
    }

    int state() const { return state_; }

    double step(int action) {
        const auto [r, next] = transition(state_, action);
        state_ = next;
        return r;
    }

private:
    int state_ = state_index(1, 0);
};

} // namespace mbo::tests

#endif
