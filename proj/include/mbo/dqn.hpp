#ifndef MBO_DQN_HPP
#define MBO_DQN_HPP

#include <vector>

#include "mbo/config.hpp"
#include "mbo/mlp.hpp"
#include "mbo/qlearn.hpp"
#include "mbo/replay.hpp"

namespace mbo {

// Deep Q-network over the normalized per-task observation (2M+3 features).
// The default (joint) head emits 2^M action values; the relaxed head emits
// M sigmoid units thresholded at 0.5 for acting and trains the chosen
// task-wise outputs against the shared TD target.
class DqnAgent {
public:
    DqnAgent(const SimConfig& cfg, std::uint64_t seed);

    int act(const std::vector<double>& state, double epsilon);
    void observe(const Transition& t);

    // One SGD step on a replay minibatch once enough transitions exist;
    // returns the minibatch loss, or a negative value if still warming up.
    double train();

    int greedy(const std::vector<double>& state) const;
    const Mlp& online() const { return online_; }
    const Mlp& target() const { return target_; }
    const ReplayBuffer& replay() const { return replay_; }
    int train_steps() const { return train_steps_; }

    std::string checkpoint() const { return online_.to_json(); }
    void restore(const std::string& json);

private:
    Eigen::VectorXd to_vec(const std::vector<double>& s) const;
    int select_from_outputs(const Eigen::VectorXd& out) const;

    SimConfig cfg_;
    Rng rng_;
    int actions_;
    Mlp online_;
    Mlp target_;
    ReplayBuffer replay_;
    int train_steps_ = 0;
};

} // namespace mbo

#endif
