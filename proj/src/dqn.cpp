#include "mbo/dqn.hpp"

#include "mbo/policies.hpp"

namespace mbo {

namespace {

std::vector<int> topology(const SimConfig& cfg, int actions) {
    std::vector<int> sizes;
    sizes.push_back(2 * cfg.num_tasks + 3);
    for (int h : cfg.dqn_hidden_sizes) sizes.push_back(h);
    sizes.push_back(cfg.action_head == ActionHead::Joint ? actions : cfg.num_tasks);
    return sizes;
}

} // namespace

DqnAgent::DqnAgent(const SimConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed), actions_(num_actions(cfg.num_tasks)),
      online_(topology(cfg, actions_),
              cfg.action_head == ActionHead::Joint ? OutputActivation::Identity
                                                   : OutputActivation::Sigmoid,
              rng_),
      target_(online_), replay_(static_cast<std::size_t>(cfg.replay_capacity)) {}

Eigen::VectorXd DqnAgent::to_vec(const std::vector<double>& s) const {
    return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

int DqnAgent::select_from_outputs(const Eigen::VectorXd& out) const {
    if (cfg_.action_head == ActionHead::Joint) {
        int best = 0;
        for (int a = 1; a < out.size(); ++a)
            if (out(a) > out(best)) best = a;
        return best;
    }
    Action a;
    a.offload.resize(static_cast<std::size_t>(cfg_.num_tasks));
    for (int k = 0; k < cfg_.num_tasks; ++k)
        a.offload[static_cast<std::size_t>(k)] = out(k) >= 0.5 ? 1 : 0;
    return action_to_index(a);
}

int DqnAgent::greedy(const std::vector<double>& state) const {
    return select_from_outputs(online_.forward(to_vec(state)));
}

int DqnAgent::act(const std::vector<double>& state, double epsilon) {
    if (rng_.uniform() < epsilon) return static_cast<int>(rng_.uniform_index(actions_));
    return greedy(state);
}

void DqnAgent::observe(const Transition& t) { replay_.push(t); }

double DqnAgent::train() {
    const std::size_t batch = static_cast<std::size_t>(cfg_.dqn_batch_size);
    if (replay_.size() < batch) return -1.0;

    const std::vector<Transition> sample = replay_.sample(batch, rng_);
    const int n = static_cast<int>(batch);

    const int dim = online_.input_size();
    Eigen::MatrixXd states(dim, n);
    Eigen::MatrixXd next_states(dim, n);
    for (int i = 0; i < n; ++i) {
        states.col(i) = to_vec(sample[static_cast<std::size_t>(i)].state);
        next_states.col(i) = to_vec(sample[static_cast<std::size_t>(i)].next_state);
    }

    GradientTape next_tape;
    const Eigen::MatrixXd next_q = target_.forward(next_states, next_tape);
    GradientTape tape;
    const Eigen::MatrixXd q = online_.forward(states, tape);

    // Squared TD error averaged over the batch: dLoss/dq = (q - y) / n on
    // the outputs tied to the chosen action, zero elsewhere.
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const Transition& t = sample[static_cast<std::size_t>(i)];
        const double target_value = t.reward + cfg_.discount * next_q.col(i).maxCoeff();
        if (cfg_.action_head == ActionHead::Joint) {
            const double err = q(t.action, i) - target_value;
            grad(t.action, i) = err / n;
            loss += 0.5 * err * err;
        } else {
            const Action a = index_to_action(t.action, cfg_.num_tasks);
            for (int k = 0; k < cfg_.num_tasks; ++k) {
                if (!a.offload[static_cast<std::size_t>(k)]) continue;
                const double err = q(k, i) - target_value;
                grad(k, i) = err / n;
                loss += 0.5 * err * err;
            }
        }
    }

    online_.sgd_step(online_.backward(tape, grad), cfg_.dqn_learning_rate);
    ++train_steps_;
    if (train_steps_ % cfg_.target_sync_period == 0) target_ = online_;
    return loss / n;
}

void DqnAgent::restore(const std::string& json) {
    online_ = Mlp::from_json(json);
    target_ = online_;
}

} // namespace mbo
