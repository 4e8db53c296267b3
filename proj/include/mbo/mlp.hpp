#ifndef MBO_MLP_HPP
#define MBO_MLP_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mbo/rng.hpp"

namespace mbo {

enum class OutputActivation { Identity, Sigmoid };

// Cached forward-pass state, valid for exactly one backward pass.
struct GradientTape {
    std::vector<Eigen::MatrixXd> activations;     // a_0 = input, ..., a_L = output
    std::vector<Eigen::MatrixXd> pre_activations; // z_1 ... z_L
    std::uint64_t pass_id = 0;
    bool consumed = false;
};

struct MlpGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

// Fixed-topology feedforward net, ReLU hidden layers, configurable output
// activation, trained by plain SGD with reverse-mode gradients.
class Mlp {
public:
    Mlp(std::vector<int> layer_sizes, OutputActivation out_act, Rng& rng);
    Mlp() = default;

    // Columns are samples. Returns activations of the last layer.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& input, GradientTape& tape) const;
    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

    // output_grad: dLoss/d(output), same shape as the forward output.
    MlpGradients backward(GradientTape& tape, const Eigen::MatrixXd& output_grad) const;

    void sgd_step(const MlpGradients& grads, double learning_rate);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    OutputActivation output_activation() const { return out_act_; }
    std::size_t parameter_count() const;
    bool parameters_finite() const;

    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    // Flat JSON checkpoint: layer sizes header + row-major parameter arrays.
    std::string to_json() const;
    static Mlp from_json(const std::string& text);

private:
    std::vector<int> sizes_;
    OutputActivation out_act_ = OutputActivation::Identity;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
    mutable std::uint64_t pass_counter_ = 0;
};

// Worst relative error of backward vs central finite differences over all
// parameters, for an arbitrary scalar loss on the output.
double grad_check(Mlp& net, const Eigen::VectorXd& input,
                  const Eigen::VectorXd& loss_target, double fd_step = 1e-5);

} // namespace mbo

#endif
