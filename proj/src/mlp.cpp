#include "mbo/mlp.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace mbo {

namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return (1.0 + (-z.array()).exp()).inverse().matrix();
}

} // namespace

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation out_act, Rng& rng)
    : sizes_(std::move(layer_sizes)), out_act_(out_act) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output layers");
    for (int s : sizes_)
        if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int i = 0; i < w.rows(); ++i)
            for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
        weights_.push_back(std::move(w));
        biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, GradientTape& tape) const {
    if (input.rows() != input_size())
        throw std::invalid_argument("forward: input rows must equal first layer size");
    tape.activations.clear();
    tape.pre_activations.clear();
    tape.pass_id = ++pass_counter_;
    tape.consumed = false;

    tape.activations.push_back(input);
    Eigen::MatrixXd a = input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
        const bool last = l + 1 == weights_.size();
        if (!last)
            a = relu(z);
        else
            a = out_act_ == OutputActivation::Sigmoid ? sigmoid(z) : z;
        tape.pre_activations.push_back(std::move(z));
        tape.activations.push_back(a);
    }
    return a;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
    GradientTape tape;
    return forward(Eigen::MatrixXd(input), tape).col(0);
}

MlpGradients Mlp::backward(GradientTape& tape, const Eigen::MatrixXd& output_grad) const {
    if (tape.consumed) throw std::logic_error("backward: tape already consumed");
    if (tape.pass_id != pass_counter_)
        throw std::logic_error("backward: tape is stale, rerun forward first");
    if (tape.activations.size() != weights_.size() + 1)
        throw std::logic_error("backward: tape does not match this network");
    if (output_grad.rows() != output_size() ||
        output_grad.cols() != tape.activations.back().cols())
        throw std::invalid_argument("backward: output_grad shape mismatch");
    tape.consumed = true;

    MlpGradients g;
    g.weights.resize(weights_.size());
    g.biases.resize(biases_.size());

    Eigen::MatrixXd delta = output_grad;
    if (out_act_ == OutputActivation::Sigmoid) {
        const Eigen::MatrixXd& y = tape.activations.back();
        delta = delta.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
    }
    for (std::size_t l = weights_.size(); l-- > 0;) {
        g.weights[l] = delta * tape.activations[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = weights_[l].transpose() * delta;
            delta = delta.cwiseProduct(
                (tape.pre_activations[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return g;
}

void Mlp::sgd_step(const MlpGradients& grads, double learning_rate) {
    if (grads.weights.size() != weights_.size())
        throw std::invalid_argument("sgd_step: gradient layer count mismatch");
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (grads.weights[l].rows() != weights_[l].rows() ||
            grads.weights[l].cols() != weights_[l].cols() ||
            grads.biases[l].size() != biases_[l].size())
            throw std::invalid_argument("sgd_step: gradient shape mismatch");
        if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite())
            throw std::invalid_argument("sgd_step: non-finite gradients");
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        weights_[l] -= learning_rate * grads.weights[l];
        biases_[l] -= learning_rate * grads.biases[l];
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
        n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
}

bool Mlp::parameters_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l)
        if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
}

std::string Mlp::to_json() const {
    nlohmann::json j;
    j["layer_sizes"] = sizes_;
    j["output_activation"] = out_act_ == OutputActivation::Sigmoid ? "sigmoid" : "identity";
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        nlohmann::json layer;
        std::vector<double> w; // row-major
        w.reserve(static_cast<std::size_t>(weights_[l].size()));
        for (int i = 0; i < weights_[l].rows(); ++i)
            for (int jx = 0; jx < weights_[l].cols(); ++jx) w.push_back(weights_[l](i, jx));
        layer["weights"] = w;
        layer["biases"] = std::vector<double>(biases_[l].data(), biases_[l].data() + biases_[l].size());
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump();
}

Mlp Mlp::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Mlp net;
    net.sizes_ = j.at("layer_sizes").get<std::vector<int>>();
    net.out_act_ = j.at("output_activation").get<std::string>() == "sigmoid"
                       ? OutputActivation::Sigmoid
                       : OutputActivation::Identity;
    const auto& layers = j.at("layers");
    if (layers.size() + 1 != net.sizes_.size())
        throw std::invalid_argument("from_json: layer count does not match layer_sizes");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const int rows = net.sizes_[l + 1];
        const int cols = net.sizes_[l];
        const auto w = layers[l].at("weights").get<std::vector<double>>();
        const auto b = layers[l].at("biases").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) ||
            b.size() != static_cast<std::size_t>(rows))
            throw std::invalid_argument("from_json: parameter array size mismatch");
        Eigen::MatrixXd wm(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int jx = 0; jx < cols; ++jx) wm(i, jx) = w[static_cast<std::size_t>(i) * cols + jx];
        net.weights_.push_back(std::move(wm));
        net.biases_.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
    }
    return net;
}

double grad_check(Mlp& net, const Eigen::VectorXd& input, const Eigen::VectorXd& loss_target,
                  double fd_step) {
    // Loss: 0.5 * ||output - target||^2, so dLoss/d(output) = output - target.
    // Central differences are only valid where the loss is smooth, so a
    // parameter whose perturbation flips any ReLU activation sign (the loss
    // has a kink there) is excluded from the comparison.
    auto evaluate = [&](std::vector<bool>* pattern) {
        GradientTape t;
        const Eigen::MatrixXd y = net.forward(Eigen::MatrixXd(input), t);
        if (pattern) {
            pattern->clear();
            for (std::size_t l = 0; l + 1 < t.pre_activations.size(); ++l)
                for (int i = 0; i < t.pre_activations[l].size(); ++i)
                    pattern->push_back(t.pre_activations[l].data()[i] > 0.0);
        }
        return 0.5 * (y.col(0) - loss_target).squaredNorm();
    };

    GradientTape tape;
    const Eigen::MatrixXd y = net.forward(Eigen::MatrixXd(input), tape);
    const MlpGradients analytic = net.backward(tape, y.col(0) - loss_target);

    double worst = 0.0;
    std::vector<bool> plus_pattern, minus_pattern;
    auto compare = [&](double* param, double grad) {
        const double orig = *param;
        *param = orig + fd_step;
        const double lp = evaluate(&plus_pattern);
        *param = orig - fd_step;
        const double lm = evaluate(&minus_pattern);
        *param = orig;
        if (plus_pattern != minus_pattern) return; // kink crossed, not differentiable
        const double numeric = (lp - lm) / (2.0 * fd_step);
        const double denom = std::max({std::abs(grad), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(grad - numeric) / denom);
    };

    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        Eigen::MatrixXd& w = net.weights()[l];
        for (int i = 0; i < w.size(); ++i) compare(w.data() + i, analytic.weights[l].data()[i]);
        Eigen::VectorXd& b = net.biases()[l];
        for (int i = 0; i < b.size(); ++i) compare(b.data() + i, analytic.biases[l].data()[i]);
    }
    return worst;
}

} // namespace mbo
