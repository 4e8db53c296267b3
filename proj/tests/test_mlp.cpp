#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mbo/mlp.hpp"
#include "support/reference_mlp.hpp"

using namespace mbo;

namespace {

Mlp linear_1x1(double w, double b) {
    Rng rng(1);
    Mlp net({1, 1}, OutputActivation::Identity, rng);
    net.weights()[0](0, 0) = w;
    net.biases()[0](0) = b;
    return net;
}

} // namespace

TEST_CASE("forward pass matches a naive reference implementation") {
    for (const auto act : {OutputActivation::Identity, OutputActivation::Sigmoid}) {
        Rng rng(17);
        Mlp net({4, 8, 8, 2}, act, rng);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> input(4);
            Eigen::VectorXd x(4);
            for (int i = 0; i < 4; ++i) {
                input[static_cast<std::size_t>(i)] = rng.uniform(-2.0, 2.0);
                x(i) = input[static_cast<std::size_t>(i)];
            }
            const Eigen::VectorXd got = net.forward(x);
            const std::vector<double> want = tests::reference_forward(net, input);
            REQUIRE(got.size() == 2);
            for (int i = 0; i < 2; ++i)
                CHECK(got(i) == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("sigmoid output at zero pre-activation is one half") {
    Rng rng(2);
    Mlp net({3, 4, 2}, OutputActivation::Sigmoid, rng);
    for (auto& w : net.weights()) w.setZero();
    for (auto& b : net.biases()) b.setZero();
    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    const Eigen::VectorXd y = net.forward(x);
    CHECK(y(0) == 0.5);
    CHECK(y(1) == 0.5);
}

TEST_CASE("hand-differentiated linear net gradient") {
    // y = w*x, loss (y - target)^2 at x=2, w=3, target=0: dloss/dw = 2*6*2 = 24
    Mlp net = linear_1x1(3.0, 0.0);
    Eigen::MatrixXd x(1, 1);
    x(0, 0) = 2.0;
    GradientTape tape;
    const Eigen::MatrixXd y = net.forward(x, tape);
    CHECK(y(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
    Eigen::MatrixXd dloss = 2.0 * y; // d[(y-0)^2]/dy
    const MlpGradients grads = net.backward(tape, dloss);
    CHECK(grads.weights[0](0, 0) == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(grads.biases[0](0) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("sgd step applies lr * grad") {
    Mlp net = linear_1x1(3.0, 0.0);
    MlpGradients grads;
    grads.weights.push_back(Eigen::MatrixXd::Constant(1, 1, 24.0));
    grads.biases.push_back(Eigen::VectorXd::Zero(1));
    net.sgd_step(grads, 0.01);
    CHECK(net.weights()[0](0, 0) == doctest::Approx(2.76).epsilon(1e-12));
}

TEST_CASE("sgd on a 1-d quadratic converges to the minimizer") {
    // loss = (w*x - t)^2 with x=1.5, t=4.2: minimizer w* = 2.8
    Mlp net = linear_1x1(0.0, 0.0);
    Eigen::MatrixXd x(1, 1);
    x(0, 0) = 1.5;
    for (int i = 0; i < 2000; ++i) {
        GradientTape tape;
        const Eigen::MatrixXd y = net.forward(x, tape);
        Eigen::MatrixXd dloss = 2.0 * (y.array() - 4.2).matrix();
        MlpGradients grads = net.backward(tape, dloss);
        grads.biases[0].setZero(); // keep it a pure 1-d problem in w
        net.sgd_step(grads, 0.05);
    }
    CHECK(net.weights()[0](0, 0) == doctest::Approx(2.8).epsilon(1e-6));
}

TEST_CASE("gradient check: exact on a linear net, tight on relu nets") {
    Rng rng(23);
    Mlp linear({3, 2}, OutputActivation::Identity, rng);
    Eigen::VectorXd x(3), target(2);
    x << 0.3, -0.7, 1.1;
    target << 0.2, -0.4;
    CHECK(grad_check(linear, x, target) < 1e-8);

    Mlp net({6, 16, 8, 3}, OutputActivation::Identity, rng);
    Eigen::VectorXd x2(6), t2(3);
    for (int i = 0; i < 6; ++i) x2(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) t2(i) = rng.uniform(-1.0, 1.0);
    CHECK(grad_check(net, x2, t2) < 1e-4);

    Mlp sig({5, 12, 2}, OutputActivation::Sigmoid, rng);
    Eigen::VectorXd x3(5), t3(2);
    for (int i = 0; i < 5; ++i) x3(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 2; ++i) t3(i) = rng.uniform(0.0, 1.0);
    CHECK(grad_check(sig, x3, t3) < 1e-4);
}

TEST_CASE("tape is single-use and tied to its pass") {
    Rng rng(3);
    Mlp net({2, 4, 1}, OutputActivation::Identity, rng);
    Eigen::MatrixXd x(2, 1);
    x << 0.5, -0.5;
    GradientTape tape;
    net.forward(x, tape);
    Eigen::MatrixXd dloss = Eigen::MatrixXd::Ones(1, 1);
    net.backward(tape, dloss);
    CHECK_THROWS(net.backward(tape, dloss)); // consumed

    GradientTape stale;
    net.forward(x, stale);
    net.forward(x, stale); // re-recorded, prior pass invalidated
    GradientTape fresh;
    net.forward(x, fresh);
    CHECK_THROWS(net.backward(stale, dloss));
}

TEST_CASE("sgd rejects malformed or non-finite gradients") {
    Mlp net = linear_1x1(1.0, 0.0);
    MlpGradients bad_shape;
    bad_shape.weights.push_back(Eigen::MatrixXd::Zero(2, 2));
    bad_shape.biases.push_back(Eigen::VectorXd::Zero(1));
    CHECK_THROWS(net.sgd_step(bad_shape, 0.1));

    MlpGradients nan_grad;
    nan_grad.weights.push_back(
        Eigen::MatrixXd::Constant(1, 1, std::numeric_limits<double>::quiet_NaN()));
    nan_grad.biases.push_back(Eigen::VectorXd::Zero(1));
    CHECK_THROWS(net.sgd_step(nan_grad, 0.1));
    CHECK(net.parameters_finite());
}

TEST_CASE("json checkpoint round trip preserves behavior exactly") {
    Rng rng(29);
    Mlp net({5, 8, 3}, OutputActivation::Sigmoid, rng);
    const Mlp copy = Mlp::from_json(net.to_json());
    CHECK(copy.layer_sizes() == net.layer_sizes());
    CHECK(copy.output_activation() == net.output_activation());
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x(i) = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd a = net.forward(x);
    const Eigen::VectorXd b = copy.forward(x);
    for (int i = 0; i < 3; ++i) CHECK(a(i) == b(i));
}

TEST_CASE("construction validates topology") {
    Rng rng(1);
    CHECK_THROWS(Mlp({5}, OutputActivation::Identity, rng));
    CHECK_THROWS(Mlp({5, 0, 2}, OutputActivation::Identity, rng));
}
