#ifndef MBO_TESTS_REFERENCE_MLP_HPP
#define MBO_TESTS_REFERENCE_MLP_HPP

#include <cmath>
#include <vector>

#include "mbo/mlp.hpp"

namespace mbo::tests {

// Deliberately naive scalar-loop forward pass, independent of the Eigen
// implementation under test.
inline std::vector<double> reference_forward(const Mlp& net, const std::vector<double>& input) {
    std::vector<double> a = input;
    const auto& weights = net.weights();
    const auto& biases = net.biases();
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const auto& w = weights[l];
        const auto& b = biases[l];
        std::vector<double> z(static_cast<std::size_t>(w.rows()), 0.0);
        for (int i = 0; i < w.rows(); ++i) {
            double sum = b(i);
            for (int j = 0; j < w.cols(); ++j) sum += w(i, j) * a[static_cast<std::size_t>(j)];
            z[static_cast<std::size_t>(i)] = sum;
        }
        const bool last = l + 1 == weights.size();
        for (double& v : z) {
            if (!last) {
                v = v > 0.0 ? v : 0.0;
            } else if (net.output_activation() == OutputActivation::Sigmoid) {
                v = 1.0 / (1.0 + std::exp(-v));
            }
        }
        a = std::move(z);
    }
    return a;
}

} // namespace mbo::tests

#endif
