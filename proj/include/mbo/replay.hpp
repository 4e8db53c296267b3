#ifndef MBO_REPLAY_HPP
#define MBO_REPLAY_HPP

#include <stdexcept>
#include <vector>

#include "mbo/rng.hpp"

namespace mbo {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
};

// Fixed-capacity ring buffer with uniform without-replacement sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
        data_.reserve(capacity);
    }

    void push(const Transition& t) {
        if (data_.size() < capacity_) {
            data_.push_back(t);
        } else {
            data_[write_] = t;
        }
        write_ = (write_ + 1) % capacity_;
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& operator[](std::size_t i) const { return data_[i]; }

    // Partial Fisher-Yates on a persistent index permutation; distinct
    // entries, uniform without replacement, any order.
    std::vector<Transition> sample(std::size_t batch, Rng& rng) const {
        if (batch > data_.size())
            throw std::invalid_argument("ReplayBuffer: batch larger than stored transitions");
        while (perm_.size() < data_.size()) perm_.push_back(perm_.size());
        std::vector<Transition> out;
        out.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const std::size_t j = i + rng.uniform_index(perm_.size() - i);
            std::swap(perm_[i], perm_[j]);
            out.push_back(data_[perm_[i]]);
        }
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t write_ = 0;
    std::vector<Transition> data_;
    mutable std::vector<std::size_t> perm_;
};

} // namespace mbo

#endif
