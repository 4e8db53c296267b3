#ifndef MBO_METRICS_HPP
#define MBO_METRICS_HPP

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mbo {

// Per-slot system-wide series for one simulated episode.
struct EpisodeMetrics {
    std::vector<double> reward;
    std::vector<double> privacy;
    std::vector<double> mining_reward;
    std::vector<double> latency_s;
    std::vector<double> energy_j;
    std::vector<double> cost;
    std::vector<int> deadline_violations;

    std::size_t slots() const { return reward.size(); }
};

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty series");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double mean_tail(const std::vector<double>& v, std::size_t tail) {
    if (tail == 0 || tail > v.size()) throw std::invalid_argument("mean_tail: bad tail length");
    return std::accumulate(v.end() - static_cast<std::ptrdiff_t>(tail), v.end(), 0.0) /
           static_cast<double>(tail);
}

// Means of every full window of the given length, one entry per start slot.
inline std::vector<double> rolling_mean(const std::vector<double>& v, std::size_t window) {
    if (window == 0 || window > v.size())
        throw std::invalid_argument("rolling_mean: bad window length");
    std::vector<double> out;
    out.reserve(v.size() - window + 1);
    double sum = std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(window), 0.0);
    out.push_back(sum / static_cast<double>(window));
    for (std::size_t i = window; i < v.size(); ++i) {
        sum += v[i] - v[i - window];
        out.push_back(sum / static_cast<double>(window));
    }
    return out;
}

// Earliest slot t such that every forward window mean starting at or after t
// stays within tol * max(|final|, floor) of the final-tail mean. Returns -1
// if the series never settles.
inline long convergence_slot(const std::vector<double>& series, std::size_t window = 200,
                             std::size_t final_tail = 1000, double tol = 0.05,
                             double floor = 1e-12) {
    if (series.size() < window || series.size() < final_tail) return -1;
    const double final_mean = mean_tail(series, final_tail);
    const double band = tol * std::max(std::abs(final_mean), floor);
    const std::vector<double> rolls = rolling_mean(series, window);
    long earliest = -1;
    for (long i = static_cast<long>(rolls.size()) - 1; i >= 0; --i) {
        if (std::abs(rolls[static_cast<std::size_t>(i)] - final_mean) > band) break;
        earliest = i;
    }
    return earliest;
}

} // namespace mbo

#endif
