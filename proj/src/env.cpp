#include "mbo/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace mbo {

double Observation::total_new() const {
    double s = 0.0;
    for (double v : new_bits) s += v;
    return s;
}

double Observation::total_buffered() const {
    double s = 0.0;
    for (double v : buffered_bits) s += v;
    return s;
}

std::vector<double> Observation::normalized(const SimConfig& cfg) const {
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    const double d1_max = cfg.task_size_range_bits.max;
    const double p_lo = cfg.miner_hash_range.min;
    const double p_hi = cfg.miner_hash_range.max;
    const double p_span = p_hi > p_lo ? p_hi - p_lo : 1.0;
    const double y_lo = cfg.hash_price_tokens_per_hash_s * p_lo;
    const double y_hi = cfg.hash_price_tokens_per_hash_s * p_hi;
    const double y_span = y_hi > y_lo ? y_hi - y_lo : 1.0;
    std::vector<double> out;
    out.reserve(new_bits.size() + buffered_bits.size() + 3);
    for (double v : new_bits) out.push_back(d1_max > 0 ? clamp01(v / d1_max) : 0.0);
    const double per_task_cap =
        cfg.obs_buffer_max_bits / std::max(1, cfg.num_tasks);
    for (double v : buffered_bits) out.push_back(clamp01(v / per_task_cap));
    out.push_back(static_cast<double>(channel_gain));
    out.push_back(clamp01((hash_power - p_lo) / p_span));
    out.push_back(clamp01((payment - y_lo) / y_span));
    return out;
}

int observation_feature_count(const SimConfig& cfg) { return 2 * cfg.num_tasks + 3; }

Environment::Environment(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
    cfg_.validate();
}

Observation Environment::observe(const MinerState& m) const {
    Observation o;
    o.new_bits.reserve(m.tasks.size());
    o.buffered_bits.reserve(m.tasks.size());
    for (const Task& t : m.tasks) {
        o.new_bits.push_back(t.new_bits);
        o.buffered_bits.push_back(t.buffered_bits);
    }
    o.channel_gain = m.channel.gain;
    o.hash_power = m.hash_power;
    o.payment = m.payment;
    return o;
}

std::vector<Observation> Environment::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    slot_ = 0;
    queue_ = ServerQueue{};
    miners_.assign(static_cast<std::size_t>(cfg_.num_miners), MinerState{});

    network_hash_ = rng_.uniform(cfg_.network_hash_range.min, cfg_.network_hash_range.max);
    for (MinerState& m : miners_) {
        m.hash_power = rng_.uniform(cfg_.miner_hash_range.min, cfg_.miner_hash_range.max);
        m.payment = cfg_.hash_price_tokens_per_hash_s * m.hash_power;
        m.channel = ChannelState{rng_.uniform() < 0.5 ? 0 : 1};
        m.tasks.clear();
        for (int k = 0; k < cfg_.num_tasks; ++k)
            m.tasks.push_back(generate_task(rng_, cfg_, 0.0));
    }
    ready_ = true;

    std::vector<Observation> obs;
    obs.reserve(miners_.size());
    for (const MinerState& m : miners_) obs.push_back(observe(m));
    return obs;
}

std::vector<StepOutcome> Environment::step(const std::vector<Action>& actions) {
    if (!ready_) throw std::logic_error("step: environment not reset");
    if (done()) throw std::logic_error("step: episode already finished");
    if (actions.size() != miners_.size())
        throw std::invalid_argument("step: one action per miner required");
    for (const Action& a : actions) {
        if (a.offload.size() != static_cast<std::size_t>(cfg_.num_tasks))
            throw std::invalid_argument("step: action vector length must equal num_tasks");
        for (int x : a.offload)
            if (x != 0 && x != 1) throw std::invalid_argument("step: offload bits must be 0 or 1");
    }

    // Common queue snapshot before this slot's arrivals.
    const ServerQueue snapshot = queue_;
    double cycles_added = 0.0;

    std::vector<StepOutcome> out(miners_.size());
    for (std::size_t n = 0; n < miners_.size(); ++n) {
        MinerState& m = miners_[n];
        StepOutcome& o = out[n];
        std::vector<double> offload_lat, local_lat, energies;
        o.deadline_violated.resize(m.tasks.size(), false);

        for (std::size_t k = 0; k < m.tasks.size(); ++k) {
            Task& t = m.tasks[k];
            const int x = actions[n].offload[k];
            double usage = usage_pattern_privacy(t, x, m.channel, cfg_);
            double location = location_privacy(t, x, m.channel);
            o.privacy += total_privacy(usage, location, cfg_);

            BranchCost bc;
            if (x == 1) {
                bc = offload_cost(t, snapshot, cfg_);
                offload_lat.push_back(bc.latency_s);
                cycles_added += t.total_bits() * t.cycles_per_bit;
                t.buffered_bits = 0.0; // offload clears the whole backlog
                t.new_bits = 0.0;
            } else {
                bc = local_cost(t, cfg_);
                local_lat.push_back(bc.latency_s);
                const double processed = std::min(t.total_bits(), cfg_.local_bit_budget_per_slot);
                t.buffered_bits = std::max(0.0, t.total_bits() - processed);
                t.new_bits = 0.0;
            }
            energies.push_back(bc.energy_j);
            o.energy_j += bc.energy_j;
            o.deadline_violated[k] = bc.latency_s > t.deadline_s;
        }

        o.latency_s = aggregate_latency(offload_lat, local_lat);
        o.cost = system_cost(energies, o.latency_s, cfg_);

        const double block_bits =
            rng_.uniform(cfg_.block_size_range_bits.min, cfg_.block_size_range_bits.max);
        o.mining_reward =
            mining_reward(m.hash_power, m.payment, block_bits, network_hash_, cfg_, &rng_);

        double r = cfg_.reward_scale_privacy * o.privacy - cfg_.reward_scale_cost * o.cost;
        if (cfg_.reward_mode == RewardMode::Eq17)
            r += cfg_.reward_scale_mining * o.mining_reward;
        if (cfg_.deadline_penalty > 0.0)
            for (bool v : o.deadline_violated)
                if (v) r -= cfg_.deadline_penalty;
        o.reward = r;
    }

    // Queue conservation: Q' = max(0, Q + added - F * slot_duration).
    queue_.pending_cycles = std::max(
        0.0, queue_.pending_cycles + cycles_added -
                 cfg_.mec_capacity_cycles_per_s * cfg_.slot_duration_s);

    for (MinerState& m : miners_) {
        m.channel = step_channel(m.channel, cfg_.channel_stay_prob, rng_);
        for (Task& t : m.tasks) {
            const Task next = generate_task(rng_, cfg_, t.buffered_bits);
            t = next;
        }
    }
    ++slot_;

    for (std::size_t n = 0; n < miners_.size(); ++n)
        out[n].next_observation = observe(miners_[n]);
    return out;
}

} // namespace mbo
