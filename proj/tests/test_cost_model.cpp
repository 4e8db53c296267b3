#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mbo/cost_model.hpp"
#include "mbo/env.hpp"

using namespace mbo;

namespace {

SimConfig defaults() { return SimConfig{}; }

Task make_task(double new_bits, double buffered_bits, const SimConfig& cfg) {
    Task t;
    t.new_bits = new_bits;
    t.buffered_bits = buffered_bits;
    t.cycles_per_bit = cfg.cycles_per_bit;
    t.deadline_s = cfg.deadline_s;
    return t;
}

} // namespace

TEST_CASE("uplink latency") {
    SimConfig cfg = defaults();
    cfg.uplink_rate_bits_per_s = 1e6;
    const Task t = make_task(640000, 160000, cfg);
    CHECK(uplink_latency(t, cfg) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("queuing latency") {
    const SimConfig cfg = defaults();
    CHECK(queuing_latency(ServerQueue{2e10}, cfg) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(queuing_latency(ServerQueue{1.44e10}, cfg) == doctest::Approx(1.44).epsilon(1e-12));
}

TEST_CASE("processing delay") {
    const SimConfig cfg = defaults();
    const Task t = make_task(8e5, 0, cfg);
    CHECK(processing_delay(t, cfg) == doctest::Approx(1.44).epsilon(1e-12));
}

TEST_CASE("offload branch cost") {
    SimConfig cfg = defaults();
    cfg.uplink_rate_bits_per_s = 1e6;
    const Task t = make_task(640000, 160000, cfg);
    const BranchCost c = offload_cost(t, ServerQueue{0.0}, cfg);
    CHECK(c.latency_s == doctest::Approx(0.8 + 1.44).epsilon(1e-12));
    // transmit 0.5 W * 0.8 s + processing 1e-26 * (1e10)^3 * 1.44 s + idle circuit term
    CHECK(c.energy_j == doctest::Approx(0.5 * 0.8 + 1.44e4).epsilon(1e-12));
}

TEST_CASE("local branch cost") {
    const SimConfig cfg = defaults();
    const Task t = make_task(8e5, 0, cfg);
    const BranchCost c = local_cost(t, cfg);
    CHECK(c.latency_s == doctest::Approx(0.38).epsilon(1e-12));
    CHECK(c.energy_j == doctest::Approx(0.26).epsilon(1e-12));
}

TEST_CASE("usage pattern privacy") {
    const SimConfig cfg = defaults();
    const Task t = make_task(640000, 160000, cfg);
    CHECK(usage_pattern_privacy(t, 1, ChannelState{1}, cfg) ==
          doctest::Approx(640000).epsilon(1e-12));
    CHECK(usage_pattern_privacy(t, 0, ChannelState{1}, cfg) ==
          doctest::Approx(160000).epsilon(1e-12));
    CHECK(usage_pattern_privacy(t, 1, ChannelState{0}, cfg) == 0.0);
}

TEST_CASE("location privacy") {
    const SimConfig cfg = defaults();
    const Task t = make_task(640000, 160000, cfg);
    CHECK(location_privacy(t, 1, ChannelState{0}) == 1.0);
    CHECK(location_privacy(t, 1, ChannelState{1}) == 0.0);
    CHECK(location_privacy(t, 0, ChannelState{0}) == 0.0);
    const Task empty = make_task(0, 0, cfg);
    CHECK(location_privacy(empty, 1, ChannelState{0}) == 0.0);
}

TEST_CASE("privacy branches are mutually exclusive") {
    const SimConfig cfg = defaults();
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Task t = make_task(rng.uniform(0, 1e6), rng.uniform(0, 1e6), cfg);
        const int x = rng.bernoulli(0.5) ? 1 : 0;
        const ChannelState g{rng.bernoulli(0.5) ? 1 : 0};
        const double usage = usage_pattern_privacy(t, x, g, cfg);
        const double location = location_privacy(t, x, g);
        CHECK((usage == 0.0 || location == 0.0));
    }
}

TEST_CASE("total privacy") {
    const SimConfig cfg = defaults();
    CHECK(total_privacy(640000, 0, cfg) == doctest::Approx(640000).epsilon(1e-12));
    CHECK(total_privacy(0, 1, cfg) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mining reward, expected mode") {
    const SimConfig cfg = defaults();
    const double mu = 6e7 / 1e13;
    CHECK(mu == doctest::Approx(6e-6).epsilon(1e-12));
    // block propagates in 5 s: 80000 bits at 6.25e-5 s/bit
    const double expected = 30.0 * mu * std::exp(-(1.0 / 600.0) * 5.0);
    CHECK(mining_reward(6e7, 0.0, 80000, 1e13, cfg) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(1.785e-4).epsilon(1e-3));
}

TEST_CASE("mining reward, sampled mode matches win probability") {
    SimConfig cfg = defaults();
    cfg.mining_mode = MiningMode::Sampled;
    Rng rng(99);
    const double p_win = 0.3;
    // choose hash power so mu * exp(...) == p_win with zero propagation
    const double hash = p_win * 1e13;
    int wins = 0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i)
        if (mining_reward(hash, 0.0, 0.0, 1e13, cfg, &rng) > 0.0) ++wins;
    CHECK(static_cast<double>(wins) / draws == doctest::Approx(p_win).epsilon(0.02));
    CHECK_THROWS(mining_reward(hash, 0.0, 0.0, 1e13, cfg, nullptr));
}

TEST_CASE("aggregate latency") {
    const std::vector<double> offload{2.24};
    const std::vector<double> local{0.38};
    CHECK(aggregate_latency(offload, local) == doctest::Approx(2.24).epsilon(1e-12));
    CHECK(aggregate_latency({}, {}) == 0.0);
}

TEST_CASE("system cost") {
    SimConfig cfg = defaults();
    cfg.beta = 0.5;
    cfg.cost_scale_energy = 1.0;
    cfg.cost_scale_latency = 1.0;
    const std::vector<double> energies{0.26};
    CHECK(system_cost(energies, 0.38, cfg) == doctest::Approx(0.32).epsilon(1e-12));
}

TEST_CASE("channel stay probability") {
    const double stay = 0.95;
    Rng rng(5);
    int stayed = 0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i)
        if (step_channel(ChannelState{1}, stay, rng).gain == 1) ++stayed;
    CHECK(static_cast<double>(stayed) / draws == doctest::Approx(0.95).epsilon(0.005));
}

TEST_CASE("task generation") {
    const SimConfig cfg = defaults();
    Rng rng(3);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Task t = generate_task(rng, cfg, 0.0);
        CHECK(t.new_bits >= cfg.task_size_range_bits.min);
        CHECK(t.new_bits <= cfg.task_size_range_bits.max);
        sum += t.new_bits;
    }
    const double mean_bits = sum / draws;
    CHECK(mean_bits == doctest::Approx(100.0e3 * 8).epsilon(0.02));

    const Task carried = generate_task(rng, cfg, 12345.0);
    CHECK(carried.buffered_bits == 12345.0);
    CHECK(carried.cycles_per_bit == cfg.cycles_per_bit);
    CHECK(carried.deadline_s == cfg.deadline_s);
}
