#ifndef MBO_EPISODE_HPP
#define MBO_EPISODE_HPP

#include <string>
#include <vector>

#include "mbo/dqn.hpp"
#include "mbo/env.hpp"
#include "mbo/metrics.hpp"
#include "mbo/qlearn.hpp"

namespace mbo {

enum class PolicyKind { NO, EO, RANDOM, RLO, DRLO };

PolicyKind policy_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

// Each runner resets the environment with the given seed, plays a full
// episode and returns system-wide per-slot series (sums over miners;
// latency is the per-miner mean). Learners mutate their tables/agents,
// one independent learner per miner.
EpisodeMetrics baseline_episode(Environment& env, PolicyKind kind, std::uint64_t seed);
EpisodeMetrics rlo_episode(Environment& env, std::vector<QTable>& tables,
                           const EpsilonSchedule& schedule, std::uint64_t seed);
EpisodeMetrics drlo_episode(Environment& env, std::vector<DqnAgent>& agents,
                            const EpsilonSchedule& schedule, std::uint64_t seed);

// Builds fresh learners as needed and dispatches on kind.
EpisodeMetrics run_policy(Environment& env, PolicyKind kind, std::uint64_t seed);

} // namespace mbo

#endif
