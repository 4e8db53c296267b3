#ifndef MBO_EXPERIMENT_HPP
#define MBO_EXPERIMENT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mbo/config.hpp"
#include "mbo/episode.hpp"
#include "mbo/metrics.hpp"

namespace mbo {

// One cell of the sweep grid with the axis values substituted in.
struct SweepPoint {
    int index = 0;
    double beta = 0.5;
    int num_miners = 1;
    int num_tasks = 2;
    double task_mean_kb = 100.0; // mean task size driven by the size axis

    SimConfig resolve(const SimConfig& base, bool scale_budget) const;
};

struct ExperimentSpec {
    SimConfig base;
    std::vector<PolicyKind> policies{PolicyKind::DRLO};
    std::vector<double> beta_axis;      // empty = use base value
    std::vector<int> miners_axis;
    std::vector<int> tasks_axis;
    std::vector<double> task_mean_kb_axis;
    int runs_per_point = 50;
    int threads = 1;
    bool write_series = true;
    std::string out_dir = "out";

    std::vector<SweepPoint> points() const;
    void validate() const;
};

// Plain key=value file, '#' comments, unknown keys rejected with the line
// number; missing keys keep defaults. Lists are comma separated.
ExperimentSpec load_config(const std::filesystem::path& path);
ExperimentSpec parse_config(const std::string& text, const std::string& origin = "<string>");

// Scalar summaries of one finished run.
// The *_mean fields average the whole episode; the *_final fields average the
// final 1000 slots (whole series if shorter), i.e. trained-policy behavior
// after the exploration transient.
struct RunSummary {
    double reward_mean = 0.0;
    double reward_final = 0.0;
    double privacy_mean = 0.0;
    double privacy_final = 0.0;
    double mining_mean = 0.0;
    double latency_mean = 0.0;
    double latency_final = 0.0;
    double energy_mean = 0.0;
    double energy_final = 0.0;
    double cost_mean = 0.0;
    double cost_final = 0.0;
    double violation_rate = 0.0;
    long convergence_slot = -1;
};

RunSummary summarize_run(const EpisodeMetrics& m);

// Aggregate over runs of one (point, policy) cell; written to aggregate.csv.
struct PointAggregate {
    SweepPoint point;
    PolicyKind policy = PolicyKind::NO;
    int runs = 0;
    RunSummary mean;   // means over runs
    RunSummary stddev; // population standard deviations over runs
    int converged_runs = 0;
};

// Executes every point x policy x run, writes per-run series CSVs,
// aggregate.csv and manifest.json under spec.out_dir. Deterministic in the
// spec regardless of thread count. Returns the aggregates in written order.
std::vector<PointAggregate> run_experiment(const ExperimentSpec& spec);

// Re-emits aggregate rows from a results directory as summary.csv, grouped
// per point across policies; rejects inputs with mismatched columns.
void summarize(const std::filesystem::path& results_dir);

std::string format_double(double v); // shortest round-trip decimal form

} // namespace mbo

#endif
