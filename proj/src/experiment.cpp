#include "mbo/experiment.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <mutex>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mbo/malloc_tuning.hpp"
#include "mbo/qlearn.hpp"

namespace mbo {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

SimConfig SweepPoint::resolve(const SimConfig& base, bool scale_budget) const {
    SimConfig cfg = base;
    cfg.beta = beta;
    cfg.num_miners = num_miners;
    cfg.num_tasks = num_tasks;
    if (scale_budget) {
        const double mean_bits = task_mean_kb * 8000.0;
        cfg.task_size_range_bits = Range{0.5 * mean_bits, 1.5 * mean_bits};
        cfg.local_bit_budget_per_slot = 0.8 * mean_bits;
    }
    return cfg;
}

std::vector<SweepPoint> ExperimentSpec::points() const {
    const std::vector<double> betas = beta_axis.empty() ? std::vector<double>{base.beta} : beta_axis;
    const std::vector<int> miners =
        miners_axis.empty() ? std::vector<int>{base.num_miners} : miners_axis;
    const std::vector<int> tasks = tasks_axis.empty() ? std::vector<int>{base.num_tasks} : tasks_axis;
    const double base_mean_kb =
        (base.task_size_range_bits.min + base.task_size_range_bits.max) / 2.0 / 8000.0;
    const std::vector<double> sizes =
        task_mean_kb_axis.empty() ? std::vector<double>{base_mean_kb} : task_mean_kb_axis;

    std::vector<SweepPoint> out;
    int idx = 0;
    for (double b : betas)
        for (int n : miners)
            for (int m : tasks)
                for (double s : sizes) out.push_back(SweepPoint{idx++, b, n, m, s});
    return out;
}

void ExperimentSpec::validate() const {
    check(!policies.empty(), "policies", "must name at least one policy");
    check(runs_per_point >= 1, "runs_per_point", "must be at least 1");
    check(threads >= 1, "threads", "must be at least 1");
    check(!out_dir.empty(), "out_dir", "must be non-empty");
    for (const SweepPoint& p : points())
        p.resolve(base, !task_mean_kb_axis.empty()).validate();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& why) {
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + why);
}

double parse_number(const std::string& v, const std::string& origin, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        parse_fail(origin, line, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& origin, int line) {
    const double x = parse_number(v, origin, line);
    if (x != std::floor(x)) parse_fail(origin, line, "expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

} // namespace

// Resolved configuration echoed into the manifest, keyed exactly like the
// config file so a manifest can be turned back into a spec. Execution-only
// keys (threads, out_dir) are omitted so output bytes do not depend on them.
nlohmann::json config_echo(const ExperimentSpec& spec) {
    const SimConfig& c = spec.base;
    nlohmann::json j;
    j["num_miners"] = c.num_miners;
    j["num_tasks"] = c.num_tasks;
    j["total_slots"] = c.total_slots;
    j["slot_duration_s"] = c.slot_duration_s;
    j["uplink_rate_bits_per_s"] = c.uplink_rate_bits_per_s;
    j["mec_capacity_cycles_per_s"] = c.mec_capacity_cycles_per_s;
    j["cycles_per_bit"] = c.cycles_per_bit;
    j["deadline_s"] = c.deadline_s;
    j["local_time_s_per_bit"] = c.local_time_s_per_bit;
    j["local_energy_j_per_bit"] = c.local_energy_j_per_bit;
    j["miner_tx_power_w"] = c.miner_tx_power_w;
    j["mec_circuit_power_w"] = c.mec_circuit_power_w;
    j["mec_energy_coeff"] = c.mec_energy_coeff;
    j["channel_good_threshold"] = c.channel_good_threshold;
    j["channel_stay_prob"] = c.channel_stay_prob;
    j["privacy_location_weight"] = c.privacy_location_weight;
    j["task_size_range_bits"] = {c.task_size_range_bits.min, c.task_size_range_bits.max};
    j["block_size_range_bits"] = {c.block_size_range_bits.min, c.block_size_range_bits.max};
    j["miner_hash_range"] = {c.miner_hash_range.min, c.miner_hash_range.max};
    j["network_hash_range"] = {c.network_hash_range.min, c.network_hash_range.max};
    j["mining_reward_tokens"] = c.mining_reward_tokens;
    j["orphan_rate_eta"] = c.orphan_rate_eta;
    j["propagation_s_per_bit"] = c.propagation_s_per_bit;
    j["hash_price_tokens_per_hash_s"] = c.hash_price_tokens_per_hash_s;
    j["mining_mode"] = c.mining_mode == MiningMode::Expected ? "expected" : "sampled";
    j["beta"] = c.beta;
    j["reward_mode"] = c.reward_mode == RewardMode::Eq17 ? "eq17" : "eq21";
    j["reward_scale_privacy"] = c.reward_scale_privacy;
    j["reward_scale_mining"] = c.reward_scale_mining;
    j["reward_scale_cost"] = c.reward_scale_cost;
    j["cost_scale_energy"] = c.cost_scale_energy;
    j["cost_scale_latency"] = c.cost_scale_latency;
    j["deadline_penalty"] = c.deadline_penalty;
    j["local_bit_budget_per_slot"] = c.local_bit_budget_per_slot;
    j["obs_buffer_max_bits"] = c.obs_buffer_max_bits;
    j["state_bins"] = c.state_bins;
    j["hash_bins"] = c.hash_bins;
    j["qtable_learning_rate"] = c.qtable_learning_rate;
    j["discount"] = c.discount;
    j["dqn_learning_rate"] = c.dqn_learning_rate;
    j["dqn_batch_size"] = c.dqn_batch_size;
    j["replay_capacity"] = c.replay_capacity;
    j["target_sync_period"] = c.target_sync_period;
    j["dqn_hidden_sizes"] = c.dqn_hidden_sizes;
    j["action_head"] = c.action_head == ActionHead::Joint ? "joint" : "relaxed";
    j["epsilon_start"] = c.epsilon_start;
    j["epsilon_end"] = c.epsilon_end;
    j["epsilon_decay_slots"] = c.epsilon_decay_slots;
    j["seed"] = c.rng_seed;
    std::vector<std::string> policies;
    for (PolicyKind p : spec.policies) policies.push_back(to_string(p));
    j["policies"] = policies;
    j["sweep_beta"] = spec.beta_axis;
    j["sweep_miners"] = spec.miners_axis;
    j["sweep_tasks"] = spec.tasks_axis;
    j["sweep_task_kb"] = spec.task_mean_kb_axis;
    j["runs_per_point"] = spec.runs_per_point;
    j["write_series"] = spec.write_series;
    return j;
}

ExperimentSpec parse_config(const std::string& text, const std::string& origin) {
    ExperimentSpec spec;
    SimConfig& c = spec.base;

    using Setter = std::function<void(const std::string&, int)>;
    std::map<std::string, Setter> keys;
    auto num = [&](const std::string& k, double& field) {
        keys[k] = [&field, origin](const std::string& v, int ln) {
            field = parse_number(v, origin, ln);
        };
    };
    auto integer = [&](const std::string& k, int& field) {
        keys[k] = [&field, origin](const std::string& v, int ln) {
            field = parse_int(v, origin, ln);
        };
    };
    auto range = [&](const std::string& k, Range& field) {
        keys[k] = [&field, origin](const std::string& v, int ln) {
            const auto parts = split_list(v);
            if (parts.size() != 2) parse_fail(origin, ln, "expected 'min,max'");
            field = Range{parse_number(parts[0], origin, ln), parse_number(parts[1], origin, ln)};
        };
    };

    integer("num_miners", c.num_miners);
    integer("num_tasks", c.num_tasks);
    integer("total_slots", c.total_slots);
    num("slot_duration_s", c.slot_duration_s);
    num("uplink_rate_bits_per_s", c.uplink_rate_bits_per_s);
    num("mec_capacity_cycles_per_s", c.mec_capacity_cycles_per_s);
    num("cycles_per_bit", c.cycles_per_bit);
    num("deadline_s", c.deadline_s);
    num("local_time_s_per_bit", c.local_time_s_per_bit);
    num("local_energy_j_per_bit", c.local_energy_j_per_bit);
    num("miner_tx_power_w", c.miner_tx_power_w);
    num("mec_circuit_power_w", c.mec_circuit_power_w);
    num("mec_energy_coeff", c.mec_energy_coeff);
    num("channel_good_threshold", c.channel_good_threshold);
    num("channel_stay_prob", c.channel_stay_prob);
    num("privacy_location_weight", c.privacy_location_weight);
    range("task_size_range_bits", c.task_size_range_bits);
    range("block_size_range_bits", c.block_size_range_bits);
    range("miner_hash_range", c.miner_hash_range);
    range("network_hash_range", c.network_hash_range);
    num("mining_reward_tokens", c.mining_reward_tokens);
    num("orphan_rate_eta", c.orphan_rate_eta);
    num("propagation_s_per_bit", c.propagation_s_per_bit);
    num("hash_price_tokens_per_hash_s", c.hash_price_tokens_per_hash_s);
    num("beta", c.beta);
    num("reward_scale_privacy", c.reward_scale_privacy);
    num("reward_scale_mining", c.reward_scale_mining);
    num("reward_scale_cost", c.reward_scale_cost);
    num("cost_scale_energy", c.cost_scale_energy);
    num("cost_scale_latency", c.cost_scale_latency);
    num("deadline_penalty", c.deadline_penalty);
    num("local_bit_budget_per_slot", c.local_bit_budget_per_slot);
    num("obs_buffer_max_bits", c.obs_buffer_max_bits);
    integer("state_bins", c.state_bins);
    integer("hash_bins", c.hash_bins);
    num("qtable_learning_rate", c.qtable_learning_rate);
    num("discount", c.discount);
    num("dqn_learning_rate", c.dqn_learning_rate);
    integer("dqn_batch_size", c.dqn_batch_size);
    integer("replay_capacity", c.replay_capacity);
    integer("target_sync_period", c.target_sync_period);
    num("epsilon_start", c.epsilon_start);
    num("epsilon_end", c.epsilon_end);
    integer("epsilon_decay_slots", c.epsilon_decay_slots);

    keys["dqn_hidden_sizes"] = [&c, origin](const std::string& v, int ln) {
        c.dqn_hidden_sizes.clear();
        for (const auto& p : split_list(v)) c.dqn_hidden_sizes.push_back(parse_int(p, origin, ln));
    };
    keys["reward_mode"] = [&c, origin](const std::string& v, int ln) {
        if (v == "eq17") c.reward_mode = RewardMode::Eq17;
        else if (v == "eq21") c.reward_mode = RewardMode::Eq21;
        else parse_fail(origin, ln, "reward_mode must be eq17 or eq21");
    };
    keys["mining_mode"] = [&c, origin](const std::string& v, int ln) {
        if (v == "expected") c.mining_mode = MiningMode::Expected;
        else if (v == "sampled") c.mining_mode = MiningMode::Sampled;
        else parse_fail(origin, ln, "mining_mode must be expected or sampled");
    };
    keys["action_head"] = [&c, origin](const std::string& v, int ln) {
        if (v == "joint") c.action_head = ActionHead::Joint;
        else if (v == "relaxed") c.action_head = ActionHead::Relaxed;
        else parse_fail(origin, ln, "action_head must be joint or relaxed");
    };
    keys["seed"] = [&c, origin](const std::string& v, int ln) {
        c.rng_seed = static_cast<std::uint64_t>(parse_number(v, origin, ln));
    };
    keys["policies"] = [&spec, origin](const std::string& v, int ln) {
        spec.policies.clear();
        for (const auto& p : split_list(v)) {
            try {
                spec.policies.push_back(policy_from_string(p));
            } catch (const std::exception& e) {
                parse_fail(origin, ln, e.what());
            }
        }
    };
    keys["sweep_beta"] = [&spec, origin](const std::string& v, int ln) {
        spec.beta_axis.clear();
        for (const auto& p : split_list(v)) spec.beta_axis.push_back(parse_number(p, origin, ln));
    };
    keys["sweep_miners"] = [&spec, origin](const std::string& v, int ln) {
        spec.miners_axis.clear();
        for (const auto& p : split_list(v)) spec.miners_axis.push_back(parse_int(p, origin, ln));
    };
    keys["sweep_tasks"] = [&spec, origin](const std::string& v, int ln) {
        spec.tasks_axis.clear();
        for (const auto& p : split_list(v)) spec.tasks_axis.push_back(parse_int(p, origin, ln));
    };
    keys["sweep_task_kb"] = [&spec, origin](const std::string& v, int ln) {
        spec.task_mean_kb_axis.clear();
        for (const auto& p : split_list(v))
            spec.task_mean_kb_axis.push_back(parse_number(p, origin, ln));
    };
    keys["runs_per_point"] = [&spec, origin](const std::string& v, int ln) {
        spec.runs_per_point = parse_int(v, origin, ln);
    };
    keys["threads"] = [&spec, origin](const std::string& v, int ln) {
        spec.threads = parse_int(v, origin, ln);
    };
    keys["write_series"] = [&spec, origin](const std::string& v, int ln) {
        if (v == "true" || v == "1") spec.write_series = true;
        else if (v == "false" || v == "0") spec.write_series = false;
        else parse_fail(origin, ln, "write_series must be true or false");
    };
    keys["out_dir"] = [&spec](const std::string& v, int) { spec.out_dir = v; };

    std::stringstream ss(text);
    std::string line;
    int ln = 0;
    while (std::getline(ss, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(origin, ln, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) parse_fail(origin, ln, "unknown key '" + key + "'");
        it->second(value, ln);
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

RunSummary summarize_run(const EpisodeMetrics& m) {
    RunSummary s;
    const std::size_t final_window = std::min<std::size_t>(1000, m.slots());
    s.reward_mean = mean(m.reward);
    s.reward_final = mean_tail(m.reward, final_window);
    s.privacy_mean = mean(m.privacy);
    s.privacy_final = mean_tail(m.privacy, final_window);
    s.mining_mean = mean(m.mining_reward);
    s.latency_mean = mean(m.latency_s);
    s.latency_final = mean_tail(m.latency_s, final_window);
    s.energy_mean = mean(m.energy_j);
    s.energy_final = mean_tail(m.energy_j, final_window);
    s.cost_mean = mean(m.cost);
    s.cost_final = mean_tail(m.cost, final_window);
    double viol = 0.0;
    for (int v : m.deadline_violations) viol += v;
    s.violation_rate = viol / static_cast<double>(m.slots());
    const std::size_t window = std::min<std::size_t>(200, m.slots());
    const std::size_t tail = std::min<std::size_t>(1000, m.slots());
    s.convergence_slot = convergence_slot(m.reward, window, tail);
    return s;
}

namespace {

constexpr std::array<double RunSummary::*, 12> kSummaryFields = {
    &RunSummary::reward_mean,   &RunSummary::reward_final, &RunSummary::privacy_mean,
    &RunSummary::privacy_final, &RunSummary::mining_mean,  &RunSummary::latency_mean,
    &RunSummary::latency_final, &RunSummary::energy_mean,  &RunSummary::energy_final,
    &RunSummary::cost_mean,     &RunSummary::cost_final,   &RunSummary::violation_rate};

PointAggregate aggregate_runs(const SweepPoint& point, PolicyKind policy,
                              const std::vector<RunSummary>& runs) {
    PointAggregate agg;
    agg.point = point;
    agg.policy = policy;
    agg.runs = static_cast<int>(runs.size());
    const double n = static_cast<double>(runs.size());
    for (double RunSummary::*f : kSummaryFields) {
        double m = 0.0;
        for (const RunSummary& r : runs) m += r.*f;
        m /= n;
        double var = 0.0;
        for (const RunSummary& r : runs) var += (r.*f - m) * (r.*f - m);
        agg.mean.*f = m;
        agg.stddev.*f = std::sqrt(var / n);
    }
    double conv_sum = 0.0;
    for (const RunSummary& r : runs) {
        if (r.convergence_slot < 0) continue;
        ++agg.converged_runs;
        conv_sum += static_cast<double>(r.convergence_slot);
    }
    agg.mean.convergence_slot =
        agg.converged_runs > 0 ? static_cast<long>(conv_sum / agg.converged_runs) : -1;
    return agg;
}

const char* kSeriesHeader =
    "slot,reward,privacy,mining_reward,latency_s,energy_j,cost,deadline_violations";

const char* kAggregateHeader =
    "point,policy,beta,num_miners,num_tasks,task_mean_kb,runs,converged_runs,"
    "convergence_slot_mean,reward_mean,reward_mean_std,reward_final,reward_final_std,"
    "privacy_mean,privacy_mean_std,privacy_final,privacy_final_std,"
    "mining_mean,mining_mean_std,latency_mean,latency_mean_std,"
    "latency_final,latency_final_std,energy_mean,energy_mean_std,"
    "energy_final,energy_final_std,cost_mean,cost_mean_std,cost_final,cost_final_std,"
    "violation_rate,violation_rate_std";

void write_series_csv(const fs::path& path, const EpisodeMetrics& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kSeriesHeader << "\r\n";
    for (std::size_t t = 0; t < m.slots(); ++t) {
        out << t << ',' << format_double(m.reward[t]) << ',' << format_double(m.privacy[t]) << ','
            << format_double(m.mining_reward[t]) << ',' << format_double(m.latency_s[t]) << ','
            << format_double(m.energy_j[t]) << ',' << format_double(m.cost[t]) << ','
            << m.deadline_violations[t] << "\r\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string aggregate_row(const PointAggregate& a) {
    std::ostringstream row;
    row << a.point.index << ',' << to_string(a.policy) << ',' << format_double(a.point.beta) << ','
        << a.point.num_miners << ',' << a.point.num_tasks << ','
        << format_double(a.point.task_mean_kb) << ',' << a.runs << ',' << a.converged_runs << ','
        << a.mean.convergence_slot;
    for (double RunSummary::*f : kSummaryFields)
        row << ',' << format_double(a.mean.*f) << ',' << format_double(a.stddev.*f);
    return row.str();
}

} // namespace

std::vector<PointAggregate> run_experiment(const ExperimentSpec& spec) {
    tune_malloc();
    spec.validate();
    const std::vector<SweepPoint> points = spec.points();
    const bool scale_budget = !spec.task_mean_kb_axis.empty();

    struct Cell {
        SweepPoint point;
        PolicyKind policy;
        int cell_index;
    };
    std::vector<Cell> cells;
    for (const SweepPoint& p : points)
        for (std::size_t k = 0; k < spec.policies.size(); ++k)
            cells.push_back(
                Cell{p, spec.policies[k],
                     p.index * static_cast<int>(spec.policies.size()) + static_cast<int>(k)});

    struct RunResult {
        EpisodeMetrics metrics;
        RunSummary summary;
        std::uint64_t seed = 0;
    };
    std::vector<RunResult> results(cells.size() * static_cast<std::size_t>(spec.runs_per_point));

    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= results.size() || failed.load()) return;
            const Cell& cell = cells[i / static_cast<std::size_t>(spec.runs_per_point)];
            const int run = static_cast<int>(i % static_cast<std::size_t>(spec.runs_per_point));
            try {
                const SimConfig cfg = cell.point.resolve(spec.base, scale_budget);
                Environment env(cfg);
                const std::uint64_t seed =
                    derive_seed(spec.base.rng_seed, static_cast<std::uint64_t>(cell.cell_index),
                                static_cast<std::uint64_t>(run));
                RunResult& r = results[i];
                r.seed = seed;
                r.metrics = run_policy(env, cell.policy, seed);
                r.summary = summarize_run(r.metrics);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                return;
            }
        }
    };
    if (spec.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < spec.threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("experiment run failed: " + failure);

    const fs::path out_dir(spec.out_dir);
    fs::create_directories(out_dir / "runs");

    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["series_columns"] = kSeriesHeader;
    manifest["aggregate_columns"] = kAggregateHeader;
    manifest["runs_per_point"] = spec.runs_per_point;
    manifest["seed"] = spec.base.rng_seed;
    manifest["total_slots"] = spec.base.total_slots;
    manifest["config"] = config_echo(spec);

    std::ofstream agg_out(out_dir / "aggregate.csv", std::ios::binary);
    if (!agg_out) throw std::runtime_error("cannot write aggregate.csv");
    agg_out << kAggregateHeader << "\r\n";

    std::vector<PointAggregate> aggregates;
    nlohmann::json runs_json = nlohmann::json::array();
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        std::vector<RunSummary> summaries;
        for (int j = 0; j < spec.runs_per_point; ++j) {
            const RunResult& r =
                results[ci * static_cast<std::size_t>(spec.runs_per_point) +
                        static_cast<std::size_t>(j)];
            summaries.push_back(r.summary);
            std::ostringstream name;
            name << "point" << cell.point.index << '_' << to_string(cell.policy) << "_run" << j
                 << ".csv";
            if (spec.write_series) write_series_csv(out_dir / "runs" / name.str(), r.metrics);
            nlohmann::json rj;
            rj["point"] = cell.point.index;
            rj["policy"] = to_string(cell.policy);
            rj["run"] = j;
            rj["seed"] = r.seed;
            if (spec.write_series) rj["series"] = "runs/" + name.str();
            runs_json.push_back(std::move(rj));
        }
        const PointAggregate agg = aggregate_runs(cell.point, cell.policy, summaries);
        agg_out << aggregate_row(agg) << "\r\n";
        aggregates.push_back(agg);
    }
    if (!agg_out) throw std::runtime_error("write failed: aggregate.csv");
    manifest["runs"] = std::move(runs_json);

    std::ofstream man_out(out_dir / "manifest.json", std::ios::binary);
    if (!man_out) throw std::runtime_error("cannot write manifest.json");
    man_out << manifest.dump(2) << '\n';
    if (!man_out) throw std::runtime_error("write failed: manifest.json");
    return aggregates;
}

void summarize(const fs::path& results_dir) {
    std::vector<fs::path> inputs;
    if (fs::exists(results_dir / "aggregate.csv")) inputs.push_back(results_dir / "aggregate.csv");
    for (const auto& entry : fs::directory_iterator(results_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "aggregate.csv"))
            inputs.push_back(entry.path() / "aggregate.csv");
    if (inputs.empty()) throw std::runtime_error("no aggregate.csv found under " +
                                                 results_dir.string());

    std::vector<std::string> rows;
    std::string header;
    for (const fs::path& p : inputs) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + p.string());
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty aggregate: " + p.string());
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header.empty()) header = line;
        else if (header != line)
            throw std::runtime_error("mismatched aggregate columns in " + p.string());
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) rows.push_back(line);
        }
    }

    std::ofstream out(results_dir / "summary.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.csv");
    out << header << "\r\n";
    for (const std::string& r : rows) out << r << "\r\n";
    if (!out) throw std::runtime_error("write failed: summary.csv");
}

} // namespace mbo
