#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbo/experiment.hpp"
#include "mbo/metrics.hpp"
#include "mbo/qlearn.hpp"

using namespace mbo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("mbo_harness_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

// Lines of a CRLF csv without the trailing empty entry.
std::vector<std::string> csv_lines(const fs::path& p) {
    std::vector<std::string> lines;
    for (std::string& l : split(slurp(p), '\n')) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        if (!l.empty()) lines.push_back(l);
    }
    return lines;
}

} // namespace

TEST_CASE("config parsing: defaults survive an empty file") {
    const ExperimentSpec spec = parse_config("", "empty");
    CHECK(spec.base.beta == doctest::Approx(0.5));
    CHECK(spec.base.total_slots == 8000);
    CHECK(spec.base.discount == doctest::Approx(0.85));
    CHECK(spec.base.num_tasks == 2);
    CHECK(spec.runs_per_point == 50);
    CHECK(spec.policies.size() == 1);
    CHECK(spec.policies[0] == PolicyKind::DRLO);
}

TEST_CASE("config parsing: comments and blank lines are ignored") {
    const ExperimentSpec spec = parse_config("# comment\n\nbeta = 0.7\n  # indented comment\n");
    CHECK(spec.base.beta == doctest::Approx(0.7));
}

TEST_CASE("config parsing: unknown key is rejected with origin and line") {
    try {
        parse_config("beta = 0.5\nfo = 1\n", "myfile.cfg");
        FAIL("expected parse error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("myfile.cfg:2") != std::string::npos);
        CHECK(msg.find("fo") != std::string::npos);
    }
}

TEST_CASE("config parsing: malformed value reports its line") {
    try {
        parse_config("total_slots = ten\n", "bad.cfg");
        FAIL("expected parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("bad.cfg:1") != std::string::npos);
    }
}

TEST_CASE("config parsing: out-of-range beta is rejected") {
    CHECK_THROWS_AS(parse_config("beta = 1.5\n"), std::invalid_argument);
}

TEST_CASE("config parsing: lists and enums") {
    const ExperimentSpec spec = parse_config(
        "policies = no, eo, random, rlo, drlo\n"
        "sweep_beta = 0.2, 0.8\n"
        "reward_mode = eq17\n"
        "mining_mode = sampled\n"
        "dqn_hidden_sizes = 16, 8\n");
    CHECK(spec.policies.size() == 5);
    CHECK(spec.beta_axis == std::vector<double>{0.2, 0.8});
    CHECK(spec.base.reward_mode == RewardMode::Eq17);
    CHECK(spec.base.mining_mode == MiningMode::Sampled);
    CHECK(spec.base.dqn_hidden_sizes == std::vector<int>{16, 8});
}

TEST_CASE("convergence detector hand examples") {
    // Constant series settles immediately.
    std::vector<double> flat(3000, 2.0);
    CHECK(convergence_slot(flat) == 0);

    // Noisy (mean 0.75) until slot 2500, exactly flat at 1.0 after: windows
    // holding more than 40 noise slots fall outside the 5% band, so the
    // earliest stable start lands in [2460, 2600].
    std::vector<double> series(5000, 1.0);
    for (std::size_t t = 0; t < 2500; ++t) series[t] = (t % 2 == 0) ? 10.0 : -8.5;
    const long c = convergence_slot(series);
    CHECK(c >= 2400);
    CHECK(c <= 2600);

    // A series that never settles near its own tail mean reports -1.
    std::vector<double> diverging(3000);
    for (std::size_t t = 0; t < diverging.size(); ++t)
        diverging[t] = static_cast<double>(t);
    CHECK(convergence_slot(diverging) == -1);

    // Too short for the final window.
    CHECK(convergence_slot(std::vector<double>(100, 1.0)) == -1);
}

TEST_CASE("experiment outputs: row counts, schema, determinism, aggregates") {
    const std::string cfg_text =
        "policies = no, random\n"
        "runs_per_point = 2\n"
        "total_slots = 10\n"
        "write_series = true\n"
        "seed = 42\n";

    const fs::path dir_a = temp_dir("a");
    ExperimentSpec spec = parse_config(cfg_text);
    spec.out_dir = (dir_a / "out").string();
    run_experiment(spec);

    const std::vector<std::string> agg = csv_lines(dir_a / "out" / "aggregate.csv");
    REQUIRE(agg.size() == 3); // header + one row per (point, policy) cell
    CHECK(agg[0].substr(0, 12) == "point,policy");
    const std::size_t columns = split(agg[0], ',').size();
    CHECK(split(agg[1], ',').size() == columns);

    const std::vector<std::string> series =
        csv_lines(dir_a / "out" / "runs" / "point0_no_run0.csv");
    REQUIRE(series.size() == 11); // header + one row per slot
    CHECK(series[0] ==
          "slot,reward,privacy,mining_reward,latency_s,energy_j,cost,deadline_violations");
    CHECK(fs::exists(dir_a / "out" / "runs" / "point0_random_run1.csv"));

    // Aggregate means must be recomputable from the series files.
    double reward_sum = 0.0;
    for (int run = 0; run < 2; ++run) {
        const fs::path p = dir_a / "out" / "runs" /
                           ("point0_no_run" + std::to_string(run) + ".csv");
        const std::vector<std::string> rows = csv_lines(p);
        std::vector<double> reward;
        for (std::size_t i = 1; i < rows.size(); ++i)
            reward.push_back(std::stod(split(rows[i], ',')[1]));
        reward_sum += mean(reward);
    }
    const std::vector<std::string> no_row = split(agg[1], ',');
    CHECK(no_row[1] == "no");
    CHECK(std::stod(no_row[9]) == doctest::Approx(reward_sum / 2.0).epsilon(1e-12));

    // Re-running the same spec, and running it with several threads, must
    // produce byte-identical files.
    const fs::path dir_b = temp_dir("b");
    ExperimentSpec again = parse_config(cfg_text);
    again.out_dir = (dir_b / "out").string();
    again.threads = 4;
    run_experiment(again);
    CHECK(slurp(dir_a / "out" / "aggregate.csv") == slurp(dir_b / "out" / "aggregate.csv"));
    CHECK(slurp(dir_a / "out" / "runs" / "point0_random_run1.csv") ==
          slurp(dir_b / "out" / "runs" / "point0_random_run1.csv"));

    // Manifest carries the schema and echoes the resolved configuration.
    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir_a / "out" / "manifest.json"));
    CHECK(manifest["schema_version"] == 1);
    CHECK(manifest["config"]["beta"] == doctest::Approx(0.5));
    CHECK(manifest["config"]["total_slots"] == 10);
    CHECK(manifest["config"]["seed"] == 42);
    CHECK(manifest["config"]["policies"] == nlohmann::json::array({"no", "random"}));
    CHECK(manifest["runs"].size() == 4);
    CHECK(manifest["runs"][0]["series"] == "runs/point0_no_run0.csv");

    // summarize over a single results dir reproduces the aggregate rows.
    summarize(dir_a / "out");
    CHECK(csv_lines(dir_a / "out" / "summary.csv") == agg);
}

TEST_CASE("summarize rejects mismatched aggregate headers") {
    const fs::path dir = temp_dir("mismatch");
    fs::create_directories(dir / "x");
    fs::create_directories(dir / "y");
    std::ofstream(dir / "x" / "aggregate.csv") << "point,policy\r\n0,no\r\n";
    std::ofstream(dir / "y" / "aggregate.csv") << "point,policy,extra\r\n0,no,1\r\n";
    CHECK_THROWS(summarize(dir));
}

TEST_CASE("sweep axes expand into the point grid") {
    const ExperimentSpec spec = parse_config(
        "sweep_beta = 0.2, 0.5\n"
        "sweep_miners = 1, 5\n");
    const std::vector<SweepPoint> pts = spec.points();
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].beta == doctest::Approx(0.2));
    CHECK(pts[3].beta == doctest::Approx(0.5));
    CHECK(pts[3].num_miners == 5);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].index == static_cast<int>(i));
}

TEST_CASE("task size axis rescales the sweep point config") {
    const ExperimentSpec spec = parse_config("sweep_task_kb = 10\n");
    const SimConfig cfg = spec.points()[0].resolve(spec.base, true);
    // 10 kB mean with the default +/-50% spread, in bits.
    CHECK(cfg.task_size_range_bits.min == doctest::Approx(10e3 * 8 * 0.5));
    CHECK(cfg.task_size_range_bits.max == doctest::Approx(10e3 * 8 * 1.5));
    CHECK(cfg.local_bit_budget_per_slot == doctest::Approx(0.8 * 10e3 * 8));
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("q-table json roundtrip") {
    QTable q(6, 4);
    q.at(1, 2) = -0.75;
    q.at(5, 0) = 3.25;
    q.at(5, 3) = 1e-9;
    const QTable back = QTable::from_json(q.to_json());
    for (int s = 0; s < 6; ++s)
        for (int a = 0; a < 4; ++a) CHECK(back.at(s, a) == q.at(s, a));
    CHECK_THROWS(QTable::from_json("{\"states\":2}"));
    CHECK_THROWS(QTable::from_json("not json"));
}
