#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "baddr/harness.hpp"

using namespace baddr;
namespace fs = std::filesystem;

namespace {

const char* kTinyTiger = R"(
[experiment]
domain = tiger
method = baddr
episodes = 2
runs = 2
seed = 17
workers = 2

[planner]
simulations = 24

[belief]
particles = 32
resample_size = 16

[nnet]
nodes = 8
mc_samples = 4

[pretrain]
batches = 20
)";

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

std::vector<RunRecord> series(int run, std::vector<double> returns) {
    std::vector<RunRecord> out;
    for (std::size_t e = 0; e < returns.size(); ++e)
        out.push_back({run, static_cast<int>(e), returns[e], 1, 0, std::nullopt});
    return out;
}

}  // namespace

TEST_CASE("config defaults follow the domain") {
    const auto tiger = ExperimentConfig::defaults(DomainKind::tiger);
    CHECK(tiger.net.hidden_nodes == 32);
    CHECK(tiger.net.p_drop == 0.5);
    CHECK(tiger.online.online_learning_rate == 0.005);
    CHECK(tiger.pretrain.batches == 4096);
    CHECK(tiger.pretrain.batch_size == 32);
    CHECK(tiger.pretrain.learning_rate == 0.1);
    CHECK(tiger.ucb_constant == 100.0);
    CHECK(tiger.filter == FilterKind::importance);
    CHECK(tiger.resample_size == 128);
    CHECK(tiger.particles == 1024);
    CHECK(tiger.simulations == 4096);
    CHECK(tiger.depth == 30);
    CHECK(tiger.episodes == 400);
    CHECK(tiger.horizon == 30);
    CHECK(tiger.effective_max_attempts() == 1024000);

    const auto road9 = ExperimentConfig::defaults(DomainKind::roadrace, 9);
    CHECK(road9.net.hidden_nodes == 256);
    CHECK(road9.net.p_drop == 0.1);
    CHECK(road9.online.online_learning_rate == 0.0001);
    CHECK(road9.pretrain.batches == 16384);
    CHECK(road9.pretrain.batch_size == 256);
    CHECK(road9.filter == FilterKind::rejection);
    CHECK(road9.simulations == 128);
    CHECK(road9.depth == 3);
    CHECK(road9.ucb_constant == 15.0);
    CHECK(road9.episodes == 300);
    CHECK(road9.horizon == 20);
    CHECK_FALSE(road9.probe);

    const auto road3 = ExperimentConfig::defaults(DomainKind::roadrace, 3);
    CHECK(road3.episodes == 200);
    CHECK(road3.pretrain.batches == 2048);
    CHECK(road3.pretrain.batch_size == 64);
    CHECK(road3.pretrain.learning_rate == 0.005);
}

TEST_CASE("config parsing") {
    const auto cfg = parse(kTinyTiger);
    CHECK(cfg.episodes == 2);
    CHECK(cfg.seed == 17);
    CHECK(cfg.net.hidden_nodes == 8);
    CHECK(cfg.ucb_constant == 100.0);

    const auto road = parse("[experiment]\ndomain = roadrace\n[roadrace]\nlanes = 9\n[planner]\nsimulations = 64\n");
    CHECK(road.lanes == 9);
    CHECK(road.net.hidden_nodes == 256);
    CHECK(road.simulations == 64);

    CHECK_THROWS(parse("[experiment]\nbogus = 1\n"));
    CHECK_THROWS(parse("[nowhere]\nkey = 1\n"));
    CHECK_THROWS(parse("[experiment]\nmethod = magic\n"));
    CHECK_THROWS(parse("[experiment]\nepisodes = many\n"));

    std::ostringstream out;
    write_config(out, road);
    const auto again = parse(out.str());
    CHECK(again.lanes == 9);
    CHECK(again.simulations == 64);
    CHECK(again.online.online_learning_rate == road.online.online_learning_rate);
}

TEST_CASE("run_experiment writes one row per episode and is deterministic") {
    const auto cfg = parse(kTinyTiger);
    const auto a = fresh_dir("baddr_harness_a");
    const auto b = fresh_dir("baddr_harness_b");
    const auto files = run_experiment(cfg, a.string());
    REQUIRE(files.size() == 2);
    std::size_t rows = 0;
    for (const auto& f : files) {
        std::ifstream in(f);
        const auto records = read_run_csv(in);
        rows += records.size();
        for (std::size_t e = 0; e < records.size(); ++e) {
            CHECK(records[e].episode == static_cast<int>(e));
            CHECK(records[e].belief_probe_mean.has_value());
            CHECK(records[e].wall_millis == 0);
        }
    }
    CHECK(rows == 4);
    CHECK(slurp(a / "run_0.csv").rfind(kRunCsvHeader, 0) == 0);

    auto serial = cfg;
    serial.workers = 1;
    run_experiment(serial, b.string());
    CHECK(slurp(a / "run_0.csv") == slurp(b / "run_0.csv"));
    CHECK(slurp(a / "run_1.csv") == slurp(b / "run_1.csv"));
    CHECK(slurp(a / "run_0.csv") != slurp(a / "run_1.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("every method runs on both domains") {
    for (Method m : {Method::baddr, Method::tabular, Method::filtering, Method::pomcp_true}) {
        auto cfg = parse(kTinyTiger);
        cfg.method = m;
        cfg.episodes = 1;
        cfg.ensemble_size = m == Method::filtering ? 4 : 1;
        CHECK(run_single(cfg, 0).size() == 1);
    }
    auto road = parse(
        "[experiment]\ndomain = roadrace\nepisodes = 2\nhorizon = 5\n[planner]\nsimulations = 16\n"
        "[belief]\nparticles = 64\n[nnet]\nnodes = 8\n[pretrain]\nbatches = 20\n");
    for (Method m : {Method::baddr, Method::filtering, Method::pomcp_true}) {
        road.method = m;
        const auto records = run_single(road, 3);
        REQUIRE(records.size() == 2);
        CHECK(records[0].steps == 5);
        CHECK_FALSE(records[0].belief_probe_mean.has_value());
    }
}

TEST_CASE("run CSV round trip") {
    std::vector<RunRecord> records = series(4, {1.5, -0.25});
    records[1].belief_probe_mean = 0.8125;
    std::stringstream s;
    write_run_csv(s, records);
    const auto back = read_run_csv(s);
    REQUIRE(back.size() == 2);
    CHECK(back[0].run_id == 4);
    CHECK(back[1].discounted_return == -0.25);
    CHECK_FALSE(back[0].belief_probe_mean.has_value());
    CHECK(*back[1].belief_probe_mean == 0.8125);
}

TEST_CASE("aggregate examples") {
    const auto two = aggregate_runs({series(0, {1.0, 5.0}), series(1, {3.0, 5.0})});
    REQUIRE(two.size() == 2);
    CHECK(two[0].mean_return == doctest::Approx(2.0));
    CHECK(two[0].stderr_return == doctest::Approx(1.0));
    CHECK(two[0].n_runs == 2);
    CHECK(two[1].stderr_return == 0.0);

    const auto single = aggregate_runs({series(0, {1.0, 2.0, 7.0})});
    CHECK(single.size() == 3);
    for (const auto& row : single) CHECK(row.stderr_return == 0.0);

    const auto smooth = aggregate_runs({series(0, {1.0, 3.0, 8.0})}, 2);
    CHECK(smooth[0].mean_return == doctest::Approx(1.0));
    CHECK(smooth[2].mean_return == doctest::Approx(5.5));

    CHECK_THROWS(aggregate_runs({series(0, {1.0, 2.0}), series(1, {1.0})}));
    CHECK_THROWS(aggregate_runs({}));

    std::ostringstream out;
    write_aggregate_csv(out, two);
    CHECK(out.str() == "episode,mean_return,stderr,n_runs\n0,2,1,2\n1,5,0,2\n");
}

TEST_CASE("aggregate_directory reads every run file") {
    const auto dir = fresh_dir("baddr_aggregate");
    fs::create_directories(dir);
    for (int r = 0; r < 3; ++r) {
        std::ofstream f(dir / ("run_" + std::to_string(r) + ".csv"));
        write_run_csv(f, series(r, {static_cast<double>(r), 1.0}));
    }
    const auto rows = aggregate_directory(dir.string(), (dir / "agg.csv").string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean_return == doctest::Approx(1.0));
    CHECK(rows[0].n_runs == 3);
    CHECK(fs::exists(dir / "agg.csv"));
    fs::remove_all(dir);
}
