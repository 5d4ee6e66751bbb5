#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "macfb/harness.hpp"

using namespace macfb;

namespace {

SimulateConfig small_sim() {
    SimulateConfig cfg;
    cfg.scheme.k = 4;
    cfg.scheme.n = 16;
    cfg.scheme.blocks = 5;
    cfg.scheme.delta = 0.05;
    cfg.scheme.master_seed = 77;
    cfg.trials = 6;
    cfg.threads = 2;
    return cfg;
}

// Minimal CSV parser for the schema checks.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

TEST_CASE("aggregate statistics") {
    const auto a = aggregate({1.0, 2.0, 3.0, 4.0});
    CHECK(a.mean == doctest::Approx(2.5));
    // sample stddev sqrt(5/3), stderr over sqrt(4)
    CHECK(a.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
    CHECK(aggregate({}).count == 0);
    CHECK(aggregate({7.0}).stderr_ == 0.0);
}

TEST_CASE("simulate bundles are reproducible and self-consistent") {
    const auto cfg = small_sim();
    const auto a = cmd_simulate(cfg);
    const auto b = cmd_simulate(cfg);

    REQUIRE(a.csv_files.size() == b.csv_files.size());
    for (std::size_t i = 0; i < a.csv_files.size(); ++i) {
        CHECK(a.csv_files[i].first == b.csv_files[i].first);
        CHECK(a.csv_files[i].second == b.csv_files[i].second);
    }
    CHECK(a.aggregates == b.aggregates);
    CHECK(a.raw == b.raw);
    // provenance differs at most in the timestamp
    auto pa = a.provenance, pb = b.provenance;
    pa.erase("timestamp");
    pb.erase("timestamp");
    CHECK(pa == pb);

    // aggregates equal recomputation from the raw records
    const std::size_t L = cfg.scheme.blocks;
    std::vector<double> msg_rates;
    for (const auto& rec : a.raw)
        msg_rates.push_back(rec.at("msg_error_count").get<double>() / double(L));
    const auto agg = aggregate(msg_rates);
    CHECK(a.aggregates.at("msg_error_rate").at("mean").get<double>() ==
          doctest::Approx(agg.mean).epsilon(1e-15));
    CHECK(a.aggregates.at("msg_error_rate").at("stderr").get<double>() ==
          doctest::Approx(agg.stderr_).epsilon(1e-15));
}

TEST_CASE("simulate csv schema and round trip") {
    const auto cfg = small_sim();
    const auto bundle = cmd_simulate(cfg);
    REQUIRE(bundle.csv_files.size() == 2);
    CHECK(bundle.csv_files[0].first == "simulate_blocks.csv");
    const auto rows = parse_csv(bundle.csv_files[0].second);
    REQUIRE(!rows.empty());
    const std::vector<std::string> header{"trial", "block", "E1",
                                          "E2",    "E3",    "msg_error", "state1_frac"};
    CHECK(rows[0] == header);
    CHECK(rows.size() == 1 + cfg.trials * cfg.scheme.blocks);
    // parse -> emit round trip is byte stable
    std::ostringstream emitted;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) emitted << ',';
            emitted << rows[r][c];
        }
        emitted << '\n';
    }
    CHECK(emitted.str() == bundle.csv_files[0].second);
}

TEST_CASE("thread count does not change results") {
    auto cfg = small_sim();
    cfg.threads = 1;
    const auto serial = cmd_simulate(cfg);
    cfg.threads = 2;
    const auto parallel = cmd_simulate(cfg);
    CHECK(serial.csv_files[0].second == parallel.csv_files[0].second);
    CHECK(serial.aggregates == parallel.aggregates);
}

TEST_CASE("bundle writing") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "macfb_harness_test";
    fs::remove_all(dir);
    const auto bundle = cmd_simulate(small_sim());
    bundle.write(dir.string());
    CHECK(fs::exists(dir / "bundle.json"));
    CHECK(fs::exists(dir / "simulate_blocks.csv"));
    std::ifstream f(dir / "bundle.json");
    nlohmann::json j;
    f >> j;
    CHECK(j.contains("provenance"));
    CHECK(j.at("provenance").at("version") == kVersionString);
    fs::remove_all(dir);
}

TEST_CASE("sumcode command") {
    SumcodeConfig cfg;
    cfg.k = 6;
    cfg.n = 24;
    cfg.seeds = 10;
    cfg.kind = CodebookMode::linear_identical;
    const auto linear = cmd_sumcode(cfg);
    CHECK(linear.aggregates.at("gap").at("mean").get<double>() == 0.0);
    for (const auto& rec : linear.raw) CHECK(rec.at("gap").get<double>() == 0.0);

    cfg.kind = CodebookMode::random_independent;
    const auto random = cmd_sumcode(cfg);
    CHECK(random.aggregates.at("gap").at("mean").get<double>() > 5.0);

    cfg.dithered = true;
    cfg.kind = CodebookMode::linear_identical;
    const auto dithered = cmd_sumcode(cfg);
    CHECK(dithered.aggregates.at("gap").at("mean").get<double>() == 0.0);
}

TEST_CASE("channel entropy command stays within tolerance") {
    const ChannelEntropyConfig cfg;
    const auto bundle = cmd_channel_entropy(cfg);
    CHECK(bundle.aggregates.at("max_abs_err").get<double>() < 1e-9);
    const auto rows = parse_csv(bundle.csv_files[0].second);
    CHECK(rows[0] == std::vector<std::string>{"delta", "q", "closed_form", "numeric",
                                              "abs_err"});
    CHECK(rows.size() == 1 + cfg.deltas.size() * cfg.state2_probs.size());
}

TEST_CASE("dinfo command at one stage gives the single-letter value") {
    DinfoConfig cfg;
    cfg.channel = ParityGatedMac(0.1).to_table();
    cfg.horizon = 1;
    for (int i = 0; i < 3; ++i)
        cfg.policies.push_back(CausalPolicy::uniform(4, 1, 8));
    const auto bundle = cmd_dinfo(cfg);
    TrajectoryLaw law(cfg.channel,
                      {cfg.policies[0], cfg.policies[1], cfg.policies[2]}, 1);
    const auto joint = law.full_joint();
    const double mi = mutual_info(joint, {"X1@1", "X2@1", "X3@1"}, {"Y@1"});
    CHECK(bundle.aggregates.at("directed_info_rate").get<double>() ==
          doctest::Approx(mi).epsilon(1e-12));
}

TEST_CASE("region command emits both evaluators") {
    RegionConfig cfg;
    cfg.law = QlcInputLaw::bit_pair_default(ParityGatedMac(0.1).to_table(), 2);
    cfg.mode = "both";
    const auto bundle = cmd_region(cfg);
    CHECK(bundle.raw.contains("qlc"));
    CHECK(bundle.raw.contains("cl"));
    CHECK(bundle.aggregates.contains("qlc_diagonal"));
    const auto rows = parse_csv(bundle.csv_files[0].second);
    CHECK(rows.size() == 1 + 26);  // 13 constraints per evaluator
}

TEST_CASE("config validation and json round trips") {
    SimulateConfig sim = small_sim();
    sim.trials = 0;
    CHECK_THROWS_AS(sim.validate(), validation_error);
    sim = small_sim();
    const auto sim2 = SimulateConfig::from_json(sim.to_json());
    CHECK(sim2.to_json() == sim.to_json());

    SumcodeConfig sc;
    sc.seeds = 0;
    CHECK_THROWS_AS(sc.validate(), validation_error);
    sc = SumcodeConfig{};
    CHECK(SumcodeConfig::from_json(sc.to_json()).to_json() == sc.to_json());

    ChannelEntropyConfig ce;
    ce.deltas = {0.7};
    CHECK_THROWS_AS(ce.validate(), validation_error);

    DinfoConfig di;
    di.channel = ParityGatedMac(0.1).to_table();
    di.horizon = 1;
    CHECK_THROWS_AS(di.validate(), validation_error);  // needs three policies
}
