#ifndef MACFB_HARNESS_HPP
#define MACFB_HARNESS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "macfb/region.hpp"
#include "macfb/scheme.hpp"
#include "macfb/trajectory.hpp"

namespace macfb {

struct SimulateConfig {
    SchemeConfig scheme;
    std::size_t trials = 1;
    int threads = 0;  // 0 = hardware concurrency
    double state_threshold = 0.25;

    void validate() const;
    static SimulateConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct SumcodeConfig {
    std::size_t k = 8;
    std::size_t n = 32;
    std::size_t seeds = 100;
    CodebookMode kind = CodebookMode::random_independent;
    bool dithered = false;  // quasi-linear cosets instead of plain linear codes
    std::uint64_t master_seed = 0;

    void validate() const;
    static SumcodeConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct RegionConfig {
    QlcInputLaw law;
    SourceConfig source;
    std::string mode = "both";  // "qlc", "cl" or "both"

    void validate() const;
    static RegionConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct DinfoConfig {
    TableChannel channel;
    std::vector<CausalPolicy> policies;  // exactly three
    int horizon = 1;

    void validate() const;
    static DinfoConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct ChannelEntropyConfig {
    std::vector<double> deltas{0.05, 0.1, 0.25};
    std::vector<double> state2_probs{0.0, 0.3, 1.0};

    void validate() const;
    static ChannelEntropyConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Everything one command produced. CSV content is deterministic for a fixed
// config; the provenance timestamp is the only run-dependent field.
struct ResultBundle {
    nlohmann::json provenance;
    nlohmann::json aggregates;
    nlohmann::json raw;
    std::vector<std::pair<std::string, std::string>> csv_files;  // name -> content

    nlohmann::json to_json() const;
    // Writes <dir>/bundle.json plus every CSV under its own name.
    void write(const std::string& out_dir) const;
};

ResultBundle cmd_simulate(const SimulateConfig& cfg);
ResultBundle cmd_sumcode(const SumcodeConfig& cfg);
ResultBundle cmd_region(const RegionConfig& cfg);
ResultBundle cmd_dinfo(const DinfoConfig& cfg);
ResultBundle cmd_channel_entropy(const ChannelEntropyConfig& cfg);

// Mean and standard error (sample stddev / sqrt(T)) over per-trial values.
struct Aggregate {
    double mean = 0;
    double stderr_ = 0;
    std::size_t count = 0;
};
Aggregate aggregate(const std::vector<double>& values);

std::string format_csv_double(double v);

}  // namespace macfb

#endif  // MACFB_HARNESS_HPP
