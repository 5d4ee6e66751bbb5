#ifndef MACFB_SCHEME_HPP
#define MACFB_SCHEME_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "macfb/channel.hpp"
#include "macfb/gf2.hpp"

namespace macfb {

enum class CodebookMode { linear_identical, random_independent };

// Block-Markov scheme over the parity-gated channel: fresh k-bit messages in
// each of `blocks` blocks of n channel uses, one extra block to flush the
// pipelined stage-2 payload. Throughput accounting uses the `blocks` fresh
// blocks, so the effective rate is k*blocks / (n*(blocks+1)) per user.
struct SchemeConfig {
    std::size_t k = 4;
    std::size_t n = 8;
    std::size_t blocks = 4;  // L
    double delta = 0.05;
    CodebookMode codebook = CodebookMode::linear_identical;
    std::uint64_t master_seed = 0;
    StateRule state_rule = StateRule::third_second_part;
    bool keep_transcripts = false;
    // Optional fixed generator in hex text ("k n" header plus rows); empty
    // draws a fresh uniform G per trial. linear_identical only.
    std::string generator_hex;

    void validate() const;
    double nominal_rate() const { return static_cast<double>(k) / static_cast<double>(n); }
    double effective_rate() const {
        return static_cast<double>(k * blocks) / static_cast<double>(n * (blocks + 1));
    }

    static SchemeConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Everything one block saw; recorded only when keep_transcripts is set.
struct BlockTranscript {
    std::array<gf2::BitWord, 3> message;       // k bits each
    std::array<gf2::BitWord, 3> stage1;        // x_{i1}, n bits
    std::array<gf2::BitWord, 3> stage2;        // x_{i2}, n bits
    gf2::BitWord y1, y21, y22;                 // channel outputs, n bits
    gf2::BitWord sum_estimate;                 // encoder 3's decoded message sum (k bits)
    std::array<gf2::BitWord, 3> decoded;       // decoder output for this block
    gf2::BitWord state2_positions;             // 1 where the second channel ran open
};

struct TrialReport {
    SchemeConfig config;
    std::uint64_t trial_index = 0;

    // Indexed by fresh-message block (1..L stored at 0..L-1).
    std::vector<bool> e1, e2, e3, msg_error;
    std::size_t e1_count = 0, e2_count = 0, e3_count = 0, msg_error_count = 0;

    // Mismatch x_32 ^ x_12 ^ x_22 for the stage-2 carrying blocks 2..L+1.
    std::vector<gf2::BitWord> stage2_mismatch;
    double state1_fraction = 0;  // over the n*L stage-2 positions

    double nominal_rate = 0;
    double effective_rate = 0;

    std::vector<BlockTranscript> transcripts;  // L+1 entries when kept

    nlohmann::json to_json() const;
};

// One full run of the scheme; all randomness derives from
// (config.master_seed, trial_index).
TrialReport run_trial(const SchemeConfig& config, std::uint64_t trial_index = 0);

// The unstructured baseline: three independent random codebooks, encoder 3
// quantizing its ML sum estimate onto its own codebook.
TrialReport run_baseline_trial(const SchemeConfig& config, std::uint64_t trial_index = 0);

// Fraction of stage-2 positions whose across-trial mismatch frequency
// reaches `threshold`.
double empirical_state_fraction(std::span<const TrialReport> reports, double threshold);

}  // namespace macfb

#endif  // MACFB_SCHEME_HPP
