#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "macfb/scheme.hpp"

using namespace macfb;
using gf2::BitWord;

namespace {

SchemeConfig small_config() {
    SchemeConfig cfg;
    cfg.k = 4;
    cfg.n = 16;
    cfg.blocks = 6;
    cfg.delta = 0.05;
    cfg.master_seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    SchemeConfig cfg = small_config();
    cfg.k = 20;
    cfg.n = 8;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg = small_config();
    cfg.blocks = 1;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg = small_config();
    cfg.delta = 0.5;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg = small_config();
    cfg.k = 21;
    cfg.n = 40;
    CHECK_THROWS_AS(cfg.validate(), resource_limit_error);
    cfg = small_config();
    cfg.generator_hex = "2 4\nf\nf\n";  // wrong row count for k=4
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    CHECK_THROWS_AS(run_baseline_trial(small_config()), validation_error);
}

TEST_CASE("noiseless runs decode everything") {
    SchemeConfig cfg = small_config();
    cfg.delta = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.master_seed = seed;
        const auto r = run_trial(cfg);
        CHECK(r.e1_count == 0);
        CHECK(r.e2_count == 0);
        CHECK(r.e3_count == 0);
        CHECK(r.msg_error_count == 0);
        CHECK(r.state1_fraction == 1.0);
    }
}

TEST_CASE("repetition code matches the binomial oracle") {
    // G = [[1,1,1]]: encoder 3 errs exactly when the adder noise flips two
    // or more of the three positions.
    SchemeConfig cfg;
    cfg.k = 1;
    cfg.n = 3;
    cfg.blocks = 20;
    cfg.delta = 0.1;
    cfg.generator_hex = "1 3\n7\n";
    const double p_exact = 3 * 0.01 * 0.9 + 0.001;  // P(Bin(3,0.1) >= 2) = 0.028

    std::size_t errors = 0, blocks = 0;
    for (std::uint64_t t = 0; t < 300; ++t) {
        cfg.master_seed = 321;
        const auto r = run_trial(cfg, t);
        errors += r.e1_count;
        blocks += cfg.blocks;
    }
    const double rate = double(errors) / double(blocks);
    const double sigma = std::sqrt(p_exact * (1 - p_exact) / double(blocks));
    CHECK(std::abs(rate - p_exact) < 3.5 * sigma);
}

TEST_CASE("structure invariant: correct sum decode forces the parity gate") {
    SchemeConfig cfg;
    cfg.k = 6;
    cfg.n = 18;
    cfg.blocks = 10;
    cfg.delta = 0.08;
    cfg.keep_transcripts = true;
    for (std::uint64_t t = 0; t < 40; ++t) {
        const auto r = run_trial(cfg, t);
        for (std::size_t l = 0; l < cfg.blocks; ++l) {
            if (!r.e1[l]) {
                CHECK(r.stage2_mismatch[l].is_zero());
                CHECK(r.transcripts[l + 1].state2_positions.is_zero());
            }
            // mismatch recomputed from the transcript words
            const auto& tr = r.transcripts[l + 1];
            CHECK(r.stage2_mismatch[l] == (tr.stage2[2] ^ tr.stage2[0] ^ tr.stage2[1]));
        }
    }
}

TEST_CASE("determinism") {
    SchemeConfig cfg = small_config();
    cfg.keep_transcripts = true;
    const auto a = run_trial(cfg, 3);
    const auto b = run_trial(cfg, 3);
    CHECK(a.to_json() == b.to_json());
    const auto c = run_trial(cfg, 4);
    CHECK(a.to_json() != c.to_json());
}

TEST_CASE("rate accounting") {
    const SchemeConfig cfg = small_config();
    const auto r = run_trial(cfg);
    CHECK(r.nominal_rate == 0.25);
    CHECK(r.effective_rate == doctest::Approx(4.0 * 6 / (16.0 * 7)).epsilon(1e-15));
}

TEST_CASE("degenerate single-message schemes never err") {
    SchemeConfig cfg;
    cfg.k = 0;
    cfg.n = 6;
    cfg.blocks = 4;
    cfg.delta = 0.2;
    for (auto mode : {CodebookMode::linear_identical, CodebookMode::random_independent}) {
        cfg.codebook = mode;
        const auto r = run_trial(cfg, 1);
        CHECK(r.msg_error_count == 0);
        CHECK(r.e2_count == 0);
        CHECK(r.e3_count == 0);
    }
}

TEST_CASE("separable pair decode equals the exhaustive joint search") {
    // Joint ML over message pairs under the state-1 product law, with
    // lexicographic ties, must coincide with two single-user decodes.
    NoiseStream rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const auto b1 = gf2::random_codebook(3, 8, rng);
        const auto b2 = gf2::random_codebook(3, 8, rng);
        const auto y21 = BitWord::random(8, rng);
        const auto y22 = BitWord::random(8, rng);

        std::size_t best_pair = 0, best_d = 100;
        for (std::size_t m1 = 0; m1 < 8; ++m1)
            for (std::size_t m2 = 0; m2 < 8; ++m2) {
                const std::size_t d = y21.hamming_distance(b1.words[m1]) +
                                      y22.hamming_distance(b2.words[m2]);
                if (d < best_d) {
                    best_d = d;
                    best_pair = m1 * 8 + m2;
                }
            }
        const std::size_t via_split = gf2::ml_decode_bsc(y21, b1, 0.1) * 8 +
                                      gf2::ml_decode_bsc(y22, b2, 0.1);
        CHECK(via_split == best_pair);
    }
}

TEST_CASE("baseline leaks mismatches at the quantization distortion") {
    // At rate 1/4 the nearest-word quantization tracks the sum estimate to
    // within the rate-distortion limit (~0.21 per position, plus channel
    // noise), so most positions stay in state 1 but a solid share of them
    // cross the 0.25 mismatch-frequency threshold.
    SchemeConfig cfg;
    cfg.k = 6;
    cfg.n = 24;
    cfg.blocks = 8;
    cfg.delta = 0.05;
    cfg.codebook = CodebookMode::random_independent;
    cfg.master_seed = 5;

    std::vector<TrialReport> reports;
    for (std::uint64_t t = 0; t < 30; ++t) reports.push_back(run_baseline_trial(cfg, t));

    double mean_state1 = 0;
    for (const auto& r : reports) mean_state1 += r.state1_fraction;
    mean_state1 /= double(reports.size());
    CHECK(mean_state1 > 0.6);
    CHECK(mean_state1 < 0.85);

    const double frac = empirical_state_fraction(reports, 0.25);
    CHECK(frac > 0.3);
    CHECK(frac < 0.9);

    double msg_rate = 0;
    for (const auto& r : reports) msg_rate += double(r.msg_error_count) / double(cfg.blocks);
    msg_rate /= double(reports.size());
    CHECK(msg_rate > 0.1);

    double trial_fail = 0;
    for (const auto& r : reports) trial_fail += r.msg_error_count > 0 ? 1.0 : 0.0;
    CHECK(trial_fail / double(reports.size()) > 0.5);
}

TEST_CASE("overloading the random sum codebook breaks the feedback decode") {
    // At rate 1/2 the baseline sum codebook carries rate 1 and the encoder-3
    // estimate stops matching the true sum word almost always, while the
    // identical linear code keeps the same decode at rate 1/2.
    SchemeConfig cfg;
    cfg.k = 6;
    cfg.n = 12;
    cfg.blocks = 10;
    cfg.delta = 0.05;
    cfg.master_seed = 31;

    double linear_e1 = 0, baseline_e1 = 0, baseline_msg = 0;
    const int trials = 40;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto lin = run_trial(cfg, t);
        linear_e1 += double(lin.e1_count) / double(cfg.blocks);
    }
    cfg.codebook = CodebookMode::random_independent;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto base = run_baseline_trial(cfg, t);
        baseline_e1 += double(base.e1_count) / double(cfg.blocks);
        baseline_msg += double(base.msg_error_count) / double(cfg.blocks);
    }
    linear_e1 /= trials;
    baseline_e1 /= trials;
    baseline_msg /= trials;
    CHECK(linear_e1 < 0.2);
    CHECK(baseline_e1 > 0.3);
    CHECK(baseline_msg > 0.5);
}

TEST_CASE("linear scheme keeps the gate closed") {
    SchemeConfig cfg;
    cfg.k = 6;
    cfg.n = 24;
    cfg.blocks = 8;
    cfg.delta = 0.0;
    cfg.master_seed = 9;
    std::vector<TrialReport> reports;
    for (std::uint64_t t = 0; t < 10; ++t) reports.push_back(run_trial(cfg, t));
    CHECK(empirical_state_fraction(reports, 0.01) == 0.0);
    const std::vector<TrialReport> none;
    CHECK_THROWS_AS(empirical_state_fraction(none, 0.5), validation_error);
}

TEST_CASE("fixed generators are honored") {
    SchemeConfig cfg;
    cfg.k = 2;
    cfg.n = 8;
    cfg.blocks = 3;
    cfg.delta = 0.0;
    cfg.keep_transcripts = true;
    const auto g = gf2::BitMatrix::from_rows(
        {BitWord::from_bit_string("10110010"), BitWord::from_bit_string("01011100")});
    cfg.generator_hex = g.to_hex_text();
    const auto r = run_trial(cfg, 0);
    const auto spec = gf2::LinearCodeSpec::undithered(g);
    for (std::size_t l = 0; l <= cfg.blocks; ++l)
        for (int i = 0; i < 3; ++i)
            CHECK(r.transcripts[l].stage1[std::size_t(i)] ==
                  gf2::encode(r.transcripts[l].message[std::size_t(i)], spec, i + 1));
}

TEST_CASE("report json carries the block flags") {
    SchemeConfig cfg = small_config();
    const auto r = run_trial(cfg, 2);
    const auto j = r.to_json();
    CHECK(j.at("e1").size() == cfg.blocks);
    CHECK(j.at("stage2_mismatch_hex").size() == cfg.blocks);
    std::size_t count = 0;
    for (bool b : j.at("e2").get<std::vector<bool>>()) count += b ? 1 : 0;
    CHECK(count == r.e2_count);
}
