#include "macfb/scheme.hpp"

#include <algorithm>
#include <bit>

namespace macfb {

using gf2::BitMatrix;
using gf2::BitWord;
using gf2::Codebook;

void SchemeConfig::validate() const {
    if (k > n) throw validation_error("k must not exceed n");
    if (n == 0) throw validation_error("n must be positive");
    if (blocks < 2) throw validation_error("need at least two blocks");
    if (!(delta >= 0.0 && delta < 0.5))
        throw validation_error("delta must be in [0, 0.5) for decoding");
    if (k > gf2::kEnumerationCap)
        throw resource_limit_error("k exceeds the enumeration cap");
    if (!generator_hex.empty()) {
        if (codebook != CodebookMode::linear_identical)
            throw validation_error("fixed generators apply to linear_identical only");
        const auto g = gf2::BitMatrix::from_hex_text(generator_hex);
        if (g.rows() != k || g.cols() != n)
            throw validation_error("fixed generator dimensions must match k and n");
    }
}

SchemeConfig SchemeConfig::from_json(const nlohmann::json& j) {
    SchemeConfig c;
    c.k = j.at("k").get<std::size_t>();
    c.n = j.at("n").get<std::size_t>();
    c.blocks = j.at("blocks").get<std::size_t>();
    c.delta = j.at("delta").get<double>();
    const auto mode = j.value("codebook", std::string("linear_identical"));
    if (mode == "linear_identical")
        c.codebook = CodebookMode::linear_identical;
    else if (mode == "random_independent")
        c.codebook = CodebookMode::random_independent;
    else
        throw validation_error("unknown codebook mode '" + mode + "'");
    c.master_seed = j.value("seed", std::uint64_t{0});
    c.state_rule = j.value("state_rule", std::string("x32")) == "x31"
                       ? StateRule::third_first_part
                       : StateRule::third_second_part;
    c.keep_transcripts = j.value("keep_transcripts", false);
    c.generator_hex = j.value("generator_hex", std::string{});
    c.validate();
    return c;
}

nlohmann::json SchemeConfig::to_json() const {
    return {{"k", k},
            {"n", n},
            {"blocks", blocks},
            {"delta", delta},
            {"codebook", codebook == CodebookMode::linear_identical ? "linear_identical"
                                                                    : "random_independent"},
            {"seed", master_seed},
            {"state_rule", state_rule == StateRule::third_first_part ? "x31" : "x32"},
            {"keep_transcripts", keep_transcripts},
            {"generator_hex", generator_hex}};
}

namespace {

// Lexicographically-first pair (a, b) minimizing d(z, A[a] ^ B[b]); returns
// the sum word itself. Exhaustive over all |A|*|B| pairs.
BitWord best_sum_word(const BitWord& z, const Codebook& a, const Codebook& b) {
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(a.size()) * static_cast<std::uint64_t>(b.size());
    if (pairs > gf2::kSumSetCap)
        throw resource_limit_error("baseline sum search exceeds pair cap");

    std::size_t best_a = 0, best_b = 0;
    if (z.size() <= 64) {
        std::vector<std::uint64_t> bw(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) bw[i] = b.words[i].low_bits();
        std::size_t best = z.size() + 1;
        for (std::size_t ai = 0; ai < a.size(); ++ai) {
            const std::uint64_t t = a.words[ai].low_bits() ^ z.low_bits();
            for (std::size_t bi = 0; bi < b.size(); ++bi) {
                const auto d = static_cast<std::size_t>(std::popcount(t ^ bw[bi]));
                if (d < best) {
                    best = d;
                    best_a = ai;
                    best_b = bi;
                }
            }
        }
    } else {
        std::size_t best = z.size() + 1;
        for (std::size_t ai = 0; ai < a.size(); ++ai) {
            const BitWord t = a.words[ai] ^ z;
            for (std::size_t bi = 0; bi < b.size(); ++bi) {
                const std::size_t d = t.hamming_distance(b.words[bi]);
                if (d < best) {
                    best = d;
                    best_a = ai;
                    best_b = bi;
                }
            }
        }
    }
    return a.words[best_a] ^ b.words[best_b];
}

TrialReport run_engine(const SchemeConfig& cfg, std::uint64_t trial_index) {
    cfg.validate();
    const std::size_t k = cfg.k, n = cfg.n, L = cfg.blocks;
    const std::uint64_t ts = trial_seed(cfg.master_seed, trial_index);
    NoiseStream rng_code(trial_seed(ts, kStreamCodebook));
    NoiseStream rng_msg(trial_seed(ts, kStreamMessages));
    NoiseStream rng_noise(trial_seed(ts, kStreamChannel));

    const bool linear = cfg.codebook == CodebookMode::linear_identical;
    std::array<Codebook, 3> books;
    if (linear) {
        const BitMatrix g = cfg.generator_hex.empty()
                                ? BitMatrix::random(k, n, rng_code)
                                : BitMatrix::from_hex_text(cfg.generator_hex);
        const auto spec = gf2::LinearCodeSpec::undithered(g);
        books[0] = gf2::enumerate_codebook(spec, 1);
        books[1] = books[0];
        books[2] = books[0];
    } else {
        for (auto& book : books) book = gf2::random_codebook(k, n, rng_code);
    }

    const ParityGatedMac channel(cfg.delta, cfg.state_rule);

    // Fresh messages for blocks 1..L; the flush block sends message 0.
    std::vector<std::array<BitWord, 3>> msgs(L + 1);
    for (std::size_t l = 0; l < L; ++l)
        for (auto& w : msgs[l]) w = BitWord::random(k, rng_msg);
    msgs[L] = {BitWord(k), BitWord(k), BitWord(k)};

    TrialReport report;
    report.config = cfg;
    report.trial_index = trial_index;
    report.e1.assign(L, false);
    report.e2.assign(L, false);
    report.e3.assign(L, false);
    report.msg_error.assign(L, false);
    report.nominal_rate = cfg.nominal_rate();
    report.effective_rate = cfg.effective_rate();
    if (cfg.keep_transcripts) report.transcripts.resize(L + 1);

    std::vector<std::array<BitWord, 3>> x1(L + 1), x2(L + 1);
    std::vector<BitWord> y1(L + 1), y21(L + 1), y22(L + 1);

    BitWord enc3_stage2 = BitWord(n);
    std::array<BitWord, 3> prev_stage1{BitWord(n), BitWord(n), BitWord(n)};
    for (std::size_t l = 0; l <= L; ++l) {
        for (int i = 0; i < 3; ++i)
            x1[l][i] = books[static_cast<std::size_t>(i)]
                           .words[static_cast<std::size_t>(msgs[l][static_cast<std::size_t>(i)]
                                                               .low_bits())];
        x2[l][0] = l == 0 ? BitWord(n) : prev_stage1[0];
        x2[l][1] = l == 0 ? BitWord(n) : prev_stage1[1];
        x2[l][2] = l == 0 ? BitWord(n) : enc3_stage2;

        BitWord out1(n), out21(n), out22(n), state2(n);
        for (std::size_t pos = 0; pos < n; ++pos) {
            MacInput in;
            for (int i = 0; i < 3; ++i) {
                in.bits[static_cast<std::size_t>(i)][0] = x1[l][static_cast<std::size_t>(i)].get(pos);
                in.bits[static_cast<std::size_t>(i)][1] = x2[l][static_cast<std::size_t>(i)].get(pos);
            }
            if (!channel.state1(in)) state2.set(pos, true);
            const MacOutput out = channel.step(in, rng_noise);
            out1.set(pos, out.y1);
            out21.set(pos, out.y21);
            out22.set(pos, out.y22);
        }
        y1[l] = out1;
        y21[l] = out21;
        y22[l] = out22;

        if (l >= 1) report.stage2_mismatch.push_back(x2[l][2] ^ x2[l][0] ^ x2[l][1]);

        // Encoder 3 digests this block's feedback for the next block.
        BitWord sum_estimate(k);
        if (l < L) {
            const BitWord z = y1[l] ^ x1[l][2];
            if (linear) {
                const std::size_t m = gf2::ml_decode_bsc(z, books[0], cfg.delta);
                sum_estimate = BitWord::from_value(m, k);
                report.e1[l] = !(sum_estimate == (msgs[l][0] ^ msgs[l][1]));
                enc3_stage2 = books[0].words[m];
            } else {
                const BitWord best = best_sum_word(z, books[0], books[1]);
                report.e1[l] = !(best == (x1[l][0] ^ x1[l][1]));
                const std::size_t m = gf2::ml_decode_bsc(best, books[2], cfg.delta);
                sum_estimate = BitWord::from_value(m, k);
                enc3_stage2 = books[2].words[m];
            }
        }
        prev_stage1 = x1[l];

        if (cfg.keep_transcripts) {
            auto& tr = report.transcripts[l];
            tr.message = msgs[l];
            tr.stage1 = x1[l];
            tr.stage2 = x2[l];
            tr.y1 = y1[l];
            tr.y21 = y21[l];
            tr.y22 = y22[l];
            tr.sum_estimate = sum_estimate;
            tr.state2_positions = state2;
        }
    }

    // Decoder: block l is recovered from y2 of block l+1 and y1 of block l.
    // Step 1 is joint ML over message pairs under the state-1 law; that law
    // factorizes over the two legs, so the pair decode separates into two
    // single-user decodes with the same lexicographic tie rule.
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t m1 = gf2::ml_decode_bsc(y21[l + 1], books[0], cfg.delta);
        const std::size_t m2 = gf2::ml_decode_bsc(y22[l + 1], books[1], cfg.delta);
        const BitWord w1 = BitWord::from_value(m1, k);
        const BitWord w2 = BitWord::from_value(m2, k);
        report.e2[l] = !(w1 == msgs[l][0] && w2 == msgs[l][1]);

        const BitWord cleaned = y1[l] ^ books[0].words[m1] ^ books[1].words[m2];
        const std::size_t m3 = gf2::ml_decode_bsc(cleaned, books[2], cfg.delta);
        const BitWord w3 = BitWord::from_value(m3, k);
        report.e3[l] = !(w3 == msgs[l][2]);
        report.msg_error[l] = report.e2[l] || report.e3[l];

        if (cfg.keep_transcripts) report.transcripts[l].decoded = {w1, w2, w3};
    }

    std::size_t mismatched = 0;
    for (const auto& w : report.stage2_mismatch) mismatched += w.weight();
    report.state1_fraction =
        1.0 - static_cast<double>(mismatched) / static_cast<double>(n * L);
    report.e1_count = static_cast<std::size_t>(std::count(report.e1.begin(), report.e1.end(), true));
    report.e2_count = static_cast<std::size_t>(std::count(report.e2.begin(), report.e2.end(), true));
    report.e3_count = static_cast<std::size_t>(std::count(report.e3.begin(), report.e3.end(), true));
    report.msg_error_count = static_cast<std::size_t>(
        std::count(report.msg_error.begin(), report.msg_error.end(), true));
    return report;
}

}  // namespace

TrialReport run_trial(const SchemeConfig& config, std::uint64_t trial_index) {
    return run_engine(config, trial_index);
}

TrialReport run_baseline_trial(const SchemeConfig& config, std::uint64_t trial_index) {
    if (config.codebook != CodebookMode::random_independent)
        throw validation_error("baseline trials need the random_independent codebook mode");
    return run_engine(config, trial_index);
}

double empirical_state_fraction(std::span<const TrialReport> reports, double threshold) {
    if (reports.empty()) throw validation_error("need at least one trial report");
    const std::size_t n = reports[0].config.n;
    const std::size_t L = reports[0].config.blocks;
    for (const auto& r : reports)
        if (r.config.n != n || r.config.blocks != L)
            throw validation_error("trial reports must share one configuration shape");

    std::size_t hits = 0;
    const double t = static_cast<double>(reports.size());
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t pos = 0; pos < n; ++pos) {
            std::size_t count = 0;
            for (const auto& r : reports)
                if (r.stage2_mismatch[l].get(pos)) ++count;
            if (static_cast<double>(count) >= threshold * t - 1e-9) ++hits;
        }
    return static_cast<double>(hits) / static_cast<double>(n * L);
}

nlohmann::json TrialReport::to_json() const {
    nlohmann::json mism = nlohmann::json::array();
    for (const auto& w : stage2_mismatch) mism.push_back(w.to_hex());
    nlohmann::json j{{"config", config.to_json()},
                     {"trial", trial_index},
                     {"e1", e1},
                     {"e2", e2},
                     {"e3", e3},
                     {"msg_error", msg_error},
                     {"e1_count", e1_count},
                     {"e2_count", e2_count},
                     {"e3_count", e3_count},
                     {"msg_error_count", msg_error_count},
                     {"stage2_mismatch_hex", mism},
                     {"state1_fraction", state1_fraction},
                     {"nominal_rate", nominal_rate},
                     {"effective_rate", effective_rate}};
    if (!transcripts.empty()) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& tr : transcripts) {
            nlohmann::json b;
            for (int i = 0; i < 3; ++i) {
                const auto s = std::to_string(i + 1);
                b["w" + s] = tr.message[static_cast<std::size_t>(i)].to_hex();
                b["x" + s + "1"] = tr.stage1[static_cast<std::size_t>(i)].to_hex();
                b["x" + s + "2"] = tr.stage2[static_cast<std::size_t>(i)].to_hex();
                b["decoded" + s] = tr.decoded[static_cast<std::size_t>(i)].to_hex();
            }
            b["y1"] = tr.y1.to_hex();
            b["y21"] = tr.y21.to_hex();
            b["y22"] = tr.y22.to_hex();
            b["sum_estimate"] = tr.sum_estimate.to_hex();
            b["state2"] = tr.state2_positions.to_hex();
            blocks.push_back(std::move(b));
        }
        j["transcripts"] = std::move(blocks);
    }
    return j;
}

}  // namespace macfb
