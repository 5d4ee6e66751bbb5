// Acceptance suite: one pass/fail line per criterion, every tolerance
// pinned in code. Exit status is the number of failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "macfb/channel.hpp"
#include "macfb/gf2.hpp"
#include "macfb/harness.hpp"
#include "macfb/pmf.hpp"
#include "macfb/region.hpp"
#include "macfb/scheme.hpp"
#include "macfb/trajectory.hpp"
#include "region_oracle.hpp"

using namespace macfb;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& outcome, double seconds) {
    std::printf("[%2d] %s  %-34s %s (%.1fs)\n", id, outcome.pass ? "PASS" : "FAIL",
                name.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
}

template <typename Fn>
void run(int id, const std::string& name, Fn fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, name, outcome, seconds);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Independent binary entropy (natural logs).
double h_oracle(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return (-p * std::log(p) - (1.0 - p) * std::log(1.0 - p)) / std::log(2.0);
}

std::vector<TrialReport> run_trials(const SchemeConfig& cfg, std::size_t trials) {
    std::vector<TrialReport> reports(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= trials) return;
            reports[t] = run_trial(cfg, t);
        }
    };
    std::thread a(worker), b(worker);
    a.join();
    b.join();
    return reports;
}

struct RateStat {
    double mean = 0, se = 0;
};

RateStat block_error_rate(const std::vector<TrialReport>& reports) {
    std::vector<double> per;
    for (const auto& r : reports)
        per.push_back(double(r.msg_error_count) / double(r.config.blocks));
    const auto a = aggregate(per);
    return {a.mean, a.stderr_};
}

RateStat trial_error_rate(const std::vector<TrialReport>& reports) {
    std::vector<double> per;
    for (const auto& r : reports) per.push_back(r.msg_error_count > 0 ? 1.0 : 0.0);
    const auto a = aggregate(per);
    return {a.mean, a.stderr_};
}

SchemeConfig scheme_at(std::size_t k, std::size_t n) {
    SchemeConfig cfg;
    cfg.k = k;
    cfg.n = n;
    cfg.blocks = 20;
    cfg.delta = 0.05;
    cfg.master_seed = 1001;
    return cfg;
}

// Mixed (support-3) conditionals for the brute-force comparison: mass 0.7
// on the bit pair (t, v), 0.2 on (t^1, v), 0.1 on (t, v^1).
QlcInputLaw mixed_example_law(int u_size) {
    QlcInputLaw law;
    law.channel = ParityGatedMac(0.1).to_table();
    law.p_u.assign(std::size_t(u_size), 1.0 / u_size);
    for (int i = 0; i < 3; ++i) {
        auto& table = law.x_given[std::size_t(i)];
        table.assign(std::size_t(u_size) * 4 * 4, 0.0);
        for (int u = 0; u < u_size; ++u)
            for (int t = 0; t < 2; ++t)
                for (int v = 0; v < 2; ++v) {
                    const std::size_t row =
                        (std::size_t(u) * 2 + std::size_t(t)) * 2 + std::size_t(v);
                    table[row * 4 + std::size_t(t | (v << 1))] += 0.7;
                    table[row * 4 + std::size_t((t ^ 1) | (v << 1))] += 0.2;
                    table[row * 4 + std::size_t(t | ((v ^ 1) << 1))] += 0.1;
                }
    }
    law.validate();
    return law;
}

QlcInputLaw seeded_reduced_law(std::uint64_t seed) {
    NoiseStream rng(seed);
    QlcInputLaw law;
    law.channel = ParityGatedMac(0.1).to_table();
    law.p_u = {0.5, 0.5};
    {
        const double a = 0.2 + 0.6 * rng.uniform();
        law.p_u = {a, 1.0 - a};
    }
    for (int i = 0; i < 3; ++i) {
        auto& table = law.x_given[std::size_t(i)];
        table.assign(2 * 4 * 4, 0.0);
        for (int u = 0; u < 2; ++u)
            for (int t = 0; t < 2; ++t) {
                double row[4];
                double total = 0;
                for (double& p : row) {
                    p = rng.uniform() + 0.05;
                    total += p;
                }
                for (double& p : row) p /= total;
                for (int v = 0; v < 2; ++v) {
                    const std::size_t r =
                        (std::size_t(u) * 2 + std::size_t(t)) * 2 + std::size_t(v);
                    for (int x = 0; x < 4; ++x) table[r * 4 + std::size_t(x)] = row[x];
                }
            }
    }
    law.validate();
    return law;
}

}  // namespace

int main() {
    std::printf("acceptance suite, %s\n", kVersionString);

    // Cached heavy runs shared between criteria 2, 3 and 4.
    std::vector<TrialReport> linear48;

    run(1, "corner-point formula", [&]() {
        Outcome o;
        const auto c = corner_point(0.1);
        const double expect = 1.0 - h_oracle(0.1);
        double worst = 0;
        for (double r : c) worst = std::max(worst, std::abs(r - expect));
        o.pass = worst < 1e-5;
        o.detail = "max |coord - (1-h(0.1))| = " + fmt(worst) + " (tol 1e-5)";
        return o;
    });

    run(2, "structure invariant", [&]() {
        Outcome o;
        linear48 = run_trials(scheme_at(12, 48), 200);
        std::size_t checked = 0, clean_blocks = 0, violations = 0;
        for (const auto& r : linear48)
            for (std::size_t l = 0; l < r.config.blocks; ++l) {
                ++checked;
                if (!r.e1[l]) {
                    ++clean_blocks;
                    if (!r.stage2_mismatch[l].is_zero()) ++violations;
                }
            }
        o.pass = violations == 0 && clean_blocks > 0;
        o.detail = fmt(double(clean_blocks)) + " clean blocks of " +
                   fmt(double(checked)) + ", mismatch violations = " +
                   fmt(double(violations)) + " (exact, zero tolerance)";
        return o;
    });

    run(3, "achievability trend", [&]() {
        Outcome o;
        const auto r24 = block_error_rate(run_trials(scheme_at(6, 24), 200));
        const auto r36 = block_error_rate(run_trials(scheme_at(9, 36), 200));
        const auto r48 = block_error_rate(linear48);
        const double slack1 = 2 * std::sqrt(r24.se * r24.se + r36.se * r36.se);
        const double slack2 = 2 * std::sqrt(r36.se * r36.se + r48.se * r48.se);
        const bool monotone = r36.mean <= r24.mean + slack1 && r48.mean <= r36.mean + slack2;
        const bool small = r48.mean <= 0.05;
        o.pass = monotone && small;
        o.detail = "block error " + fmt(r24.mean) + " -> " + fmt(r36.mean) + " -> " +
                   fmt(r48.mean) + " (2SE slack, <= 0.05 at n=48)";
        return o;
    });

    run(4, "necessity of structure", [&]() {
        Outcome o;
        SchemeConfig base = scheme_at(12, 48);
        base.codebook = CodebookMode::random_independent;
        std::vector<TrialReport> baseline(200);
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= baseline.size()) return;
                baseline[t] = run_baseline_trial(base, t);
            }
        };
        std::thread a(worker), b(worker);
        a.join();
        b.join();

        // Overall message error = the transmission (any of the L message
        // triples) was decoded wrongly.
        const auto lin = trial_error_rate(linear48);
        const auto bas = trial_error_rate(baseline);
        const double sigma = std::sqrt(lin.se * lin.se + bas.se * bas.se);
        const double separation = sigma > 0 ? (bas.mean - lin.mean) / sigma : 1e9;
        o.pass = bas.mean > 0.5 && lin.mean < 0.05 && separation >= 5.0;
        o.detail = "baseline " + fmt(bas.mean) + " > 0.5, linear " + fmt(lin.mean) +
                   " < 0.05, separation " + fmt(separation) + " sigma (>= 5)";
        return o;
    });

    run(5, "sum-codebook closure", [&]() {
        Outcome o;
        bool closure_exact = true;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            NoiseStream rng(trial_seed(42, seed));
            const auto spec =
                gf2::LinearCodeSpec::undithered(gf2::BitMatrix::random(8, 32, rng));
            const auto book = gf2::enumerate_codebook(spec, 1);
            const auto stats = gf2::sum_codebook_stats(book, book);
            closure_exact = closure_exact && stats.gap() == 0.0;
        }
        double mean_gap = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            NoiseStream rng(trial_seed(43, seed));
            const auto a = gf2::random_codebook(8, 32, rng);
            const auto b = gf2::random_codebook(8, 32, rng);
            const auto stats = gf2::sum_codebook_stats(a, b);
            mean_gap += stats.gap();
            if (seed < 5) {
                // independent container oracle for the distinct-sum count
                std::set<std::string> sums;
                for (const auto& wa : a.words)
                    for (const auto& wb : b.words) sums.insert((wa ^ wb).to_bit_string());
                if (std::abs(stats.log2_card_sum - std::log2(double(sums.size()))) > 1e-12)
                    closure_exact = false;
            }
        }
        mean_gap /= 100.0;
        o.pass = closure_exact && std::abs(mean_gap - 8.0) <= 0.1;
        o.detail = "linear gap identically 0 over 100 seeds; random mean gap " +
                   fmt(mean_gap) + " (within 0.1 of 8.0)";
        return o;
    });

    run(6, "mixed-state entropy identity", [&]() {
        Outcome o;
        ChannelEntropyConfig cfg;
        cfg.deltas = {0.05, 0.1, 0.25};
        cfg.state2_probs = {0.0, 0.3, 1.0};
        const auto bundle = cmd_channel_entropy(cfg);
        const double worst = bundle.aggregates.at("max_abs_err").get<double>();
        o.pass = worst < 1e-9;
        o.detail = "max |closed - numeric| = " + fmt(worst) + " over 9 grid points (tol 1e-9)";
        return o;
    });

    run(7, "directed information sanity", [&]() {
        Outcome o;
        const auto table = ParityGatedMac(0.1).to_table();
        auto policies = [&](int horizon) {
            return std::array<CausalPolicy, 3>{
                CausalPolicy::uniform(4, horizon, 8), CausalPolicy::uniform(4, horizon, 8),
                CausalPolicy::uniform(4, horizon, 8)};
        };
        TrajectoryLaw one(table, policies(1), 1);
        const auto j1 = one.full_joint();
        const double mi = mutual_info(j1, {"X1@1", "X2@1", "X3@1"}, {"Y@1"});
        const double e1 = std::abs(one.directed_info_rate() - mi);

        TrajectoryLaw two(table, policies(2), 2);
        TrajectoryLaw three(table, policies(3), 3);
        const double e2 = std::abs(two.directed_info_rate() - mi);
        const double e3 = std::abs(three.directed_info_rate() - mi);
        o.pass = e1 < 1e-12 && e2 < 1e-9 && e3 < 1e-9;
        o.detail = "|I_1 - MI| = " + fmt(e1) + " (tol 1e-12); L=2: " + fmt(e2) +
                   ", L=3: " + fmt(e3) + " (tol 1e-9)";
        return o;
    });

    run(8, "two-block evaluator vs brute force", [&]() {
        Outcome o;
        const auto law = mixed_example_law(1);
        const SourceConfig src;
        const auto poly = qlc_region(law, src);
        const auto oracle = region_oracle::brute_force_region(law, src);
        double worst = 0;
        bool shape = poly.constraints.size() == oracle.size();
        for (std::size_t i = 0; shape && i < oracle.size(); ++i) {
            shape = poly.constraints[i].terms.size() == oracle[i].terms.size();
            for (std::size_t t = 0; shape && t < oracle[i].terms.size(); ++t)
                worst = std::max(worst,
                                 std::abs(poly.constraints[i].terms[t] - oracle[i].terms[t]));
        }
        double vworst = 0;
        const auto vm = two_block_marginal(law, {RVar::V1, RVar::V2, RVar::V3});
        std::size_t idx = 0;
        for (int v1 = 0; v1 < 2; ++v1)
            for (int v2 = 0; v2 < 2; ++v2)
                for (int v3 = 0; v3 < 2; ++v3, ++idx) {
                    const double expect = (v1 ^ v2 ^ v3) == 0 ? 0.25 : 0.0;
                    vworst = std::max(vworst, std::abs(vm.probs()[idx] - expect));
                }
        o.pass = shape && worst < 1e-9 && vworst < 1e-12;
        o.detail = "max term gap " + fmt(worst) + " (tol 1e-9); V-coupling marginal off by " +
                   fmt(vworst) + " (tol 1e-12)";
        return o;
    });

    run(9, "independent-V reduction", [&]() {
        Outcome o;
        double worst = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto law = seeded_reduced_law(seed * 7919);
            const auto full = qlc_region(law);
            const auto reduced = cl_region(law);
            if (full.constraints.size() != reduced.constraints.size()) {
                o.pass = false;
                o.detail = "constraint count mismatch";
                return o;
            }
            for (std::size_t i = 0; i < full.constraints.size(); ++i)
                worst = std::max(worst, std::abs(full.constraints[i].bound -
                                                 reduced.constraints[i].bound));
        }
        o.pass = worst < 1e-9;
        o.detail = "max |two-block - single-block| = " + fmt(worst) +
                   " over 10 seeded laws (tol 1e-9)";
        return o;
    });

    run(10, "byte-identical reruns", [&]() {
        Outcome o;
        std::vector<std::string> mismatched;

        auto compare = [&](const char* name, const ResultBundle& x, const ResultBundle& y) {
            bool same = x.csv_files.size() == y.csv_files.size();
            for (std::size_t i = 0; same && i < x.csv_files.size(); ++i)
                same = x.csv_files[i] == y.csv_files[i];
            auto px = x.provenance, py = y.provenance;
            px.erase("timestamp");
            py.erase("timestamp");
            same = same && px == py && x.aggregates == y.aggregates && x.raw == y.raw;
            if (!same) mismatched.push_back(name);
        };

        SimulateConfig sim;
        sim.scheme = scheme_at(4, 16);
        sim.scheme.blocks = 5;
        sim.trials = 8;
        sim.threads = 2;
        compare("simulate", cmd_simulate(sim), cmd_simulate(sim));

        SumcodeConfig sc;
        sc.k = 6;
        sc.n = 24;
        sc.seeds = 20;
        compare("sumcode", cmd_sumcode(sc), cmd_sumcode(sc));

        RegionConfig rc;
        rc.law = QlcInputLaw::bit_pair_default(ParityGatedMac(0.1).to_table(), 2);
        rc.mode = "both";
        compare("region", cmd_region(rc), cmd_region(rc));

        DinfoConfig dc;
        dc.channel = ParityGatedMac(0.1).to_table();
        dc.horizon = 2;
        for (int i = 0; i < 3; ++i) dc.policies.push_back(CausalPolicy::uniform(4, 2, 8));
        compare("dinfo", cmd_dinfo(dc), cmd_dinfo(dc));

        ChannelEntropyConfig ce;
        compare("channel-entropy", cmd_channel_entropy(ce), cmd_channel_entropy(ce));

        o.pass = mismatched.empty();
        o.detail = mismatched.empty()
                       ? "all five subcommands byte-identical across reruns"
                       : "mismatch in: " + mismatched[0];
        return o;
    });

    std::printf("ACCEPTANCE: %d/10 criteria passed\n", 10 - failures);
    return failures;
}
