#include "macfb/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace macfb {

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json provenance_for(const std::string& command, const nlohmann::json& config) {
    return {{"command", command},
            {"config", config},
            {"version", kVersionString},
            {"timestamp", timestamp_utc()}};
}

nlohmann::json to_json(const Aggregate& a) {
    return {{"mean", a.mean}, {"stderr", a.stderr_}, {"count", a.count}};
}

}  // namespace

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    a.count = values.size();
    if (values.empty()) return a;
    double sum = 0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        a.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
    }
    return a;
}

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

nlohmann::json ResultBundle::to_json() const {
    return {{"provenance", provenance}, {"aggregates", aggregates}, {"raw", raw}};
}

void ResultBundle::write(const std::string& out_dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "bundle.json");
        if (!f) throw std::runtime_error("cannot write bundle.json under " + out_dir);
        f << to_json().dump(2) << '\n';
    }
    for (const auto& [name, content] : csv_files) {
        std::ofstream f(fs::path(out_dir) / name);
        if (!f) throw std::runtime_error("cannot write " + name + " under " + out_dir);
        f << content;
    }
}

void SimulateConfig::validate() const {
    scheme.validate();
    if (trials < 1) throw validation_error("need at least one trial");
    if (threads < 0) throw validation_error("threads must be nonnegative");
    if (!(state_threshold > 0.0 && state_threshold <= 1.0))
        throw validation_error("state threshold must be in (0, 1]");
}

SimulateConfig SimulateConfig::from_json(const nlohmann::json& j) {
    SimulateConfig c;
    c.scheme = SchemeConfig::from_json(j.at("scheme"));
    c.trials = j.value("trials", std::size_t{1});
    c.threads = j.value("threads", 0);
    c.state_threshold = j.value("state_threshold", 0.25);
    c.validate();
    return c;
}

nlohmann::json SimulateConfig::to_json() const {
    return {{"scheme", scheme.to_json()},
            {"trials", trials},
            {"threads", threads},
            {"state_threshold", state_threshold}};
}

ResultBundle cmd_simulate(const SimulateConfig& cfg) {
    cfg.validate();
    std::vector<TrialReport> reports(cfg.trials);

    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.trials));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            reports[t] = run_trial(cfg.scheme, t);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const std::size_t L = cfg.scheme.blocks;
    const double nL = static_cast<double>(cfg.scheme.n);
    std::ostringstream csv;
    csv << "trial,block,E1,E2,E3,msg_error,state1_frac\n";
    std::vector<double> e1r, e2r, e3r, msgr, s1f;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto& r = reports[t];
        for (std::size_t l = 0; l < L; ++l) {
            const double frac =
                1.0 - static_cast<double>(r.stage2_mismatch[l].weight()) / nL;
            csv << t << ',' << l + 1 << ',' << int(r.e1[l]) << ',' << int(r.e2[l]) << ','
                << int(r.e3[l]) << ',' << int(r.msg_error[l]) << ','
                << format_csv_double(frac) << '\n';
        }
        const double dl = static_cast<double>(L);
        e1r.push_back(static_cast<double>(r.e1_count) / dl);
        e2r.push_back(static_cast<double>(r.e2_count) / dl);
        e3r.push_back(static_cast<double>(r.e3_count) / dl);
        msgr.push_back(static_cast<double>(r.msg_error_count) / dl);
        s1f.push_back(r.state1_fraction);
    }

    ResultBundle bundle;
    bundle.provenance = provenance_for("simulate", cfg.to_json());
    bundle.aggregates = {{"e1_rate", to_json(aggregate(e1r))},
                         {"e2_rate", to_json(aggregate(e2r))},
                         {"e3_rate", to_json(aggregate(e3r))},
                         {"msg_error_rate", to_json(aggregate(msgr))},
                         {"state1_fraction", to_json(aggregate(s1f))},
                         {"state_fraction_at_threshold",
                          empirical_state_fraction(reports, cfg.state_threshold)},
                         {"state_threshold", cfg.state_threshold},
                         {"nominal_rate", cfg.scheme.nominal_rate()},
                         {"effective_rate", cfg.scheme.effective_rate()}};
    bundle.raw = nlohmann::json::array();
    for (const auto& r : reports) bundle.raw.push_back(r.to_json());
    bundle.csv_files.emplace_back("simulate_blocks.csv", csv.str());

    std::ostringstream summary;
    summary << "metric,mean,stderr\n";
    for (const auto& [key, agg] :
         std::initializer_list<std::pair<const char*, const std::vector<double>&>>{
             {"e1_rate", e1r},
             {"e2_rate", e2r},
             {"e3_rate", e3r},
             {"msg_error_rate", msgr},
             {"state1_fraction", s1f}}) {
        const auto a = aggregate(agg);
        summary << key << ',' << format_csv_double(a.mean) << ','
                << format_csv_double(a.stderr_) << '\n';
    }
    bundle.csv_files.emplace_back("simulate_summary.csv", summary.str());
    return bundle;
}

void SumcodeConfig::validate() const {
    if (n == 0) throw validation_error("n must be positive");
    if (k > n) throw validation_error("k must not exceed n");
    if (k > gf2::kEnumerationCap) throw resource_limit_error("k exceeds the enumeration cap");
    if (seeds < 1) throw validation_error("need at least one seed");
}

SumcodeConfig SumcodeConfig::from_json(const nlohmann::json& j) {
    SumcodeConfig c;
    c.k = j.value("k", std::size_t{8});
    c.n = j.value("n", std::size_t{32});
    c.seeds = j.value("seeds", std::size_t{100});
    const auto kind = j.value("kind", std::string("random_independent"));
    if (kind == "linear_identical")
        c.kind = CodebookMode::linear_identical;
    else if (kind == "random_independent")
        c.kind = CodebookMode::random_independent;
    else
        throw validation_error("unknown codebook kind '" + kind + "'");
    c.dithered = j.value("dithered", false);
    c.master_seed = j.value("seed", std::uint64_t{0});
    c.validate();
    return c;
}

nlohmann::json SumcodeConfig::to_json() const {
    return {{"k", k},
            {"n", n},
            {"seeds", seeds},
            {"kind", kind == CodebookMode::linear_identical ? "linear_identical"
                                                            : "random_independent"},
            {"dithered", dithered},
            {"seed", master_seed}};
}

ResultBundle cmd_sumcode(const SumcodeConfig& cfg) {
    cfg.validate();
    std::ostringstream csv;
    csv << "seed,log2_card_a,log2_card_b,log2_card_sum,gap\n";
    std::vector<double> gaps;
    nlohmann::json raw = nlohmann::json::array();
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
        NoiseStream rng(trial_seed(cfg.master_seed, s));
        gf2::Codebook a, b;
        if (cfg.kind == CodebookMode::linear_identical) {
            auto g = gf2::BitMatrix::random(cfg.k, cfg.n, rng);
            const auto spec = cfg.dithered
                                  ? gf2::LinearCodeSpec::random_dithered(std::move(g), rng)
                                  : gf2::LinearCodeSpec::undithered(std::move(g));
            a = gf2::enumerate_codebook(spec, 1);
            b = gf2::enumerate_codebook(spec, 2);
        } else {
            a = gf2::random_codebook(cfg.k, cfg.n, rng);
            b = gf2::random_codebook(cfg.k, cfg.n, rng);
        }
        const auto stats = gf2::sum_codebook_stats(a, b);
        gaps.push_back(stats.gap());
        csv << s << ',' << format_csv_double(stats.log2_card_a) << ','
            << format_csv_double(stats.log2_card_b) << ','
            << format_csv_double(stats.log2_card_sum) << ','
            << format_csv_double(stats.gap()) << '\n';
        raw.push_back({{"seed", s},
                       {"log2_card_a", stats.log2_card_a},
                       {"log2_card_b", stats.log2_card_b},
                       {"log2_card_sum", stats.log2_card_sum},
                       {"gap", stats.gap()}});
    }

    ResultBundle bundle;
    bundle.provenance = provenance_for("sumcode", cfg.to_json());
    bundle.aggregates = {{"gap", to_json(aggregate(gaps))}};
    bundle.raw = std::move(raw);
    bundle.csv_files.emplace_back("sumcode_stats.csv", csv.str());
    return bundle;
}

void RegionConfig::validate() const {
    law.validate();
    source.validate();
    if (mode != "qlc" && mode != "cl" && mode != "both")
        throw validation_error("region mode must be qlc, cl or both");
}

RegionConfig RegionConfig::from_json(const nlohmann::json& j) {
    RegionConfig c;
    c.law = QlcInputLaw::from_json(j.at("law"));
    if (j.contains("w_biases")) {
        const auto b = j.at("w_biases").get<std::vector<double>>();
        if (b.size() != 3) throw validation_error("w_biases needs three entries");
        std::copy(b.begin(), b.end(), c.source.w_bias.begin());
    }
    c.mode = j.value("mode", std::string("both"));
    c.validate();
    return c;
}

nlohmann::json RegionConfig::to_json() const {
    return {{"law", law.to_json()},
            {"w_biases", source.w_bias},
            {"mode", mode}};
}

namespace {

void append_polytope_csv(std::ostringstream& out, const std::string& evaluator,
                         const RatePolytope& poly) {
    for (const auto& c : poly.constraints)
        out << evaluator << ',' << c.name << ',' << c.family << ','
            << format_csv_double(c.coeff[0]) << ',' << format_csv_double(c.coeff[1]) << ','
            << format_csv_double(c.coeff[2]) << ',' << format_csv_double(c.bound) << '\n';
}

}  // namespace

ResultBundle cmd_region(const RegionConfig& cfg) {
    cfg.validate();
    ResultBundle bundle;
    bundle.provenance = provenance_for("region", cfg.to_json());
    bundle.raw = nlohmann::json::object();

    std::ostringstream csv;
    csv << "evaluator,name,family,c1,c2,c3,bound\n";
    std::ostringstream diag;
    diag << "evaluator,diagonal_rate_per_user\n";
    if (cfg.mode == "qlc" || cfg.mode == "both") {
        const auto poly = qlc_region(cfg.law, cfg.source);
        bundle.raw["qlc"] = poly.to_json();
        bundle.aggregates["qlc_diagonal"] = poly.diagonal_boundary();
        append_polytope_csv(csv, "qlc", poly);
        diag << "qlc," << format_csv_double(poly.diagonal_boundary()) << '\n';
    }
    if (cfg.mode == "cl" || cfg.mode == "both") {
        const auto poly = cl_region(cfg.law, cfg.source);
        bundle.raw["cl"] = poly.to_json();
        bundle.aggregates["cl_diagonal"] = poly.diagonal_boundary();
        append_polytope_csv(csv, "cl", poly);
        diag << "cl," << format_csv_double(poly.diagonal_boundary()) << '\n';
    }
    bundle.csv_files.emplace_back("region_constraints.csv", csv.str());
    bundle.csv_files.emplace_back("region_diagonal.csv", diag.str());
    return bundle;
}

void DinfoConfig::validate() const {
    channel.validate();
    if (policies.size() != 3) throw validation_error("need exactly three policies");
    if (horizon < 1) throw validation_error("horizon must be positive");
}

DinfoConfig DinfoConfig::from_json(const nlohmann::json& j) {
    DinfoConfig c;
    c.channel = TableChannel::from_json(j.at("channel"));
    c.horizon = j.at("horizon").get<int>();
    for (const auto& p : j.at("policies")) c.policies.push_back(CausalPolicy::from_json(p));
    c.validate();
    return c;
}

nlohmann::json DinfoConfig::to_json() const {
    nlohmann::json pols = nlohmann::json::array();
    for (const auto& p : policies) pols.push_back(p.to_json());
    return {{"channel", channel.to_json()}, {"policies", pols}, {"horizon", horizon}};
}

ResultBundle cmd_dinfo(const DinfoConfig& cfg) {
    cfg.validate();
    const std::array<CausalPolicy, 3> pols{cfg.policies[0], cfg.policies[1], cfg.policies[2]};
    TrajectoryLaw law(cfg.channel, pols, cfg.horizon);
    const auto poly = multiletter_region(cfg.channel, pols, cfg.horizon);

    ResultBundle bundle;
    bundle.provenance = provenance_for("dinfo", cfg.to_json());
    bundle.aggregates = {{"directed_info_rate", law.directed_info_rate()},
                         {"output_entropy", law.output_entropy()},
                         {"horizon", cfg.horizon},
                         {"diagonal", poly.diagonal_boundary()}};
    bundle.raw = poly.to_json();

    std::ostringstream csv;
    csv << "name,family,c1,c2,c3,bound\n";
    for (const auto& c : poly.constraints)
        csv << c.name << ',' << c.family << ',' << format_csv_double(c.coeff[0]) << ','
            << format_csv_double(c.coeff[1]) << ',' << format_csv_double(c.coeff[2]) << ','
            << format_csv_double(c.bound) << '\n';
    bundle.csv_files.emplace_back("dinfo_bounds.csv", csv.str());
    return bundle;
}

void ChannelEntropyConfig::validate() const {
    if (deltas.empty() || state2_probs.empty())
        throw validation_error("delta and q grids must be nonempty");
    for (double d : deltas)
        if (!(d >= 0.0 && d <= 0.5)) throw validation_error("delta must be in [0, 0.5]");
    for (double q : state2_probs)
        if (!(q >= 0.0 && q <= 1.0)) throw validation_error("q must be in [0, 1]");
}

ChannelEntropyConfig ChannelEntropyConfig::from_json(const nlohmann::json& j) {
    ChannelEntropyConfig c;
    if (j.contains("deltas")) c.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("state2_probs"))
        c.state2_probs = j.at("state2_probs").get<std::vector<double>>();
    c.validate();
    return c;
}

nlohmann::json ChannelEntropyConfig::to_json() const {
    return {{"deltas", deltas}, {"state2_probs", state2_probs}};
}

// Single-letter joint (X1, X2, X3, Y) for the parity-gated channel with a
// state mixture: uniform over gate-closed inputs with weight 1-q, uniform
// over gate-open inputs with weight q.
static JointPmf state_mixture_joint(double delta, double q) {
    const ParityGatedMac channel(delta);
    std::vector<Axis> axes{{"X1", 4}, {"X2", 4}, {"X3", 4}, {"Y", 8}};
    JointPmf p = JointPmf::zeros(axes);
    std::size_t idx = 0;
    for (int s1 = 0; s1 < 4; ++s1)
        for (int s2 = 0; s2 < 4; ++s2)
            for (int s3 = 0; s3 < 4; ++s3) {
                const MacInput in = MacInput::from_symbols(s1, s2, s3);
                const double px = channel.state1(in) ? (1.0 - q) / 32.0 : q / 32.0;
                const auto row = channel.pmf(in);
                for (int y = 0; y < 8; ++y, ++idx) p.data()[idx] = px * row[y];
            }
    return p;
}

ResultBundle cmd_channel_entropy(const ChannelEntropyConfig& cfg) {
    cfg.validate();
    std::ostringstream csv;
    csv << "delta,q,closed_form,numeric,abs_err\n";
    nlohmann::json raw = nlohmann::json::array();
    double worst = 0;
    for (double d : cfg.deltas)
        for (double q : cfg.state2_probs) {
            const double closed = conditional_output_entropy(d, q);
            const JointPmf p = state_mixture_joint(d, q);
            const double numeric = conditional_entropy(p, {"Y"}, {"X1", "X2", "X3"});
            const double err = std::abs(closed - numeric);
            worst = std::max(worst, err);
            csv << format_csv_double(d) << ',' << format_csv_double(q) << ','
                << format_csv_double(closed) << ',' << format_csv_double(numeric) << ','
                << format_csv_double(err) << '\n';
            raw.push_back({{"delta", d},
                           {"q", q},
                           {"closed_form", closed},
                           {"numeric", numeric},
                           {"abs_err", err}});
        }

    ResultBundle bundle;
    bundle.provenance = provenance_for("channel-entropy", cfg.to_json());
    bundle.aggregates = {{"max_abs_err", worst}};
    bundle.raw = std::move(raw);
    bundle.csv_files.emplace_back("channel_entropy.csv", csv.str());
    return bundle;
}

}  // namespace macfb
