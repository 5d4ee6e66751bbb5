#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "macfb/channel.hpp"
#include "macfb/gf2.hpp"
#include "macfb/harness.hpp"
#include "macfb/pmf.hpp"
#include "macfb/region.hpp"
#include "macfb/scheme.hpp"
#include "macfb/trajectory.hpp"

namespace py = pybind11;
using namespace macfb;

namespace {

gf2::BitWord word_from_bits(const std::vector<int>& bits) {
    return gf2::BitWord::from_bits(bits);
}

std::vector<int> word_to_bits(const gf2::BitWord& w) {
    std::vector<int> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w.get(i) ? 1 : 0;
    return out;
}

gf2::LinearCodeSpec spec_from_rows(const std::vector<std::vector<int>>& rows,
                                   const std::vector<std::vector<int>>& dithers) {
    std::vector<gf2::BitWord> r;
    for (const auto& row : rows) r.push_back(gf2::BitWord::from_bits(row));
    auto spec = gf2::LinearCodeSpec::undithered(gf2::BitMatrix::from_rows(std::move(r)));
    if (!dithers.empty()) {
        if (dithers.size() != 3)
            throw validation_error("need exactly three dither rows");
        for (int i = 0; i < 3; ++i)
            spec.dithers[static_cast<std::size_t>(i)] = gf2::BitWord::from_bits(dithers[static_cast<std::size_t>(i)]);
    }
    spec.validate();
    return spec;
}

nlohmann::json json_from_str(const std::string& s) {
    try {
        return nlohmann::json::parse(s);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("json parse error: ") + e.what());
    }
}

}  // namespace

PYBIND11_MODULE(_macfb, m) {
    m.doc() = "Three-user MAC-with-feedback simulation and rate-region toolkit";

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<resource_limit_error>(m, "ResourceLimitError", PyExc_RuntimeError);

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def("mix64", &mix64, py::arg("x"));
    m.def("trial_seed", &trial_seed, py::arg("master_seed"), py::arg("trial_index"));
    m.def("corner_point", &corner_point, py::arg("delta"));
    m.def("conditional_output_entropy", &conditional_output_entropy, py::arg("delta"),
          py::arg("state2_prob"));
    m.def("state_mismatch_fraction_bound", &state_mismatch_fraction_bound, py::arg("eps"),
          py::arg("c"), py::arg("delta"));

    m.def(
        "encode",
        [](const std::vector<std::vector<int>>& generator, const std::vector<int>& message,
           int user, const std::vector<std::vector<int>>& dithers) {
            const auto spec = spec_from_rows(generator, dithers);
            return word_to_bits(gf2::encode(gf2::BitWord::from_bits(message), spec, user));
        },
        py::arg("generator"), py::arg("message"), py::arg("user") = 1,
        py::arg("dithers") = std::vector<std::vector<int>>{});

    m.def(
        "ml_decode_bsc",
        [](const std::vector<int>& received, const std::vector<std::vector<int>>& words,
           double crossover) {
            gf2::Codebook book;
            for (const auto& w : words) book.words.push_back(gf2::BitWord::from_bits(w));
            return gf2::ml_decode_bsc(gf2::BitWord::from_bits(received), book, crossover);
        },
        py::arg("received"), py::arg("codebook"), py::arg("crossover") = 0.0);

    m.def(
        "sum_codebook_stats",
        [](std::size_t k, std::size_t n, std::uint64_t seed, const std::string& kind) {
            NoiseStream rng(seed);
            gf2::Codebook a, b;
            if (kind == "linear_identical") {
                const auto spec = gf2::LinearCodeSpec::undithered(
                    gf2::BitMatrix::random(k, n, rng));
                a = gf2::enumerate_codebook(spec, 1);
                b = gf2::enumerate_codebook(spec, 2);
            } else if (kind == "random_independent") {
                a = gf2::random_codebook(k, n, rng);
                b = gf2::random_codebook(k, n, rng);
            } else {
                throw validation_error("kind must be linear_identical or random_independent");
            }
            const auto s = gf2::sum_codebook_stats(a, b);
            return py::make_tuple(s.log2_card_a, s.log2_card_b, s.log2_card_sum);
        },
        py::arg("k"), py::arg("n"), py::arg("seed") = 0,
        py::arg("kind") = "random_independent");

    py::class_<MacOutput>(m, "MacOutput")
        .def_readonly("y1", &MacOutput::y1)
        .def_readonly("y21", &MacOutput::y21)
        .def_readonly("y22", &MacOutput::y22)
        .def("symbol", &MacOutput::symbol);

    py::class_<ParityGatedMac>(m, "ParityGatedMac")
        .def(py::init([](double delta, const std::string& rule) {
                 return ParityGatedMac(delta, rule == "x31" ? StateRule::third_first_part
                                                            : StateRule::third_second_part);
             }),
             py::arg("delta"), py::arg("state_rule") = "x32")
        .def_property_readonly("delta", &ParityGatedMac::delta)
        .def("state1",
             [](const ParityGatedMac& ch, int s1, int s2, int s3) {
                 return ch.state1(MacInput::from_symbols(s1, s2, s3));
             })
        .def("pmf",
             [](const ParityGatedMac& ch, int s1, int s2, int s3) {
                 const auto row = ch.pmf(MacInput::from_symbols(s1, s2, s3));
                 return std::vector<double>(row.begin(), row.end());
             })
        .def("sample",
             [](const ParityGatedMac& ch, int s1, int s2, int s3, std::uint64_t seed) {
                 NoiseStream rng(seed);
                 return ch.step(MacInput::from_symbols(s1, s2, s3), rng);
             })
        .def("to_table_json",
             [](const ParityGatedMac& ch) { return ch.to_table().to_json().dump(); });

    py::class_<JointPmf>(m, "JointPmf")
        .def(py::init([](const std::vector<std::pair<std::string, int>>& axes,
                         const std::vector<double>& probs) {
            std::vector<Axis> ax;
            for (const auto& [name, size] : axes) ax.push_back({name, size});
            JointPmf p(ax, probs);
            p.validate(1e-9);
            return p;
        }))
        .def("entropy", [](const JointPmf& p,
                           const std::vector<std::string>& vars) { return entropy(p, vars); })
        .def("conditional_entropy",
             [](const JointPmf& p, const std::vector<std::string>& a,
                const std::vector<std::string>& b) { return conditional_entropy(p, a, b); })
        .def("mutual_info",
             [](const JointPmf& p, const std::vector<std::string>& a,
                const std::vector<std::string>& b, const std::vector<std::string>& c) {
                 return mutual_info(p, a, b, c);
             },
             py::arg("a"), py::arg("b"), py::arg("cond") = std::vector<std::string>{})
        .def("marginal_probs",
             [](const JointPmf& p, const std::vector<std::string>& keep) {
                 const auto m = p.marginal(keep);
                 return std::vector<double>(m.probs().begin(), m.probs().end());
             });

    py::class_<TrialReport>(m, "TrialReport")
        .def_readonly("e1_count", &TrialReport::e1_count)
        .def_readonly("e2_count", &TrialReport::e2_count)
        .def_readonly("e3_count", &TrialReport::e3_count)
        .def_readonly("msg_error_count", &TrialReport::msg_error_count)
        .def_readonly("state1_fraction", &TrialReport::state1_fraction)
        .def_readonly("nominal_rate", &TrialReport::nominal_rate)
        .def_readonly("effective_rate", &TrialReport::effective_rate)
        .def("to_json", [](const TrialReport& r) { return r.to_json().dump(); });

    m.def(
        "run_trial",
        [](std::size_t k, std::size_t n, std::size_t blocks, double delta,
           const std::string& codebook, std::uint64_t seed, std::uint64_t trial_index) {
            SchemeConfig cfg;
            cfg.k = k;
            cfg.n = n;
            cfg.blocks = blocks;
            cfg.delta = delta;
            cfg.codebook = codebook == "random_independent"
                               ? CodebookMode::random_independent
                               : CodebookMode::linear_identical;
            cfg.master_seed = seed;
            return run_trial(cfg, trial_index);
        },
        py::arg("k"), py::arg("n"), py::arg("blocks"), py::arg("delta"),
        py::arg("codebook") = "linear_identical", py::arg("seed") = 0,
        py::arg("trial_index") = 0);

    m.def("directed_info_rate", [](const std::string& channel_json, int horizon) {
        const auto table = TableChannel::from_json(json_from_str(channel_json));
        std::array<CausalPolicy, 3> pols{
            CausalPolicy::uniform(table.input_sizes[0], horizon, table.output_size),
            CausalPolicy::uniform(table.input_sizes[1], horizon, table.output_size),
            CausalPolicy::uniform(table.input_sizes[2], horizon, table.output_size)};
        return TrajectoryLaw(table, pols, horizon).directed_info_rate();
    });

    m.def("region_json", [](const std::string& config_json) {
        const auto cfg = RegionConfig::from_json(json_from_str(config_json));
        return cmd_region(cfg).to_json().dump();
    });

    m.def("qlc_region_bit_pair", [](double delta, int u_size) {
        const auto table = ParityGatedMac(delta).to_table();
        const auto poly = qlc_region(QlcInputLaw::bit_pair_default(table, u_size));
        return poly.to_json().dump();
    }, py::arg("delta"), py::arg("u_size") = 2);

    m.attr("__version__") = "0.1.0";
}
