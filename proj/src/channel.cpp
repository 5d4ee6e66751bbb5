#include "macfb/channel.hpp"

#include <cmath>

namespace macfb {

void TableChannel::validate(double tol) const {
    if (input_sizes[0] < 1 || input_sizes[1] < 1 || input_sizes[2] < 1 || output_size < 1)
        throw validation_error("channel alphabets must be nonempty");
    const std::size_t expected = static_cast<std::size_t>(input_sizes[0]) * input_sizes[1] *
                                 input_sizes[2] * output_size;
    if (pmf.size() != expected)
        throw validation_error("channel pmf size does not match alphabet sizes");
    for (double p : pmf)
        if (!(p >= 0.0)) throw validation_error("channel pmf entries must be nonnegative");
    for (int x1 = 0; x1 < input_sizes[0]; ++x1)
        for (int x2 = 0; x2 < input_sizes[1]; ++x2)
            for (int x3 = 0; x3 < input_sizes[2]; ++x3) {
                double s = 0;
                for (int y = 0; y < output_size; ++y) s += prob(x1, x2, x3, y);
                if (std::abs(s - 1.0) > tol)
                    throw validation_error("channel pmf row does not sum to 1");
            }
}

double TableChannel::row_entropy(int x1, int x2, int x3) const {
    double h = 0;
    for (double p : row(x1, x2, x3))
        if (p > 0) h -= p * std::log2(p);
    return h;
}

TableChannel TableChannel::from_json(const nlohmann::json& j) {
    TableChannel ch;
    const auto& sizes = j.at("input_sizes");
    if (!sizes.is_array() || sizes.size() != 3)
        throw validation_error("channel json needs three input sizes");
    for (int i = 0; i < 3; ++i) ch.input_sizes[i] = sizes[i].get<int>();
    ch.output_size = j.at("output_size").get<int>();
    ch.pmf = j.at("pmf").get<std::vector<double>>();
    ch.validate();
    return ch;
}

nlohmann::json TableChannel::to_json() const {
    return {{"input_sizes", input_sizes}, {"output_size", output_size}, {"pmf", pmf}};
}

MacInput MacInput::from_symbols(int s1, int s2, int s3) {
    for (int s : {s1, s2, s3})
        if (s < 0 || s > 3) throw validation_error("input symbol must be in [0, 4)");
    MacInput in;
    in.bits = {{{s1 & 1, (s1 >> 1) & 1}, {s2 & 1, (s2 >> 1) & 1}, {s3 & 1, (s3 >> 1) & 1}}};
    return in;
}

ParityGatedMac::ParityGatedMac(double delta, StateRule rule) : delta_(delta), rule_(rule) {
    if (!(delta >= 0.0 && delta <= 0.5))
        throw validation_error("channel delta must be in [0, 0.5]");
}

bool ParityGatedMac::state1(const MacInput& in) const {
    const int gate = rule_ == StateRule::third_second_part ? in.bits[2][1] : in.bits[2][0];
    return gate == (in.bits[0][1] ^ in.bits[1][1]);
}

MacOutput ParityGatedMac::step(const MacInput& in, NoiseStream& rng) const {
    const double leg = state1(in) ? delta_ : 0.5;
    MacOutput out;
    out.y1 = in.bits[0][0] ^ in.bits[1][0] ^ in.bits[2][0] ^ (rng.bernoulli(delta_) ? 1 : 0);
    out.y21 = in.bits[0][1] ^ (rng.bernoulli(leg) ? 1 : 0);
    out.y22 = in.bits[1][1] ^ (rng.bernoulli(leg) ? 1 : 0);
    return out;
}

std::array<double, 8> ParityGatedMac::pmf(const MacInput& in) const {
    const double leg = state1(in) ? delta_ : 0.5;
    const int adder = in.bits[0][0] ^ in.bits[1][0] ^ in.bits[2][0];
    std::array<double, 8> out{};
    for (int s = 0; s < 8; ++s) {
        const MacOutput y = MacOutput::from_symbol(s);
        const double p1 = y.y1 == adder ? 1.0 - delta_ : delta_;
        const double p21 = y.y21 == in.bits[0][1] ? 1.0 - leg : leg;
        const double p22 = y.y22 == in.bits[1][1] ? 1.0 - leg : leg;
        out[s] = p1 * p21 * p22;
    }
    return out;
}

TableChannel ParityGatedMac::to_table() const {
    TableChannel ch;
    ch.input_sizes = {4, 4, 4};
    ch.output_size = 8;
    ch.pmf.resize(4 * 4 * 4 * 8);
    for (int s1 = 0; s1 < 4; ++s1)
        for (int s2 = 0; s2 < 4; ++s2)
            for (int s3 = 0; s3 < 4; ++s3) {
                const auto row = pmf(MacInput::from_symbols(s1, s2, s3));
                for (int y = 0; y < 8; ++y) ch.pmf[ch.row_offset(s1, s2, s3) + y] = row[y];
            }
    ch.validate();
    return ch;
}

double conditional_output_entropy(double delta, double state2_prob) {
    if (!(delta >= 0.0 && delta <= 0.5))
        throw validation_error("delta must be in [0, 0.5]");
    if (!(state2_prob >= 0.0 && state2_prob <= 1.0))
        throw validation_error("state2 probability must be in [0, 1]");
    const double q = state2_prob;
    return (1.0 + 2.0 * (1.0 - q)) * binary_entropy(delta) + 2.0 * q;
}

}  // namespace macfb
