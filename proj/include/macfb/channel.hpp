#ifndef MACFB_CHANNEL_HPP
#define MACFB_CHANNEL_HPP

#include <array>
#include <span>
#include <vector>

#include "json.hpp"
#include "macfb/common.hpp"

namespace macfb {

// Generic memoryless three-input channel as a conditional pmf table.
// Layout of `pmf`: row-major with x1 slowest, then x2, then x3, y fastest.
struct TableChannel {
    std::array<int, 3> input_sizes{2, 2, 2};
    int output_size = 2;
    std::vector<double> pmf;

    void validate(double tol = 1e-12) const;

    std::size_t row_offset(int x1, int x2, int x3) const {
        return ((static_cast<std::size_t>(x1) * input_sizes[1] + x2) * input_sizes[2] + x3) *
               output_size;
    }
    double prob(int x1, int x2, int x3, int y) const { return pmf[row_offset(x1, x2, x3) + y]; }
    std::span<const double> row(int x1, int x2, int x3) const {
        return {pmf.data() + row_offset(x1, x2, x3), static_cast<std::size_t>(output_size)};
    }
    // H(Y | x) in bits for one input triple.
    double row_entropy(int x1, int x2, int x3) const;

    static TableChannel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Input of the parity-gated channel: user i contributes the bit pair
// (first-part, second-part). Symbol encoding: first part is bit 0.
struct MacInput {
    std::array<std::array<int, 2>, 3> bits{};  // bits[user][part]

    int symbol(int user) const { return bits[user][0] | (bits[user][1] << 1); }
    static MacInput from_symbols(int s1, int s2, int s3);
};

// Output triple (y1, y21, y22); symbol = y1 | y21<<1 | y22<<2.
struct MacOutput {
    int y1 = 0, y21 = 0, y22 = 0;
    int symbol() const { return y1 | (y21 << 1) | (y22 << 2); }
    static MacOutput from_symbol(int s) { return {s & 1, (s >> 1) & 1, (s >> 2) & 1}; }
};

// Which input decides whether the second channel runs clean: the canonical
// rule gates on the third user's second part (x32 == x12 ^ x22); the
// variant gates on its first part instead, kept for sensitivity checks.
enum class StateRule { third_second_part, third_first_part };

// Three-user MAC made of two parallel channels. The first is a binary adder
// with a Ber(delta) flip:  y1 = x11 ^ x21 ^ x31 ^ N.  The second carries
// (x12, x22) through two independent BSC(delta) legs when the parity gate
// holds (state 1), and outputs two fresh uniform bits otherwise (state 2).
class ParityGatedMac {
  public:
    explicit ParityGatedMac(double delta, StateRule rule = StateRule::third_second_part);

    double delta() const { return delta_; }
    StateRule rule() const { return rule_; }

    bool state1(const MacInput& in) const;

    // Consumes exactly three uniforms: y1 flip, y21 flip, y22 flip.
    MacOutput step(const MacInput& in, NoiseStream& rng) const;

    // Exact conditional law over the 8 output symbols.
    std::array<double, 8> pmf(const MacInput& in) const;

    // Same law as a TableChannel over symbols (x_i in [0,4), y in [0,8)).
    TableChannel to_table() const;

  private:
    double delta_;
    StateRule rule_;
};

// H(Y | X1 X2 X3) in bits for the parity-gated channel when a fraction
// `state2_prob` of uses sees the gate open:  (1 + 2(1-q)) h(delta) + 2 q.
double conditional_output_entropy(double delta, double state2_prob);

}  // namespace macfb

#endif  // MACFB_CHANNEL_HPP
