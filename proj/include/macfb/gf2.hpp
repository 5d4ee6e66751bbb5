#ifndef MACFB_GF2_HPP
#define MACFB_GF2_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "macfb/common.hpp"

namespace macfb::gf2 {

// Dense binary vector. Bit i lives in blocks_[i/64] at position i%64.
class BitWord {
  public:
    BitWord() = default;
    explicit BitWord(std::size_t n) : n_(n), blocks_((n + 63) / 64, 0) {}

    static BitWord from_bits(std::span<const int> bits);
    static BitWord from_bit_string(const std::string& s);  // "0101..."
    static BitWord random(std::size_t n, NoiseStream& rng);

    // Word whose bit j is bit j of `value`; used to map message indices to
    // message words (bit 0 = first generator row).
    static BitWord from_value(std::uint64_t value, std::size_t n);

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (blocks_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t(1) << (i & 63);
        if (v)
            blocks_[i >> 6] |= mask;
        else
            blocks_[i >> 6] &= ~mask;
    }

    void xor_with(const BitWord& other);
    std::size_t weight() const;
    std::size_t hamming_distance(const BitWord& other) const;
    bool is_zero() const { return weight() == 0; }

    friend BitWord operator^(BitWord a, const BitWord& b) {
        a.xor_with(b);
        return a;
    }
    bool operator==(const BitWord&) const = default;

    std::span<const std::uint64_t> blocks() const { return blocks_; }
    std::uint64_t low_bits() const { return blocks_.empty() ? 0 : blocks_[0]; }

    // Hex serialization. Leftmost character covers the lowest column indices;
    // within a character the least significant bit is the lowest index, so
    // the length-8 word 10000000 (only bit 0 set) prints as "10".
    std::string to_hex() const;
    static BitWord from_hex(const std::string& s, std::size_t n);

    std::string to_bit_string() const;

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> blocks_;
};

// k rows of common length n.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : cols_(cols), rows_(rows, BitWord(cols)) {}

    static BitMatrix identity(std::size_t n);
    static BitMatrix random(std::size_t rows, std::size_t cols, NoiseStream& rng);
    static BitMatrix from_rows(std::vector<BitWord> rows);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    const BitWord& row(std::size_t i) const { return rows_.at(i); }
    BitWord& row(std::size_t i) { return rows_.at(i); }

    std::size_t rank() const;
    bool operator==(const BitMatrix&) const = default;

    // "k n" header line followed by one hex row per line.
    std::string to_hex_text() const;
    static BitMatrix from_hex_text(const std::string& text);

  private:
    std::size_t cols_ = 0;
    std::vector<BitWord> rows_;
};

// Generator matrix plus one dither word per user: user i transmits
// w G ^ dither[i]. All-zero dithers give a plain linear code.
struct LinearCodeSpec {
    BitMatrix generator;             // k x n
    std::array<BitWord, 3> dithers;  // length n each

    static LinearCodeSpec undithered(BitMatrix g);
    static LinearCodeSpec random_dithered(BitMatrix g, NoiseStream& rng);

    std::size_t message_length() const { return generator.rows(); }
    std::size_t block_length() const { return generator.cols(); }
    void validate() const;

    // One hex row per line, preceded by a "k n" header; the three dither
    // rows follow the generator rows.
    std::string to_hex_text() const;
    static LinearCodeSpec from_hex_text(const std::string& text);
};

enum class CodebookKind { linear_coset, explicit_list };

// Materialized codebook, indexed by message value.
struct Codebook {
    std::vector<BitWord> words;
    CodebookKind kind = CodebookKind::explicit_list;

    std::size_t size() const { return words.size(); }
    std::size_t word_length() const { return words.empty() ? 0 : words[0].size(); }
    std::size_t distinct_count() const;
};

inline constexpr std::size_t kEnumerationCap = 20;                        // max k
inline constexpr std::uint64_t kSumSetCap = std::uint64_t(1) << 26;       // max |A|*|B|

// w G ^ dither[user]; user in {1,2,3}.
BitWord encode(const BitWord& message, const LinearCodeSpec& code, int user);

// All 2^k codewords of one user's coset, ordered by message value.
Codebook enumerate_codebook(const LinearCodeSpec& code, int user,
                            std::size_t cap = kEnumerationCap);

// 2^k i.i.d. uniform words of length n.
Codebook random_codebook(std::size_t k, std::size_t n, NoiseStream& rng);

struct SumCodebookStats {
    double log2_card_a = 0;
    double log2_card_b = 0;
    double log2_card_sum = 0;
    double gap() const { return log2_card_sum - log2_card_a; }
};

// Cardinalities (as log2 of distinct-word counts) of A, B and A ^ B.
SumCodebookStats sum_codebook_stats(const Codebook& a, const Codebook& b,
                                    std::uint64_t cap = kSumSetCap);

// Minimum-Hamming-distance decoding, which is ML on a BSC with crossover
// below 1/2. Ties resolve to the smallest message index.
std::size_t ml_decode_bsc(const BitWord& received, const Codebook& candidates,
                          double crossover);

}  // namespace macfb::gf2

#endif  // MACFB_GF2_HPP
