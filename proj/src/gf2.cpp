#include "macfb/gf2.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_set>

namespace macfb::gf2 {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw validation_error(std::string("invalid hex character '") + c + "'");
}

struct WordHash {
    std::size_t operator()(const BitWord& w) const {
        std::uint64_t h = 0x2545f4914f6cdd1dull;
        for (std::uint64_t b : w.blocks()) h = mix64(h ^ b);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

BitWord BitWord::from_bits(std::span<const int> bits) {
    BitWord w(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1)
            throw validation_error("bit values must be 0 or 1");
        w.set(i, bits[i] != 0);
    }
    return w;
}

BitWord BitWord::from_bit_string(const std::string& s) {
    BitWord w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1')
            throw validation_error("bit string must contain only 0/1");
        w.set(i, s[i] == '1');
    }
    return w;
}

BitWord BitWord::random(std::size_t n, NoiseStream& rng) {
    BitWord w(n);
    for (auto& block : w.blocks_) block = rng.raw();
    if (n & 63) w.blocks_.back() &= (std::uint64_t(1) << (n & 63)) - 1;
    return w;
}

BitWord BitWord::from_value(std::uint64_t value, std::size_t n) {
    if (n < 64 && (value >> n) != 0)
        throw validation_error("message value does not fit in word length");
    BitWord w(n);
    if (!w.blocks_.empty()) w.blocks_[0] = value;
    return w;
}

void BitWord::xor_with(const BitWord& other) {
    if (other.n_ != n_) throw validation_error("BitWord length mismatch in xor");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] ^= other.blocks_[i];
}

std::size_t BitWord::weight() const {
    std::size_t w = 0;
    for (std::uint64_t b : blocks_) w += std::popcount(b);
    return w;
}

std::size_t BitWord::hamming_distance(const BitWord& other) const {
    if (other.n_ != n_) throw validation_error("BitWord length mismatch in distance");
    std::size_t d = 0;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        d += std::popcount(blocks_[i] ^ other.blocks_[i]);
    return d;
}

std::string BitWord::to_hex() const {
    std::string out((n_ + 3) / 4, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) out[i / 4] = kHexDigits[hex_value(out[i / 4]) | (1 << (i % 4))];
    return out;
}

BitWord BitWord::from_hex(const std::string& s, std::size_t n) {
    if (s.size() != (n + 3) / 4)
        throw validation_error("hex string length does not match word length");
    BitWord w(n);
    for (std::size_t i = 0; i < n; ++i)
        if ((hex_value(s[i / 4]) >> (i % 4)) & 1) w.set(i, true);
    return w;
}

std::string BitWord::to_bit_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.row(i).set(i, true);
    return m;
}

BitMatrix BitMatrix::random(std::size_t rows, std::size_t cols, NoiseStream& rng) {
    BitMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) m.row(i) = BitWord::random(cols, rng);
    return m;
}

BitMatrix BitMatrix::from_rows(std::vector<BitWord> rows) {
    if (rows.empty()) throw validation_error("BitMatrix needs at least one row");
    BitMatrix m;
    m.cols_ = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != m.cols_) throw validation_error("BitMatrix rows must share one length");
    m.rows_ = std::move(rows);
    return m;
}

std::size_t BitMatrix::rank() const {
    std::vector<BitWord> work = rows_;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < work.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < work.size() && !work[pivot].get(col)) ++pivot;
        if (pivot == work.size()) continue;
        std::swap(work[rank], work[pivot]);
        for (std::size_t r = 0; r < work.size(); ++r)
            if (r != rank && work[r].get(col)) work[r].xor_with(work[rank]);
        ++rank;
    }
    return rank;
}

std::string BitMatrix::to_hex_text() const {
    std::ostringstream out;
    out << rows() << ' ' << cols() << '\n';
    for (const auto& r : rows_) out << r.to_hex() << '\n';
    return out.str();
}

BitMatrix BitMatrix::from_hex_text(const std::string& text) {
    std::istringstream in(text);
    std::size_t k = 0, n = 0;
    if (!(in >> k >> n)) throw validation_error("hex text must start with 'k n' header");
    if (n == 0) throw validation_error("matrix needs at least one column");
    BitMatrix m(k, n);
    std::string line;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(in >> line)) throw validation_error("hex text ended before all rows");
        m.row(i) = BitWord::from_hex(line, n);
    }
    return m;
}

LinearCodeSpec LinearCodeSpec::undithered(BitMatrix g) {
    LinearCodeSpec spec;
    const std::size_t n = g.cols();
    spec.generator = std::move(g);
    spec.dithers = {BitWord(n), BitWord(n), BitWord(n)};
    return spec;
}

LinearCodeSpec LinearCodeSpec::random_dithered(BitMatrix g, NoiseStream& rng) {
    LinearCodeSpec spec;
    const std::size_t n = g.cols();
    spec.generator = std::move(g);
    for (auto& d : spec.dithers) d = BitWord::random(n, rng);
    return spec;
}

void LinearCodeSpec::validate() const {
    if (generator.rows() == 0 || generator.cols() == 0)
        throw validation_error("generator matrix must be nonempty");
    for (const auto& d : dithers)
        if (d.size() != generator.cols())
            throw validation_error("dither length must equal code block length");
}

std::string LinearCodeSpec::to_hex_text() const {
    validate();
    std::ostringstream out;
    out << generator.rows() << ' ' << generator.cols() << '\n';
    for (std::size_t i = 0; i < generator.rows(); ++i) out << generator.row(i).to_hex() << '\n';
    for (const auto& d : dithers) out << d.to_hex() << '\n';
    return out.str();
}

LinearCodeSpec LinearCodeSpec::from_hex_text(const std::string& text) {
    std::istringstream in(text);
    std::size_t k = 0, n = 0;
    if (!(in >> k >> n)) throw validation_error("hex text must start with 'k n' header");
    std::vector<BitWord> rows;
    std::string line;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(in >> line)) throw validation_error("hex text ended before all generator rows");
        rows.push_back(BitWord::from_hex(line, n));
    }
    LinearCodeSpec spec;
    spec.generator = BitMatrix::from_rows(std::move(rows));
    for (auto& d : spec.dithers) {
        if (!(in >> line)) throw validation_error("hex text ended before all dither rows");
        d = BitWord::from_hex(line, n);
    }
    spec.validate();
    return spec;
}

std::size_t Codebook::distinct_count() const {
    std::unordered_set<BitWord, WordHash> seen(words.begin(), words.end());
    return seen.size();
}

BitWord encode(const BitWord& message, const LinearCodeSpec& code, int user) {
    if (user < 1 || user > 3) throw validation_error("user index must be 1, 2 or 3");
    if (message.size() != code.generator.rows())
        throw validation_error("message length must equal generator row count");
    BitWord word = code.dithers[static_cast<std::size_t>(user - 1)];
    for (std::size_t j = 0; j < message.size(); ++j)
        if (message.get(j)) word.xor_with(code.generator.row(j));
    return word;
}

Codebook enumerate_codebook(const LinearCodeSpec& code, int user, std::size_t cap) {
    const std::size_t k = code.generator.rows();
    if (k > cap) throw resource_limit_error("codebook enumeration exceeds k cap");
    Codebook book;
    book.kind = CodebookKind::linear_coset;
    book.words.reserve(std::size_t(1) << k);
    // Gray-free direct fill: word(m) = word(m without top bit) ^ row(top bit).
    book.words.push_back(code.dithers[static_cast<std::size_t>(user - 1)]);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t have = book.words.size();
        for (std::size_t m = 0; m < have; ++m) {
            BitWord w = book.words[m];
            w.xor_with(code.generator.row(j));
            book.words.push_back(std::move(w));
        }
    }
    return book;
}

Codebook random_codebook(std::size_t k, std::size_t n, NoiseStream& rng) {
    if (k > kEnumerationCap) throw resource_limit_error("codebook enumeration exceeds k cap");
    Codebook book;
    book.kind = CodebookKind::explicit_list;
    const std::size_t count = std::size_t(1) << k;
    book.words.reserve(count);
    for (std::size_t m = 0; m < count; ++m) book.words.push_back(BitWord::random(n, rng));
    return book;
}

SumCodebookStats sum_codebook_stats(const Codebook& a, const Codebook& b, std::uint64_t cap) {
    if (a.words.empty() || b.words.empty())
        throw validation_error("sum codebook stats need nonempty codebooks");
    if (a.word_length() != b.word_length())
        throw validation_error("sum codebook stats need equal word lengths");
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(a.words.size()) * static_cast<std::uint64_t>(b.words.size());
    if (pairs > cap) throw resource_limit_error("sum set enumeration exceeds pair cap");

    std::unordered_set<BitWord, WordHash> sums;
    sums.reserve(a.words.size() * 2);
    for (const auto& wa : a.words)
        for (const auto& wb : b.words) sums.insert(wa ^ wb);

    SumCodebookStats stats;
    stats.log2_card_a = std::log2(static_cast<double>(a.distinct_count()));
    stats.log2_card_b = std::log2(static_cast<double>(b.distinct_count()));
    stats.log2_card_sum = std::log2(static_cast<double>(sums.size()));
    return stats;
}

std::size_t ml_decode_bsc(const BitWord& received, const Codebook& candidates, double crossover) {
    if (candidates.words.empty()) throw validation_error("ml decode needs candidates");
    if (!(crossover >= 0.0 && crossover < 0.5))
        throw validation_error("ml decode needs crossover in [0, 0.5)");
    std::size_t best = 0;
    std::size_t best_dist = received.hamming_distance(candidates.words[0]);
    for (std::size_t m = 1; m < candidates.words.size(); ++m) {
        const std::size_t d = received.hamming_distance(candidates.words[m]);
        if (d < best_dist) {
            best_dist = d;
            best = m;
        }
    }
    return best;
}

}  // namespace macfb::gf2
