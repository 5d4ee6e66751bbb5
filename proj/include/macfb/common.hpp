#ifndef MACFB_COMMON_HPP
#define MACFB_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace macfb {

// Bad user input: dimension mismatches, malformed configs, unknown names.
// The CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An exhaustive operation would exceed its configured cap.
struct resource_limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary entropy in bits, h(0) = h(1) = 0.
inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// splitmix64 finalizer. Reference vectors (also in the README):
//   mix64(0) = 0xe220a8397b1dcdaf
//   mix64(1) = 0x910a2dec89025cc1
//   mix64(2) = 0x975835de1c9756ce
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed of the stream owned by one trial. Every run derives all randomness
// from (master_seed, trial_index) through this one function, so results are
// reproducible no matter how trials are scheduled.
//   trial_seed(42, 0)     = 0x4d9b3f1ec9cf6b1b
//   trial_seed(42, 1)     = 0x7eb3b394ac9efc29
//   trial_seed(0xfeed, 7) = 0x80e7c5c4633df382
inline constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return mix64(master_seed ^ mix64(trial_index));
}

// Substream tags, mixed into a trial seed with trial_seed(seed, tag).
// Keeps codebook draws, message draws and channel noise independent.
inline constexpr std::uint64_t kStreamCodebook = 0x636f6465;  // "code"
inline constexpr std::uint64_t kStreamMessages = 0x6d736773;  // "msgs"
inline constexpr std::uint64_t kStreamChannel = 0x6e6f6973;   // "nois"

// Deterministic source of uniforms and Bernoulli draws. mt19937_64 output is
// fixed by the standard, and the uniform mapping below is explicit, so a
// stream is bit-reproducible across platforms.
class NoiseStream {
  public:
    explicit NoiseStream(std::uint64_t seed) : rng_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    bool bit() { return (rng_() >> 63) != 0; }

    std::uint64_t raw() { return rng_(); }

  private:
    std::mt19937_64 rng_;
};

inline constexpr const char* kVersionString = "macfb 0.1.0";

}  // namespace macfb

#endif  // MACFB_COMMON_HPP
