#pragma once

#include <cstdint>
#include <limits>

namespace pilot_borrow {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-style key derivation: every (master, a, b) triple maps to its own
/// starting state, independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (a + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ (b + 0x85157af5a2d1b0c3ULL));
    return h;
}

/// SplitMix64 stream. Small state, 2^64 period, and cheap to construct per
/// replicate. Satisfies UniformRandomBitGenerator.
class RandomStream {
   public:
    using result_type = std::uint64_t;

    explicit constexpr RandomStream(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

   private:
    std::uint64_t state_;
};

}  // namespace pilot_borrow
