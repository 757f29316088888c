#pragma once

#include <cstdint>

namespace tpcs {

/// Deterministic splittable pseudo-random stream (xoshiro256** seeded with
/// SplitMix64). Equal seeds produce bit-identical output on every platform.
/// Per-trial child streams are derived from (seed, trial index), so the
/// samples drawn by a trial never depend on how trials are scheduled
/// across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    /// Independent stream for one trial of a run with the given root seed.
    static Rng child(std::uint64_t seed, std::uint64_t trial_index) {
        std::uint64_t x = seed;
        std::uint64_t mixed = splitmix64(x) ^ (trial_index + 0x9E3779B97F4A7C15ULL);
        return Rng(splitmix64(mixed));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in [0, bound), unbiased via rejection. bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
};

} // namespace tpcs
