#pragma once

#include <cstdint>
#include <limits>

namespace circuitlab {

// Deterministic 64-bit generator (splitmix64). Every experiment derives all
// of its randomness from one of these, so identical seeds reproduce identical
// outputs bit for bit on any platform. std::mt19937 + distributions are not
// portable across standard libraries, which is why we roll our own stream.
class rng {
public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Unbiased integer in [0, n). n must be nonzero.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Low k bits uniform, rest zero. k <= 64.
    std::uint64_t next_bits(unsigned k) {
        if (k == 0) return 0;
        return next_u64() >> (64 - k);
    }

    // Independent child stream; deterministic in (current state, tag).
    rng derive(std::uint64_t tag) const {
        rng child(state_ ^ (0x632be59bd9b4e019ull + tag * 0x9e3779b97f4a7c15ull));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace circuitlab
