#pragma once

#include <cstdint>

// Seeded randomness helpers with pinned bit-level behavior. The standard
// distributions are implementation-defined, which would break byte-exact
// reproducibility across toolchains, so we roll the few draws we need.
namespace crossvote {

struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    uint64_t uniform_int(uint64_t n) {
        // modulo bias is negligible for n << 2^64 and keeps draws cheap
        return next() % n;
    }
};

// Derives an independent stream seed, used for per-episode world seeds.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    SplitMix64 s(base ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL));
    return s.next();
}

}  // namespace crossvote
