#pragma once

#include <cstdint>
#include <random>

namespace pqspace {

// Seeded generator wrapper. Every sampled code path takes an explicit 64-bit
// seed and derives values only through these helpers, so identical seeds give
// identical output bytes regardless of the standard library's distribution
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Worker substream: deterministic per (seed, stream) pair.
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection-free multiply-shift would bias tiny bounds negligibly,
        // but exactness is cheap here.
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    bool bernoulli(double p) { return next_unit() < p; }

private:
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 step over the stream index, folded into the seed.
        std::uint64_t z = stream + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return seed ^ z;
    }

    std::mt19937_64 engine_;
};

} // namespace pqspace
