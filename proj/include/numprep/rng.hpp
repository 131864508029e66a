#pragma once

#include <cstdint>

namespace numprep::rng {

/// splitmix64 step. Small, fast, and fully portable; used everywhere the
/// project needs reproducible randomness so results do not depend on the
/// standard library's distribution implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a stream index.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, n) via rejection sampling. n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// Uniform integer in [a, b], inclusive.
    int uniform_int(int a, int b) {
        return a + static_cast<int>(next_below(static_cast<std::uint64_t>(b - a + 1)));
    }

    bool chance(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

}  // namespace numprep::rng
