#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace bilevel::rng {

// SplitMix64 (Steele/Lea/Flood). Used for seed mixing and stream derivation
// so generated testbeds are bit-identical across platforms; std::random
// distributions are unspecified across implementations and never used here.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Combines a base seed with a sequence of tags into one stream seed.
inline std::uint64_t derive_stream(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = base;
    for (std::uint64_t t : tags) {
        SplitMix64 mix(h ^ (t + 0x9e3779b97f4a7c15ULL));
        h = mix.next();
    }
    return h;
}

// xoshiro256++ (Blackman/Vigna), seeded through SplitMix64.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 mix(seed);
        for (auto& word : s_) word = mix.next();
        has_cached_gauss_ = false;
        cached_gauss_ = 0.0;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi], both inclusive, by rejection (unbiased).
    long long uniform_int(long long lo, long long hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t draw;
        do {
            draw = next();
        } while (draw >= limit);
        return lo + static_cast<long long>(draw % span);
    }

    // Standard normal via Box-Muller; the second deviate of each pair is cached.
    double gaussian() {
        if (has_cached_gauss_) {
            has_cached_gauss_ = false;
            return cached_gauss_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_gauss_ = radius * std::sin(angle);
        has_cached_gauss_ = true;
        return radius * std::cos(angle);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    bool has_cached_gauss_;
    double cached_gauss_;
};

}  // namespace bilevel::rng
