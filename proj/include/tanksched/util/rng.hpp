#pragma once

#include <cstdint>
#include <string>

namespace tanksched {

// Stateless 64-bit mixer (splitmix64 finalizer). Used for seed derivation and
// stream splitting; every derived stream is a pure function of its inputs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
}

// FNV-1a over the bytes of a string, for mixing identifiers into seeds.
inline std::uint64_t hash_text(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256** with splitmix64 seeding. Chosen over std::mt19937_64 because
// the normal transform below is also pinned, giving byte-identical scenario
// streams on any platform/compiler.
class Rng {
public:
    static constexpr const char* kName = "xoshiro256ss-boxmuller-v1";

    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
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

    // Uniform in [0,1) with 53 significant bits.
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (no spare caching, so the draw count per
    // call is fixed and streams can be split freely).
    double next_normal();

    // Draw from N(0, sigma) truncated to [-bound, bound] by rejection.
    double next_truncated_normal(double sigma, double bound);

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace tanksched
