#pragma once

#include <cassert>
#include <cstdint>

namespace binae {

// One splitmix64 step. Used only to expand seeds into engine state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna). A std engine would work, but the
// distributions on top of it are not bit-portable across standard
// libraries; everything here is pinned so identical seeds give identical
// experiments on any platform.
//
// Substreams: Rng(seed, stream) derives independent state per stream id.
// Experiments give each trial its own stream so results do not depend on
// how trials are scheduled across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(seed, stream);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, n), unbiased (rejection sampling, no modulo bias).
    std::uint64_t bounded(std::uint64_t n) {
        assert(n >= 1);
        const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next();
            if (r >= reject_below) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace binae
