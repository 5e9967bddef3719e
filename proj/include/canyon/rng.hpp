#pragma once

#include <cstdint>

namespace canyon {

// Stateless-feel 64-bit mixer used only to expand seeds. Output sequence is a
// bijective hash of the counter, so two distinct counters never collide; in
// particular four consecutive outputs cannot all be zero.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// xoshiro256++ (Blackman/Vigna). 256-bit state, 64-bit output, period 2^256-1.
class Xoshiro256PlusPlus {
public:
    Xoshiro256PlusPlus(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3)
        : s_{s0, s1, s2, s3} {}

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

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// One reproducible uniform stream per (master seed, replica index) pair.
// Replica streams are decorrelated by running the seed expander on
// master ^ replica, not by jumping a shared stream, so any subset of
// replicas can be generated independently and in parallel.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t replica_index)
        : gen_(make(master_seed ^ replica_index)) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // Uniform on [0,1), 53 random bits, never returns 1.0.
    double next_unit() { return (gen_.next() >> 11) * 0x1.0p-53; }

private:
    static Xoshiro256PlusPlus make(std::uint64_t seed) {
        SplitMix64 sm(seed);
        const std::uint64_t s0 = sm.next();
        const std::uint64_t s1 = sm.next();
        const std::uint64_t s2 = sm.next();
        const std::uint64_t s3 = sm.next();
        return {s0, s1, s2, s3};
    }

    Xoshiro256PlusPlus gen_;
};

}  // namespace canyon
