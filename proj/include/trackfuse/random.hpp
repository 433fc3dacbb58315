#pragma once

#include <cmath>
#include <cstdint>

namespace trackfuse {

/// Advance a splitmix64 state and return the next output word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Combine two seeds into a new, well-mixed one. Used to derive independent
/// substreams (per track, per particle, per camera) from a master seed, so
/// that parallel consumers never share generator state.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    return splitmix64_next(s);
}

/// Small counter-based generator. Every draw is a pure function of the seed
/// and the number of preceding draws, which keeps results identical across
/// serial and OpenMP execution and across thread counts.
class RngStream {
public:
    RngStream() : state_(0) {}
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (cosine branch). Two uniforms per draw;
    /// u1 is shifted into (0, 1] so log() never sees zero.
    double next_normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double next_normal(double mean, double stddev) {
        return mean + stddev * next_normal();
    }

    /// Derive an independent child stream without disturbing this one.
    RngStream fork(std::uint64_t tag) const { return RngStream(mix_seed(state_, tag)); }

private:
    std::uint64_t state_;
};

} // namespace trackfuse
