#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace scmapolar::rng {

inline std::uint64_t splitmix64_next(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with an explicit Box-Muller Gaussian.  The simulator owns its
/// generator end to end so per-(seed, frame) streams reproduce bit-exactly on
/// any platform and under any thread schedule.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64_next(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound) { return next() % bound; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller, one value per call.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Independent stream labels.  Streams for different purposes are derived
/// independently of each other, so adding draws to one never shifts another.
enum class StreamKind : std::uint64_t {
    payload = 0x706179,
    fading = 0x666164,
    noise = 0x6e6f69,
    interleaver = 0x696c76,
    flips = 0x666c70,
    generic = 0x67656e,
};

/// Counter-style derivation: the stream for (master, frame, kind, sub) never
/// depends on how many values other streams consumed.
inline Xoshiro256pp derive_stream(std::uint64_t master, std::uint64_t frame, StreamKind kind,
                                  std::uint64_t sub = 0) {
    std::uint64_t x = master;
    std::uint64_t s = splitmix64_next(x);
    x = s ^ (static_cast<std::uint64_t>(kind) * 0x2545f4914f6cdd1dULL);
    s = splitmix64_next(x);
    x = s ^ (frame * 0x9e3779b97f4a7c15ULL);
    s = splitmix64_next(x);
    x = s ^ (sub + 1);
    return Xoshiro256pp(splitmix64_next(x));
}

}  // namespace scmapolar::rng
