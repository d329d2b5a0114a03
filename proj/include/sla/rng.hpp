#pragma once

// Portable random streams. Standard-library engines are fine, but the
// distributions in <random> are implementation-defined, so every draw that
// feeds an output goes through the fixed algorithms below: splitmix64 for
// seed derivation and xoshiro256** for the streams themselves.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sla {

__extension__ using Uint128 = unsigned __int128;

/// splitmix64 finalizer (Steele, Lea & Flood). Bijective avalanche on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent-looking seed for stream `index` of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master ^ mix64(index));
}

/// Domain tags so that folds, noise injection and corpus synthesis never
/// share a stream even when driven by the same master seed.
enum class Stream : std::uint64_t {
    folds = 0x464F4C44ULL,      // "FOLD"
    noise = 0x4E4F4953ULL,      // "NOIS"
    synthetic = 0x53594E54ULL,  // "SYNT"
};

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream tag) noexcept {
    return mix64(master ^ (static_cast<std::uint64_t>(tag) << 17));
}

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
/// Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            word = mix64(x);
            x += 0x9E3779B97F4A7C15ULL;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
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

    /// Unbiased integer in [0, bound) via Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) {
            return 0;
        }
        Uint128 m = static_cast<Uint128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<Uint128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller, one variate per call).
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// In-place Fisher-Yates shuffle driven by `rng.below`.
template <typename Range>
void shuffle(Range& items, Xoshiro256& rng) {
    const auto n = static_cast<std::uint64_t>(items.size());
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = rng.below(i);
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace sla
