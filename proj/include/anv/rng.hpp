#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace anv {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stable seed derivation over an ordered tuple of words, e.g.
/// derive_seed({master, generation, slot}). The result depends only on the
/// values and their order, so substreams can be created in any order on any
/// thread and still be bit-identical across platforms.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (auto p : parts) {
        h = mix64(h ^ mix64(p));
    }
    return h;
}

// Tags separating the substream families drawn from one master seed.
inline constexpr std::uint64_t kTagInit = 0x696E6974ULL;   // "init"
inline constexpr std::uint64_t kTagEval = 0x6576616CULL;   // "eval"
inline constexpr std::uint64_t kTagBreed = 0x62726564ULL;  // "bred"
inline constexpr std::uint64_t kTagCourse = 0x636F7572ULL; // "cour"

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not (their algorithms are
/// implementation-defined), so the real-valued draws are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi)
    {
        double x = lo + (hi - lo) * uniform();
        return x < hi ? x : std::nextafter(hi, lo);
    }

    /// Box-Muller, one variate per call (no cached spare, so the stream
    /// position after n calls is always 2n words).
    double normal(double mean, double sd)
    {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer on [0, n), n >= 1. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1) {
            return 0;
        }
        std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - n) % n;
        for (;;) {
            std::uint64_t x = engine_();
            if (limit == 0 || x < limit) {
                return x % n;
            }
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace anv
