#pragma once

#include <cstdint>
#include <random>

namespace chaleval {

/// SplitMix64 output function; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Random source for one unit of work (a bootstrap sample, a synthetic case).
/// The sequence is std::mt19937_64, whose output the standard fixes, seeded
/// from (seed, stream). Streams are independent of the order or thread they
/// run on. Bounded draws avoid std::uniform_*_distribution, whose algorithms
/// differ between standard libraries.
class Substream {
public:
    Substream(std::uint64_t seed, std::uint64_t stream) : engine_(mix64(seed ^ mix64(stream))) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n), n > 0, by rejection.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold)
                return r % n;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace chaleval
