#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace echoq {

/// Counter-based generator: every draw is a pure function of (seed, stream,
/// index), so fixtures can be regenerated in any order, on any thread, and in
/// any language.
///
///   splitmix(z):  z += 0x9E3779B97F4A7C15
///                 z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///                 z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
///                 return z ^ (z >> 31)
///   bits(seed, stream, index) = splitmix(splitmix(seed ^ splitmix(stream)) ^ index)
///   uniform = (bits >> 11) * 2^-53                         in [0, 1)
///   normal  = Box-Muller cosine branch on the uniforms at indices 2i and 2i+1
class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    static constexpr std::uint64_t splitmix(std::uint64_t z) noexcept
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const noexcept
    {
        return splitmix(splitmix(seed_ ^ splitmix(stream)) ^ index);
    }

    double uniform(std::uint64_t stream, std::uint64_t index) const noexcept
    {
        return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
    }

    double normal(std::uint64_t stream, std::uint64_t index) const noexcept
    {
        // 1 - u keeps the logarithm finite.
        const double u1 = 1.0 - uniform(stream, 2 * index);
        const double u2 = uniform(stream, 2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// Sequential view over one stream of a CounterRng. Uniform draws use
/// `stream`, normal draws use `stream | 2^63`, each with its own counter.
class RngStream {
public:
    RngStream(CounterRng rng, std::uint64_t stream) noexcept : rng_(rng), stream_(stream) {}

    double uniform() noexcept { return rng_.uniform(stream_, next_++); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept { return rng_.normal(stream_ | (1ULL << 63), normal_next_++); }
    double normal(double mean, double std) noexcept { return mean + std * normal(); }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;
    std::uint64_t normal_next_ = 0;
};

} // namespace echoq
