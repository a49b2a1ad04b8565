#pragma once

#include <array>
#include <cstdint>

namespace uvr
{
    /// Seeded pseudo-random source: xoshiro256** with its state expanded from the
    /// 64-bit seed by SplitMix64. Both algorithms are fixed here (not delegated to
    /// <random> distributions) so draw sequences match across platforms.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed = 0) noexcept;

        std::uint64_t seed() const noexcept { return seed_; }

        std::uint64_t next_u64() noexcept;

        /// Uniform in [0, 1) with 53 bits of precision.
        double uniform() noexcept;

        /// Uniform integer in [0, bound). bound must be > 0.
        std::uint64_t uniform_below(std::uint64_t bound) noexcept;

        bool bernoulli(double p) noexcept { return uniform() < p; }

        /// Standard normal via the Box-Muller transform; the second variate of each
        /// pair is cached.
        double normal() noexcept;

        /// exp(mu + sigma * N(0,1)). sigma == 0 returns exp(mu) without consuming draws.
        double lognormal(double mu, double sigma) noexcept;

        /// Independent child stream derived from this generator's seed and a label.
        Rng fork(std::uint64_t stream) const noexcept;

    private:
        std::uint64_t seed_;
        std::array<std::uint64_t, 4> s_{};
        double cached_normal_ = 0.0;
        bool has_cached_ = false;
    };

    std::uint64_t splitmix64(std::uint64_t &state) noexcept;
} // namespace uvr
