#include "uvr/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace uvr
{
    std::uint64_t splitmix64(std::uint64_t &state) noexcept
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    namespace
    {
        constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    } // namespace

    Rng::Rng(std::uint64_t seed) noexcept : seed_(seed)
    {
        std::uint64_t sm = seed;
        for (auto &word : s_)
        {
            word = splitmix64(sm);
        }
    }

    std::uint64_t Rng::next_u64() noexcept
    {
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

    double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t Rng::uniform_below(std::uint64_t bound) noexcept
    {
        // Lemire's rejection keeps the result unbiased.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;)
        {
            const std::uint64_t r = next_u64();
            if (r >= threshold)
            {
                return r % bound;
            }
        }
    }

    double Rng::normal() noexcept
    {
        if (has_cached_)
        {
            has_cached_ = false;
            return cached_normal_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
        {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_normal_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    double Rng::lognormal(double mu, double sigma) noexcept
    {
        if (sigma == 0.0)
        {
            return std::exp(mu);
        }
        return std::exp(mu + sigma * normal());
    }

    Rng Rng::fork(std::uint64_t stream) const noexcept
    {
        std::uint64_t mix = seed_ ^ (stream * 0xD1B54A32D192ED03ULL);
        return Rng(splitmix64(mix));
    }
} // namespace uvr
