#pragma once

#include <cstdint>
#include <stdexcept>

namespace uvr
{
    /// Simulated time in integer microseconds since scenario start.
    class SimTime
    {
    public:
        constexpr SimTime() noexcept = default;
        constexpr explicit SimTime(std::int64_t us) : ticks_(us)
        {
            if (us < 0)
            {
                throw std::invalid_argument("SimTime must be non-negative");
            }
        }

        static constexpr SimTime from_ms(double ms) { return SimTime(static_cast<std::int64_t>(ms * 1000.0 + 0.5)); }

        constexpr std::int64_t us() const noexcept { return ticks_; }
        constexpr double ms() const noexcept { return static_cast<double>(ticks_) / 1000.0; }

        constexpr SimTime operator+(std::int64_t delta_us) const { return SimTime(ticks_ + delta_us); }
        constexpr std::int64_t operator-(SimTime other) const noexcept { return ticks_ - other.ticks_; }
        constexpr SimTime &operator+=(std::int64_t delta_us)
        {
            *this = *this + delta_us;
            return *this;
        }

        constexpr auto operator<=>(const SimTime &) const noexcept = default;

    private:
        std::int64_t ticks_ = 0;
    };

    inline constexpr std::int64_t kUsPerSecond = 1'000'000;

    /// Length of period `index` of a cadence at `fps`, using cumulative rounding so
    /// that no drift accumulates: round(1e6*(i+1)/fps) - round(1e6*i/fps).
    constexpr std::int64_t cadence_period_us(std::int64_t index, std::int64_t fps)
    {
        auto at = [fps](std::int64_t i) { return (2 * kUsPerSecond * i + fps) / (2 * fps); };
        return at(index + 1) - at(index);
    }

    /// Start time of tick `index` of a cadence at `fps` (cumulative rounding).
    constexpr std::int64_t cadence_tick_us(std::int64_t index, std::int64_t fps)
    {
        return (2 * kUsPerSecond * index + fps) / (2 * fps);
    }

    /// One period at `fps`, rounded half-up.
    constexpr std::int64_t frame_period_us(std::int64_t fps) { return cadence_tick_us(1, fps); }
} // namespace uvr
