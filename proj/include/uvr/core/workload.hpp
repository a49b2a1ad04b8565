#pragma once

#include "uvr/core/rng.hpp"
#include "uvr/core/sim_time.hpp"

#include <cstdint>
#include <string_view>

namespace uvr
{
    enum class ColorSpace : std::uint8_t
    {
        Rgb,
        Yuv420,
    };

    std::string_view to_string(ColorSpace cs) noexcept;

    /// Raw bytes of one uncompressed frame. YUV 4:2:0 keeps full-resolution luma
    /// and quarter-resolution chroma planes.
    constexpr std::int64_t raw_frame_bytes(std::int64_t width, std::int64_t height, ColorSpace cs) noexcept
    {
        return cs == ColorSpace::Rgb ? width * height * 3 : width * height * 3 / 2;
    }

    struct RawFrame
    {
        std::uint64_t frame_id = 0;
        SimTime gen_time;
        std::int32_t width = 1920;
        std::int32_t height = 1080;
        ColorSpace color_space = ColorSpace::Rgb;
        std::int64_t raw_bytes = 0;
        // Content-dependent size multiplier; always > 0.
        double complexity = 1.0;
    };

    struct WorkloadConfig
    {
        std::int32_t render_fps = 60;
        std::int32_t width = 1920;
        std::int32_t height = 1080;
        double complexity_sigma = 0.15;

        friend bool operator==(const WorkloadConfig &, const WorkloadConfig &) = default;
    };

    /// Scripted player: renders frames at a fixed cadence while the camera spins at a
    /// constant rate, so content complexity only fluctuates around a stationary mean.
    class Workload
    {
    public:
        Workload(WorkloadConfig cfg, Rng rng) : cfg_(cfg), rng_(rng) {}

        /// Produces the next rendered frame at `now`. Frame ids start at 1.
        RawFrame next_frame(SimTime now);

        /// Time of render tick `index` (0-based) under cumulative rounding.
        SimTime tick_time(std::int64_t index) const { return SimTime(cadence_tick_us(index, cfg_.render_fps)); }

        const WorkloadConfig &config() const noexcept { return cfg_; }
        std::uint64_t frames_generated() const noexcept { return last_id_; }

    private:
        WorkloadConfig cfg_;
        Rng rng_;
        std::uint64_t last_id_ = 0;
    };
} // namespace uvr
