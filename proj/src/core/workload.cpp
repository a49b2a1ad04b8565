#include "uvr/core/workload.hpp"

namespace uvr
{
    std::string_view to_string(ColorSpace cs) noexcept
    {
        return cs == ColorSpace::Rgb ? "rgb" : "yuv420";
    }

    RawFrame Workload::next_frame(SimTime now)
    {
        RawFrame f;
        f.frame_id = ++last_id_;
        f.gen_time = now;
        f.width = cfg_.width;
        f.height = cfg_.height;
        f.color_space = ColorSpace::Rgb;
        f.raw_bytes = raw_frame_bytes(cfg_.width, cfg_.height, ColorSpace::Rgb);
        f.complexity = rng_.lognormal(0.0, cfg_.complexity_sigma);
        return f;
    }
} // namespace uvr
