#include "uvr/codec/codec_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uvr::codec
{
    std::vector<std::string> CodecConfig::validate() const
    {
        std::vector<std::string> errors;
        if (bitrate_bps <= 0)
        {
            errors.emplace_back("bitrate_bps must be > 0");
        }
        if (fps <= 0)
        {
            errors.emplace_back("fps must be > 0");
        }
        if (gop_size < 1)
        {
            errors.emplace_back("gop_size must be >= 1");
        }
        if (p_to_i_ratio.den <= 0 || p_to_i_ratio.num <= 0 || p_to_i_ratio.num > p_to_i_ratio.den)
        {
            errors.emplace_back("p_to_i_ratio must be in (0, 1]");
        }
        if (!(rgb_inflation > 0.0) || !std::isfinite(rgb_inflation))
        {
            errors.emplace_back("rgb_inflation must be > 0");
        }
        if (transcode_avoidance != (color_space == ColorSpace::Rgb))
        {
            errors.emplace_back("color_space must be rgb exactly when transcode_avoidance is on");
        }
        return errors;
    }

    void CodecConfig::ensure_valid() const
    {
        auto errors = validate();
        if (!errors.empty())
        {
            throw ConfigError("invalid codec config: " + errors.front());
        }
    }

    Rational frame_budget(const CodecConfig &cfg)
    {
        cfg.ensure_valid();
        std::int64_t num = cfg.bitrate_bps;
        std::int64_t den = 8LL * cfg.fps;
        const std::int64_t g = std::gcd(num, den);
        return {num / g, den / g};
    }

    NominalSizes nominal_sizes(const CodecConfig &cfg)
    {
        cfg.ensure_valid();
        // s_I = G*bitrate*q / (8*fps*(q + (G-1)*p)), r = p/q.
        using wide = __int128;
        const wide g = cfg.gop_size;
        const wide p = cfg.p_to_i_ratio.num;
        const wide q = cfg.p_to_i_ratio.den;
        const wide den = wide{8} * cfg.fps * (q + (g - 1) * p);
        const wide i_num = g * cfg.bitrate_bps * q;
        const wide p_num = g * cfg.bitrate_bps * p;
        auto round = [](wide n, wide d) { return static_cast<std::int64_t>((2 * n + d) / (2 * d)); };
        NominalSizes s;
        s.i_frame = std::max<std::int64_t>(1, round(i_num, den));
        s.p_frame = std::max<std::int64_t>(1, round(p_num, den));
        return s;
    }

    FramePlan plan_frame(GopState &gop, bool force_i, std::int32_t gop_size)
    {
        if (gop_size < 1)
        {
            throw ConfigError("gop_size must be >= 1");
        }
        FramePlan plan;
        const bool scheduled_i = gop.next_gop_index == 0;
        if (scheduled_i || force_i)
        {
            plan.type = FrameType::I;
            plan.gop_index = 0;
            plan.forced = !scheduled_i;
        }
        else
        {
            plan.type = FrameType::P;
            plan.gop_index = gop.next_gop_index;
        }
        gop.next_gop_index = (plan.gop_index + 1) % gop_size;
        return plan;
    }

    std::int64_t encoded_size(FrameType type, const CodecConfig &cfg, double complexity)
    {
        if (!(complexity > 0.0))
        {
            throw std::invalid_argument("complexity must be > 0");
        }
        const NominalSizes nominal = nominal_sizes(cfg);
        double size = static_cast<double>(type == FrameType::I ? nominal.i_frame : nominal.p_frame) * complexity;
        if (cfg.color_space == ColorSpace::Rgb)
        {
            size *= cfg.rgb_inflation;
        }
        return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(size + 0.5)));
    }

    std::int64_t encode_latency_us(const CodecConfig &cfg, const EncodeLatencyModel &model)
    {
        std::int64_t latency = model.baseline_us;
        if (cfg.transcode_avoidance)
        {
            latency -= model.transcode_saving_us;
        }
        if (cfg.shared_gpu_buffer)
        {
            latency -= model.shared_buffer_saving_us;
        }
        return latency;
    }

    std::int64_t DecoderConfig::service_interval_us() const
    {
        return std::max(latency_us, frame_period_us(fps_cap));
    }

    DecoderState::DecoderState(DecoderConfig cfg)
        : cfg_(cfg),
          credit_(kCreditPerFrame * std::max(1, cfg.burst_frames)),
          credit_cap_(kCreditPerFrame * std::max(1, cfg.burst_frames))
    {
        if (cfg.latency_us < 0 || cfg.fps_cap <= 0)
        {
            throw ConfigError("decoder latency must be >= 0 and fps_cap > 0");
        }
    }

    DecodeResult DecoderState::offer(SimTime arrival)
    {
        if (arrival < last_arrival_)
        {
            throw std::logic_error("decoder frames must be offered in arrival order");
        }
        last_arrival_ = arrival;
        while (!pending_starts_.empty() && pending_starts_.front() <= arrival)
        {
            pending_starts_.pop_front();
        }

        SimTime start = std::max(arrival, busy_until_);
        // Credit accrues fps_cap units per microsecond; a decode costs 1e6 units.
        std::int64_t credit = std::min(credit_cap_, credit_ + (start - credit_time_) * cfg_.fps_cap);
        if (credit < kCreditPerFrame)
        {
            const std::int64_t missing = kCreditPerFrame - credit;
            const std::int64_t wait = (missing + cfg_.fps_cap - 1) / cfg_.fps_cap;
            start += wait;
            credit += wait * cfg_.fps_cap;
        }
        credit_ = credit - kCreditPerFrame;
        credit_time_ = start;
        busy_until_ = start + cfg_.latency_us;

        DecodeResult r;
        r.start = start;
        r.present = start + cfg_.latency_us;
        r.queue_delay_us = start - arrival;
        if (start > arrival)
        {
            pending_starts_.push_back(start);
        }
        r.queue_length = pending_starts_.size() + (start > arrival ? 0 : 1);
        max_queue_ = std::max(max_queue_, r.queue_length);
        return r;
    }
} // namespace uvr::codec
