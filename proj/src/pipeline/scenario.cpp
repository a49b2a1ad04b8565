#include "uvr/pipeline/scenario.hpp"

#include "uvr/dpp/reassembly.hpp"

#include <algorithm>
#include <cmath>

namespace uvr::pipeline
{
    const char *to_string(EncodeMode m) noexcept { return m == EncodeMode::Sync ? "sync" : "async"; }

    std::int32_t ScenarioConfig::resolved_gop_size() const
    {
        if (gop_size > 0)
        {
            return gop_size;
        }
        return toggles.feedback_control ? kGopWithFeedback : kGopWithoutFeedback;
    }

    std::int64_t ScenarioConfig::resolved_drop_deadline_us() const
    {
        if (drop_deadline_us > 0)
        {
            return drop_deadline_us;
        }
        return dpp::default_drop_deadline_us(std::max(1, codec_fps));
    }

    codec::CodecConfig ScenarioConfig::codec_config() const
    {
        codec::CodecConfig c;
        c.bitrate_bps = bitrate_bps;
        c.fps = codec_fps;
        c.gop_size = resolved_gop_size();
        c.p_to_i_ratio = p_to_i_ratio;
        c.transcode_avoidance = toggles.transcode_avoidance;
        c.color_space = toggles.transcode_avoidance ? ColorSpace::Rgb : ColorSpace::Yuv420;
        c.shared_gpu_buffer = toggles.shared_gpu_buffer;
        c.rgb_inflation = rgb_inflation;
        return c;
    }

    netsim::ChannelModel ScenarioConfig::channel_model() const
    {
        netsim::ChannelModel ch = channel;
        ch.topology = toggles.p2p_topology ? netsim::Topology::P2P : netsim::Topology::Infra;
        return ch;
    }

    codec::DecoderConfig ScenarioConfig::decoder_config() const
    {
        codec::DecoderConfig d;
        d.latency_us = stages.mud_decode_us + (toggles.direct_net_io ? 0 : stages.mud_netstack_us);
        d.fps_cap = decode_fps_cap;
        d.burst_frames = decode_burst_frames;
        return d;
    }

    std::int32_t ScenarioConfig::encode_fps() const
    {
        return encode_mode == EncodeMode::Sync ? std::min(workload.render_fps, codec_fps) : codec_fps;
    }

    std::vector<std::string> ScenarioConfig::validate() const
    {
        std::vector<std::string> errors;
        auto add = [&](const std::string &key, const std::string &msg) { errors.push_back(key + ": " + msg); };

        if (!(duration_s > 0.0) || !std::isfinite(duration_s))
            add("duration_s", "must be > 0");
        if (workload.render_fps <= 0)
            add("render_fps", "must be > 0");
        if (render_work_us < 0)
            add("render_work_us", "must be >= 0");
        if (workload.width <= 0 || workload.height <= 0)
            add("workload.width", "frame dimensions must be > 0");
        if (!(workload.complexity_sigma >= 0.0))
            add("workload.complexity_sigma", "must be >= 0");
        if (bitrate_bps <= 0)
            add("codec.bitrate_bps", "must be > 0");
        if (codec_fps <= 0)
            add("codec.fps", "must be > 0");
        if (gop_size < 0)
            add("codec.gop_size", "must be >= 1 (or 0 for automatic)");
        if (p_to_i_ratio.den <= 0 || p_to_i_ratio.num <= 0 || p_to_i_ratio.num > p_to_i_ratio.den)
            add("codec.p_to_i_ratio", "must be in (0, 1]");
        if (!(rgb_inflation > 0.0))
            add("codec.rgb_inflation", "must be > 0");
        if (decode_fps_cap <= 0)
            add("decoder.fps_cap", "must be > 0");
        if (decode_burst_frames < 1)
            add("decoder.burst_frames", "must be >= 1");
        for (const auto &e : channel.validate())
            errors.push_back("channel." + e);
        for (const auto &e : stages.validate())
            errors.push_back("stages." + e);
        if (drop_deadline_us < 0)
            add("protocol.drop_deadline_us", "must be >= 0 (0 for automatic)");
        if (suppression_window_us < 0)
            add("protocol.suppression_window_us", "must be >= 0");
        return errors;
    }

    std::optional<ScenarioConfig> preset(std::string_view name)
    {
        ScenarioConfig c;
        if (name == "baseline")
        {
            c.toggles = OptimizationToggles::baseline();
            return c;
        }
        if (name == "openuvr")
        {
            c.toggles = OptimizationToggles::all_on();
            return c;
        }
        if (name == "openuvr-async")
        {
            c.toggles = OptimizationToggles::all_on();
            c.encode_mode = EncodeMode::Async;
            c.workload.render_fps = 90;
            return c;
        }
        if (name == "gtx1060")
        {
            // Slower hardware encoder, otherwise identical.
            c.toggles = OptimizationToggles::all_on();
            c.stages.host_encode_us += 2'000;
            return c;
        }
        return std::nullopt;
    }

    std::vector<std::string_view> preset_names() { return {"baseline", "openuvr", "openuvr-async", "gtx1060"}; }
} // namespace uvr::pipeline
