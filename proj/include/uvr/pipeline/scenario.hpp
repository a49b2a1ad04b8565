#pragma once

#include "uvr/codec/codec_model.hpp"
#include "uvr/core/workload.hpp"
#include "uvr/netsim/channel.hpp"
#include "uvr/pipeline/datapath.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uvr::pipeline
{
    enum class EncodeMode : std::uint8_t
    {
        // The game triggers encode + send at the end of each render tick (at most 60 Hz).
        Sync,
        // An independent 60 Hz encoder thread samples the latest completed frame.
        Async,
    };

    const char *to_string(EncodeMode m) noexcept;

    inline constexpr std::int32_t kGopWithFeedback = 480;
    inline constexpr std::int32_t kGopWithoutFeedback = 20;

    struct ScenarioConfig
    {
        std::uint64_t seed = 42;
        double duration_s = 60.0;
        EncodeMode encode_mode = EncodeMode::Sync;
        // Game-loop time per render tick, used for the synchronous budget check.
        std::int64_t render_work_us = 11'100;

        std::int64_t bitrate_bps = 20'000'000;
        std::int32_t codec_fps = 60;
        // 0 selects 480 with feedback control and 20 without.
        std::int32_t gop_size = 0;
        codec::Rational p_to_i_ratio{1, 4};
        double rgb_inflation = 2.96;

        // Render cadence, frame geometry and content variability.
        WorkloadConfig workload;
        std::int32_t decode_fps_cap = 60;
        std::int32_t decode_burst_frames = 2;

        OptimizationToggles toggles;
        netsim::ChannelModel channel;
        StageLatencyModel stages;

        // 0 selects two frame periods.
        std::int64_t drop_deadline_us = 0;
        std::int64_t suppression_window_us = 200'000;

        // Fault injection: drop one fragment of this encoded frame id (0 = off).
        std::uint32_t inject_drop_frame = 0;

        bool trace = false;

        std::int32_t resolved_gop_size() const;
        std::int64_t resolved_drop_deadline_us() const;
        codec::CodecConfig codec_config() const;
        netsim::ChannelModel channel_model() const;
        codec::DecoderConfig decoder_config() const;
        std::int32_t encode_fps() const;

        /// Every invariant violation, each prefixed with its dotted key.
        std::vector<std::string> validate() const;

        friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;
    };

    std::optional<ScenarioConfig> preset(std::string_view name);
    std::vector<std::string_view> preset_names();
} // namespace uvr::pipeline
