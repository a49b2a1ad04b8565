#pragma once

#include "uvr/core/sim_time.hpp"
#include "uvr/core/workload.hpp"

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvr::codec
{
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    struct Rational
    {
        std::int64_t num = 0;
        std::int64_t den = 1;

        double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
        friend bool operator==(const Rational &, const Rational &) = default;
    };

    /// round(num/den) with halves rounded up; den > 0, num >= 0.
    constexpr std::int64_t round_half_up(std::int64_t num, std::int64_t den) noexcept
    {
        return (2 * num + den) / (2 * den);
    }

    enum class FrameType : std::uint8_t
    {
        I,
        P,
    };

    inline const char *to_string(FrameType t) noexcept { return t == FrameType::I ? "I" : "P"; }

    struct CodecConfig
    {
        std::int64_t bitrate_bps = 20'000'000;
        std::int32_t fps = 60;
        std::int32_t gop_size = 20;
        Rational p_to_i_ratio{1, 4};
        ColorSpace color_space = ColorSpace::Yuv420;
        bool transcode_avoidance = false;
        bool shared_gpu_buffer = false;
        // Encoded-size multiplier applied when encoding RGB directly.
        double rgb_inflation = 1.10;

        /// Returns the list of violated invariants (empty when valid).
        std::vector<std::string> validate() const;
        /// Throws ConfigError naming the first violation.
        void ensure_valid() const;
    };

    /// Per-frame byte budget B = bitrate / (8 * fps), exact.
    Rational frame_budget(const CodecConfig &cfg);

    struct NominalSizes
    {
        std::int64_t i_frame = 0;
        std::int64_t p_frame = 0;
    };

    /// I/P sizes whose GOP average equals the budget: s_I = G*B / (1 + (G-1)*r), s_P = r*s_I.
    NominalSizes nominal_sizes(const CodecConfig &cfg);

    struct GopState
    {
        std::int32_t next_gop_index = 0;
    };

    struct FramePlan
    {
        FrameType type = FrameType::P;
        std::int32_t gop_index = 0;
        // I-frame produced only because of a request (would otherwise have been P).
        bool forced = false;
    };

    /// Decides the type of the next frame and advances the GOP position. A forced
    /// I-frame restarts the GOP.
    FramePlan plan_frame(GopState &gop, bool force_i, std::int32_t gop_size);

    /// Encoded size in bytes: nominal size scaled by content complexity, and by the
    /// RGB inflation factor when the color-space conversion is skipped.
    std::int64_t encoded_size(FrameType type, const CodecConfig &cfg, double complexity);

    /// Host-side capture-to-bitstream latency for the given optimization toggles.
    struct EncodeLatencyModel
    {
        std::int64_t baseline_us = 13'940;
        std::int64_t transcode_saving_us = 5'510;
        std::int64_t shared_buffer_saving_us = 4'710;
    };

    std::int64_t encode_latency_us(const CodecConfig &cfg, const EncodeLatencyModel &model = {});

    struct EncodedFrame
    {
        std::uint32_t frame_id = 0;
        std::uint64_t source_frame_id = 0;
        FrameType type = FrameType::P;
        std::int64_t size_bytes = 0;
        std::int32_t gop_index = 0;
        SimTime gen_time;
        SimTime encode_done_time;
        bool forced = false;
    };

    /// MUD decoder as a single server. Each frame occupies the decoder for
    /// `latency_us`; sustained throughput is capped at `fps_cap` through a credit
    /// bucket holding up to `burst_frames` frames, so a late frame followed by an
    /// on-time one does not push every later frame back.
    struct DecoderConfig
    {
        std::int64_t latency_us = 3'640;
        std::int32_t fps_cap = 60;
        std::int32_t burst_frames = 2;

        /// Minimum sustained spacing between decode starts.
        std::int64_t service_interval_us() const;
    };

    struct DecodeResult
    {
        SimTime start;
        SimTime present;
        std::int64_t queue_delay_us = 0;
        // Frames waiting (including this one) when it arrived.
        std::size_t queue_length = 0;
    };

    class DecoderState
    {
    public:
        explicit DecoderState(DecoderConfig cfg);

        /// Offers a frame arriving at `arrival`; frames must be offered in arrival order.
        DecodeResult offer(SimTime arrival);

        const DecoderConfig &config() const noexcept { return cfg_; }
        std::size_t max_queue_length() const noexcept { return max_queue_; }

    private:
        static constexpr std::int64_t kCreditPerFrame = kUsPerSecond;

        DecoderConfig cfg_;
        std::int64_t credit_;
        std::int64_t credit_cap_;
        SimTime credit_time_;
        SimTime busy_until_;
        SimTime last_arrival_;
        std::deque<SimTime> pending_starts_;
        std::size_t max_queue_ = 0;
    };
} // namespace uvr::codec
