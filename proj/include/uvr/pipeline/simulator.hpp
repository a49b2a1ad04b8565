#pragma once

#include "uvr/codec/codec_model.hpp"
#include "uvr/pipeline/scenario.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace uvr::pipeline
{
    inline constexpr std::int64_t kUnset = -1;

    /// Timestamps (µs) of one encoded frame along the datapath; kUnset where the
    /// frame never got that far.
    struct FrameTrace
    {
        std::uint32_t frame_id = 0;
        std::uint64_t source_frame_id = 0;
        codec::FrameType type = codec::FrameType::P;
        bool forced = false;
        std::int64_t size_bytes = 0;
        std::uint16_t fragments = 0;

        std::int64_t gen_us = kUnset;
        std::int64_t encode_start_us = kUnset;
        std::int64_t encoded_us = kUnset;
        std::int64_t send_done_us = kUnset;
        std::int64_t sent_first_us = kUnset;
        std::int64_t sent_last_us = kUnset;
        std::int64_t arrived_first_us = kUnset;
        std::int64_t arrived_last_us = kUnset;
        std::int64_t decode_start_us = kUnset;
        std::int64_t decoded_us = kUnset;
        std::int64_t presented_us = kUnset;

        bool dropped = false;
        // Presented, but decoded against a broken reference chain.
        bool corrupted = false;

        std::int64_t copied_bytes = 0;
        std::uint32_t encoded_copies = 0;

        bool presented() const noexcept { return presented_us != kUnset; }
        std::int64_t e2e_us() const noexcept { return presented() ? presented_us - gen_us : kUnset; }
    };

    /// Column order of the line-delimited trace export.
    inline constexpr const char *kTraceHeader =
        "frame_id,type,forced,gen_us,encoded_us,sent_first_us,arrived_last_us,presented_us,dropped,corrupted";

    void write_trace_line(std::ostream &os, const FrameTrace &t);
    void write_trace(std::ostream &os, const std::vector<FrameTrace> &trace);

    struct StageStats
    {
        std::string name;
        double mean_ms = 0.0;
        double p50_ms = 0.0;
        double p99_ms = 0.0;
        std::size_t samples = 0;
    };

    StageStats summarize(std::string name, std::vector<std::int64_t> samples_us);

    inline constexpr double kFramePeriodMs60 = 1000.0 / 60.0;

    struct MetricsReport
    {
        std::uint64_t seed = 0;
        ScenarioConfig config;

        // Ordered datapath stages; their means add up to the end-to-end mean.
        std::vector<StageStats> stages;
        StageStats end_to_end;
        double visual_latency_frames = 0.0; // end_to_end.mean_ms / 16.667
        double visual_latency_p99_frames = 0.0;

        std::uint64_t frames_rendered = 0;
        std::uint64_t frames_skipped = 0; // rendered but never encoded
        std::uint64_t frames_encoded = 0;
        std::uint64_t frames_presented = 0;
        std::uint64_t frames_dropped = 0;
        std::uint64_t frames_corrupted = 0;
        double dropped_rate = 0.0;
        double corrupted_rate = 0.0;

        std::uint64_t iframes = 0;
        std::uint64_t forced_iframes = 0;
        std::uint64_t requests_sent = 0;
        std::uint64_t requests_accepted = 0;
        std::uint64_t requests_suppressed = 0;

        std::int64_t encoded_bytes = 0;
        double encoded_throughput_bps = 0.0;
        std::int64_t copied_bytes = 0;
        std::uint64_t copy_entries = 0;
        double encoded_copies_per_frame = 0.0;
        double link_utilization = 0.0;
        std::uint64_t packets_sent = 0;
        std::uint64_t packets_lost = 0;

        // Synchronous render loop: time the game thread spends in the encode task.
        double tick_task_mean_ms = 0.0;
        double tick_task_max_ms = 0.0;
        std::uint64_t tick_overruns = 0;

        std::size_t decoder_max_queue = 0;
        double decoder_queue_delay_mean_ms = 0.0;
        double decoder_queue_delay_p99_ms = 0.0;

        // Frames from each drop to the next clean frame, drop included.
        std::vector<std::uint32_t> corrupted_intervals;

        // FNV-1a over the frame trace; equal digests mean identical runs.
        std::string transcript_digest;

        const StageStats *stage(std::string_view name) const;
    };

    struct SimulationResult
    {
        MetricsReport report;
        std::vector<FrameTrace> trace;
    };

    /// Runs one scenario to completion. Throws codec::ConfigError listing every
    /// violated field when `cfg` is invalid.
    SimulationResult run_scenario(const ScenarioConfig &cfg);
} // namespace uvr::pipeline
