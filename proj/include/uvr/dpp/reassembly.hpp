#pragma once

#include "uvr/core/sim_time.hpp"
#include "uvr/dpp/packet.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace uvr::dpp
{
    struct FrameComplete
    {
        std::uint32_t frame_id = 0;
        bool iframe = false;
        bool forced = false;
        std::uint64_t gen_timestamp_us = 0;
        SimTime first_arrival;
        SimTime completed;
        std::int64_t size_bytes = 0;
        // Reassembled bytes; empty unless payload retention is enabled.
        std::vector<std::uint8_t> payload;
    };

    struct FrameDropped
    {
        std::uint32_t frame_id = 0;
        SimTime detected;
        // Fragments that did arrive (0 when the frame was never seen at all).
        std::uint16_t fragments_received = 0;
    };

    using FrameOutcome = std::variant<FrameComplete, FrameDropped>;

    struct ReassemblyConfig
    {
        // A frame still incomplete this long after its first fragment is dropped.
        std::int64_t drop_deadline_us = 33'334;
        bool keep_payload = false;
        // Larger id jumps are treated as garbage instead of registering the gap.
        std::uint32_t max_gap = 4096;
    };

    /// Default deadline: two frame periods at `fps`, rounded up.
    constexpr std::int64_t default_drop_deadline_us(std::int64_t fps) noexcept
    {
        return (2 * kUsPerSecond + fps - 1) / fps;
    }

    struct ReassemblyCounters
    {
        std::uint64_t fragments = 0;
        std::uint64_t duplicates = 0;
        std::uint64_t stale = 0;
        std::uint64_t inconsistent = 0;
        std::uint64_t completed = 0;
        std::uint64_t dropped = 0;
    };

    /// Receiver-side frame reassembly. Each frame id is resolved exactly once,
    /// either complete or dropped; partially received frames are never delivered.
    ///
    /// Ids below the highest id seen so far are either pending or already resolved.
    /// When an id jumps ahead, the skipped ids are registered as pending with the
    /// current time as their first arrival, so frames lost entirely still time out.
    class Reassembler
    {
    public:
        explicit Reassembler(ReassemblyConfig cfg = {}) : cfg_(cfg) {}

        /// Processes one data fragment at `now`. Frames whose deadline has passed are
        /// dropped first, so the returned outcomes are in resolution order.
        std::vector<FrameOutcome> on_fragment(const DppHeader &h, std::span<const std::uint8_t> payload, SimTime now);

        std::vector<FrameOutcome> on_packet(const DppPacket &p, SimTime now)
        {
            return on_fragment(p.header, p.payload, now);
        }

        /// Drops every pending frame with now > first_arrival + deadline.
        std::vector<FrameOutcome> poll(SimTime now);

        /// Earliest time at which poll() could drop something, if any frame is pending.
        std::optional<SimTime> next_deadline() const;

        bool is_pending(std::uint32_t frame_id) const { return pending_.contains(frame_id); }
        std::size_t pending_count() const noexcept { return pending_.size(); }
        const ReassemblyCounters &counters() const noexcept { return counters_; }
        const ReassemblyConfig &config() const noexcept { return cfg_; }

    private:
        struct Partial
        {
            std::uint16_t frag_count = 0; // 0 until any fragment arrives
            std::uint16_t received = 0;
            std::uint8_t flags = 0;
            std::uint64_t gen_timestamp_us = 0;
            std::int64_t bytes = 0;
            SimTime first_arrival;
            std::vector<bool> have;
            std::vector<std::vector<std::uint8_t>> chunks;
        };

        struct SerialLess
        {
            bool operator()(std::uint32_t a, std::uint32_t b) const noexcept { return serial_less(a, b); }
        };

        ReassemblyConfig cfg_;
        ReassemblyCounters counters_;
        bool started_ = false;
        std::uint32_t next_new_id_ = 0;
        std::map<std::uint32_t, Partial, SerialLess> pending_;
    };
} // namespace uvr::dpp
