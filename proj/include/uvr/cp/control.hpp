#pragma once

#include "uvr/core/sim_time.hpp"
#include "uvr/dpp/packet.hpp"
#include "uvr/dpp/reassembly.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace uvr::cp
{
    enum class Subtype : std::uint8_t
    {
        IFrameRequest = 0x01,
        Hello = 0x02,
        InputEvent = 0x03,
    };

    const char *to_string(Subtype s) noexcept;

    inline constexpr std::size_t kPayloadSize = 9;

    /// Control message carried in a single CTRL datagram: the DPP header with
    /// payload subtype(1) + dropped_frame_id(4) + last_received_frame_id(4).
    /// The send time travels in the header's timestamp field.
    struct CpMessage
    {
        Subtype subtype = Subtype::IFrameRequest;
        std::uint32_t dropped_frame_id = 0;
        std::uint32_t last_received_frame_id = 0;
        SimTime send_time;

        friend bool operator==(const CpMessage &, const CpMessage &) = default;
    };

    dpp::DppPacket to_packet(const CpMessage &m);
    std::vector<std::uint8_t> encode_message(const CpMessage &m);

    /// Parses a CTRL packet; nullopt for DATA packets, wrong payload size or unknown subtype.
    std::optional<CpMessage> from_packet(const dpp::DppPacket &p);

    /// HELLO carries the codec parameters both ends must agree on.
    struct HelloParams
    {
        std::uint32_t bitrate_kbps = 0;
        std::uint16_t fps = 0;
        std::uint16_t gop_size = 0;

        friend bool operator==(const HelloParams &, const HelloParams &) = default;
    };

    CpMessage make_hello(const HelloParams &p, SimTime now);
    HelloParams read_hello(const CpMessage &m);

    // MUD side -------------------------------------------------------------

    enum class MudMode : std::uint8_t
    {
        Normal,
        Recovery,
    };

    struct MudFeedbackState
    {
        MudMode mode = MudMode::Normal;
        std::uint32_t dropped_frame_id = 0;
        std::uint32_t last_received_frame_id = 0;
        std::uint64_t requests_sent = 0;
    };

    /// A drop enters recovery and asks for an I-frame; every P-frame completed
    /// while recovering repeats the request; a completed I-frame ends recovery.
    std::vector<CpMessage> mud_on_frame_event(MudFeedbackState &state, const dpp::FrameOutcome &ev, SimTime now);

    // Host side ------------------------------------------------------------

    enum class HostDecision : std::uint8_t
    {
        ForceNextIFrame,
        Suppressed,
    };

    inline constexpr std::int64_t kDefaultSuppressionWindowUs = 200'000;

    struct HostFeedbackState
    {
        SimTime suppression_until;
        bool pending_force = false;
        std::uint64_t requests = 0;
        std::uint64_t suppressed = 0;
        std::uint64_t windows_started = 0;
    };

    /// Accepts a request when now >= suppression_until (inclusive boundary).
    HostDecision host_on_request(HostFeedbackState &state, const CpMessage &msg, SimTime now);

    /// Call after an I-frame that satisfied a pending force was encoded.
    void host_on_iframe_emitted(HostFeedbackState &state, SimTime now,
                                std::int64_t window_us = kDefaultSuppressionWindowUs);

    /// Encoder hook for every frame: starts a suppression window only when an
    /// I-frame is emitted while a force is pending.
    void host_on_frame_encoded(HostFeedbackState &state, bool iframe, SimTime now,
                               std::int64_t window_us = kDefaultSuppressionWindowUs);
} // namespace uvr::cp
