#pragma once

#include "uvr/codec/codec_model.hpp"
#include "uvr/dpp/packet.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace uvr::dpp
{
    /// Number of fragments needed for `size_bytes` at `payload_cap` bytes each.
    /// Throws PacketError for empty frames or when the count exceeds 65,535.
    std::uint16_t fragment_count(std::int64_t size_bytes, std::size_t payload_cap = kMaxPayload);

    /// Payload length of fragment `index`: all fragments are full except possibly the last.
    std::uint16_t fragment_payload_len(std::int64_t size_bytes, std::uint16_t index, std::size_t payload_cap = kMaxPayload);

    std::uint8_t frame_flags(const codec::EncodedFrame &frame) noexcept;

    /// Headers of every fragment of `frame` (the simulator moves headers only).
    std::vector<DppHeader> fragment_headers(const codec::EncodedFrame &frame, std::size_t payload_cap = kMaxPayload);

    /// Splits the frame's bytes into wire packets. `bytes.size()` must equal frame.size_bytes.
    std::vector<DppPacket> fragment(const codec::EncodedFrame &frame, std::span<const std::uint8_t> bytes,
                                    std::size_t payload_cap = kMaxPayload);
} // namespace uvr::dpp
