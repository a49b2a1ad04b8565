#include "uvr/dpp/fragment.hpp"

#include <algorithm>
#include <string>

namespace uvr::dpp
{
    std::uint16_t fragment_count(std::int64_t size_bytes, std::size_t payload_cap)
    {
        if (size_bytes <= 0)
        {
            throw PacketError("cannot fragment an empty frame");
        }
        if (payload_cap == 0 || payload_cap > kMaxPayload)
        {
            throw PacketError("payload cap must be in [1, " + std::to_string(kMaxPayload) + "]");
        }
        const auto cap = static_cast<std::int64_t>(payload_cap);
        const std::int64_t count = (size_bytes + cap - 1) / cap;
        if (count > 65'535)
        {
            throw PacketError("frame of " + std::to_string(size_bytes) + " bytes needs more than 65,535 fragments");
        }
        return static_cast<std::uint16_t>(count);
    }

    std::uint16_t fragment_payload_len(std::int64_t size_bytes, std::uint16_t index, std::size_t payload_cap)
    {
        const auto cap = static_cast<std::int64_t>(payload_cap);
        const std::int64_t offset = static_cast<std::int64_t>(index) * cap;
        return static_cast<std::uint16_t>(std::min(cap, size_bytes - offset));
    }

    std::uint8_t frame_flags(const codec::EncodedFrame &frame) noexcept
    {
        std::uint8_t f = 0;
        if (frame.type == codec::FrameType::I)
        {
            f |= flags::kIFrame;
            if (frame.forced)
            {
                f |= flags::kForced;
            }
        }
        return f;
    }

    std::vector<DppHeader> fragment_headers(const codec::EncodedFrame &frame, std::size_t payload_cap)
    {
        const std::uint16_t count = fragment_count(frame.size_bytes, payload_cap);
        std::vector<DppHeader> headers;
        headers.reserve(count);
        for (std::uint16_t i = 0; i < count; ++i)
        {
            DppHeader h;
            h.msg_type = MsgType::Data;
            h.flags = frame_flags(frame);
            h.frame_id = frame.frame_id;
            h.frag_index = i;
            h.frag_count = count;
            h.payload_len = fragment_payload_len(frame.size_bytes, i, payload_cap);
            h.gen_timestamp_us = static_cast<std::uint64_t>(frame.gen_time.us());
            headers.push_back(h);
        }
        return headers;
    }

    std::vector<DppPacket> fragment(const codec::EncodedFrame &frame, std::span<const std::uint8_t> bytes,
                                    std::size_t payload_cap)
    {
        if (static_cast<std::int64_t>(bytes.size()) != frame.size_bytes)
        {
            throw PacketError("frame bytes do not match size_bytes");
        }
        std::vector<DppPacket> packets;
        std::size_t offset = 0;
        for (const DppHeader &h : fragment_headers(frame, payload_cap))
        {
            auto chunk = bytes.subspan(offset, h.payload_len);
            packets.push_back(DppPacket{h, std::vector<std::uint8_t>(chunk.begin(), chunk.end())});
            offset += h.payload_len;
        }
        return packets;
    }
} // namespace uvr::dpp
