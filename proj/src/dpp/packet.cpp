#include "uvr/dpp/packet.hpp"

#include <string>

namespace uvr::dpp
{
    namespace
    {
        template <typename T>
        void put_be(std::uint8_t *dst, T value) noexcept
        {
            for (std::size_t i = 0; i < sizeof(T); ++i)
            {
                dst[sizeof(T) - 1 - i] = static_cast<std::uint8_t>(value >> (8 * i));
            }
        }

        template <typename T>
        T get_be(const std::uint8_t *src) noexcept
        {
            T value = 0;
            for (std::size_t i = 0; i < sizeof(T); ++i)
            {
                value = static_cast<T>((value << 8) | src[i]);
            }
            return value;
        }
    } // namespace

    std::string_view to_string(DecodeError e) noexcept
    {
        switch (e)
        {
        case DecodeError::MalformedHeader:
            return "MalformedHeader";
        case DecodeError::LengthMismatch:
            return "LengthMismatch";
        case DecodeError::UnsupportedVersion:
            return "UnsupportedVersion";
        }
        return "Unknown";
    }

    DppPacket DppPacket::make(DppHeader header, std::vector<std::uint8_t> payload)
    {
        if (payload.size() > kMaxPayload)
        {
            throw PacketError("payload of " + std::to_string(payload.size()) + " bytes exceeds " +
                              std::to_string(kMaxPayload));
        }
        if (header.frag_count == 0 || header.frag_index >= header.frag_count)
        {
            throw PacketError("frag_index must be < frag_count");
        }
        if (header.msg_type != MsgType::Data && header.msg_type != MsgType::Ctrl)
        {
            throw PacketError("unknown msg_type");
        }
        header.payload_len = static_cast<std::uint16_t>(payload.size());
        return DppPacket{header, std::move(payload)};
    }

    void encode_header(const DppHeader &h, std::span<std::uint8_t, kHeaderSize> out) noexcept
    {
        std::uint8_t *b = out.data();
        b[0] = kMagic0;
        b[1] = kMagic1;
        b[2] = kVersion;
        b[3] = static_cast<std::uint8_t>(h.msg_type);
        b[4] = h.flags;
        put_be(b + 5, h.frame_id);
        put_be(b + 9, h.frag_index);
        put_be(b + 11, h.frag_count);
        put_be(b + 13, h.payload_len);
        put_be(b + 15, h.gen_timestamp_us);
    }

    std::vector<std::uint8_t> encode_packet(const DppPacket &p)
    {
        std::vector<std::uint8_t> out(kHeaderSize + p.payload.size());
        DppHeader h = p.header;
        h.payload_len = static_cast<std::uint16_t>(p.payload.size());
        encode_header(h, std::span<std::uint8_t, kHeaderSize>(out.data(), kHeaderSize));
        std::copy(p.payload.begin(), p.payload.end(), out.begin() + kHeaderSize);
        return out;
    }

    std::optional<DppHeader> decode_header(std::span<const std::uint8_t> bytes, DecodeError *error)
    {
        auto fail = [error](DecodeError e) -> std::optional<DppHeader> {
            if (error != nullptr)
            {
                *error = e;
            }
            return std::nullopt;
        };
        if (bytes.size() < kHeaderSize || bytes.size() > kLinkMtu)
        {
            return fail(bytes.size() < kHeaderSize ? DecodeError::MalformedHeader : DecodeError::LengthMismatch);
        }
        const std::uint8_t *b = bytes.data();
        if (b[0] != kMagic0 || b[1] != kMagic1)
        {
            return fail(DecodeError::MalformedHeader);
        }
        if (b[2] != kVersion)
        {
            return fail(DecodeError::UnsupportedVersion);
        }
        if (b[3] != static_cast<std::uint8_t>(MsgType::Data) && b[3] != static_cast<std::uint8_t>(MsgType::Ctrl))
        {
            return fail(DecodeError::MalformedHeader);
        }
        DppHeader h;
        h.msg_type = static_cast<MsgType>(b[3]);
        h.flags = b[4];
        h.frame_id = get_be<std::uint32_t>(b + 5);
        h.frag_index = get_be<std::uint16_t>(b + 9);
        h.frag_count = get_be<std::uint16_t>(b + 11);
        h.payload_len = get_be<std::uint16_t>(b + 13);
        h.gen_timestamp_us = get_be<std::uint64_t>(b + 15);
        if (h.frag_count == 0 || h.frag_index >= h.frag_count)
        {
            return fail(DecodeError::MalformedHeader);
        }
        if (bytes.size() - kHeaderSize != h.payload_len)
        {
            return fail(DecodeError::LengthMismatch);
        }
        return h;
    }

    DecodeResult decode_packet(std::span<const std::uint8_t> bytes)
    {
        DecodeError error = DecodeError::MalformedHeader;
        auto header = decode_header(bytes, &error);
        if (!header)
        {
            return error;
        }
        auto payload = bytes.subspan(kHeaderSize);
        return DppPacket{*header, std::vector<std::uint8_t>(payload.begin(), payload.end())};
    }
} // namespace uvr::dpp
