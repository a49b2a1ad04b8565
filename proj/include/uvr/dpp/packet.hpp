#pragma once

// Data-plane wire format. Every field is big-endian, in this order:
//
//   offset size field
//   0      2    magic            0x55 0x56
//   2      1    version          0x01
//   3      1    msg_type         0x01 DATA, 0x02 CTRL
//   4      1    flags            bit0 I-frame fragment, bit1 forced I-frame
//   5      4    frame_id
//   9      2    frag_index
//   11     2    frag_count
//   13     2    payload_len
//   15     8    gen_timestamp_us
//   23     n    payload
//
// A packet never exceeds the 802.11ac link-layer size of 2,304 bytes.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace uvr::dpp
{
    inline constexpr std::uint8_t kMagic0 = 0x55;
    inline constexpr std::uint8_t kMagic1 = 0x56;
    inline constexpr std::uint8_t kVersion = 0x01;
    inline constexpr std::size_t kHeaderSize = 23;
    inline constexpr std::size_t kLinkMtu = 2304;
    inline constexpr std::size_t kMaxPayload = kLinkMtu - kHeaderSize;

    enum class MsgType : std::uint8_t
    {
        Data = 0x01,
        Ctrl = 0x02,
    };

    namespace flags
    {
        inline constexpr std::uint8_t kIFrame = 0x01;
        inline constexpr std::uint8_t kForced = 0x02;
    } // namespace flags

    struct DppHeader
    {
        MsgType msg_type = MsgType::Data;
        std::uint8_t flags = 0;
        std::uint32_t frame_id = 0;
        std::uint16_t frag_index = 0;
        std::uint16_t frag_count = 1;
        std::uint16_t payload_len = 0;
        std::uint64_t gen_timestamp_us = 0;

        bool is_iframe() const noexcept { return (flags & flags::kIFrame) != 0; }
        bool is_forced() const noexcept { return (flags & flags::kForced) != 0; }

        friend bool operator==(const DppHeader &, const DppHeader &) = default;
    };

    class PacketError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    struct DppPacket
    {
        DppHeader header;
        std::vector<std::uint8_t> payload;

        /// Builds a packet, enforcing the size and index invariants.
        static DppPacket make(DppHeader header, std::vector<std::uint8_t> payload);

        std::size_t wire_size() const noexcept { return kHeaderSize + payload.size(); }

        friend bool operator==(const DppPacket &, const DppPacket &) = default;
    };

    enum class DecodeError : std::uint8_t
    {
        MalformedHeader,
        LengthMismatch,
        UnsupportedVersion,
    };

    std::string_view to_string(DecodeError e) noexcept;

    /// Either a parsed packet or the reason it was rejected.
    class DecodeResult
    {
    public:
        DecodeResult(DppPacket p) : packet_(std::move(p)) {}
        DecodeResult(DecodeError e) : error_(e) {}

        bool ok() const noexcept { return packet_.has_value(); }
        explicit operator bool() const noexcept { return ok(); }
        const DppPacket &packet() const { return packet_.value(); }
        DppPacket &packet() { return packet_.value(); }
        DecodeError error() const { return error_.value(); }

    private:
        std::optional<DppPacket> packet_;
        std::optional<DecodeError> error_;
    };

    /// Serializes the 23-byte header into `out`.
    void encode_header(const DppHeader &h, std::span<std::uint8_t, kHeaderSize> out) noexcept;

    std::vector<std::uint8_t> encode_packet(const DppPacket &p);

    /// Parses only the header; the payload length is checked against `bytes`.
    std::optional<DppHeader> decode_header(std::span<const std::uint8_t> bytes, DecodeError *error = nullptr);

    DecodeResult decode_packet(std::span<const std::uint8_t> bytes);

    /// Serial-number comparison for 32-bit frame ids that may wrap.
    constexpr bool serial_less(std::uint32_t a, std::uint32_t b) noexcept
    {
        return a != b && static_cast<std::int32_t>(a - b) < 0;
    }
    constexpr std::int64_t serial_distance(std::uint32_t from, std::uint32_t to) noexcept
    {
        return static_cast<std::int32_t>(to - from);
    }
} // namespace uvr::dpp
