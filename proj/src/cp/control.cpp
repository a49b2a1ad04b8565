#include "uvr/cp/control.hpp"

#include <stdexcept>
#include <type_traits>

namespace uvr::cp
{
    namespace
    {
        void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v)
        {
            out.push_back(static_cast<std::uint8_t>(v >> 24));
            out.push_back(static_cast<std::uint8_t>(v >> 16));
            out.push_back(static_cast<std::uint8_t>(v >> 8));
            out.push_back(static_cast<std::uint8_t>(v));
        }

        std::uint32_t get_u32(const std::uint8_t *b)
        {
            return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
                   std::uint32_t{b[3]};
        }
    } // namespace

    const char *to_string(Subtype s) noexcept
    {
        switch (s)
        {
        case Subtype::IFrameRequest:
            return "IFRAME_REQUEST";
        case Subtype::Hello:
            return "HELLO";
        case Subtype::InputEvent:
            return "INPUT_EVENT";
        }
        return "UNKNOWN";
    }

    dpp::DppPacket to_packet(const CpMessage &m)
    {
        std::vector<std::uint8_t> payload;
        payload.reserve(kPayloadSize);
        payload.push_back(static_cast<std::uint8_t>(m.subtype));
        put_u32(payload, m.dropped_frame_id);
        put_u32(payload, m.last_received_frame_id);
        dpp::DppHeader h;
        h.msg_type = dpp::MsgType::Ctrl;
        h.gen_timestamp_us = static_cast<std::uint64_t>(m.send_time.us());
        return dpp::DppPacket::make(h, std::move(payload));
    }

    std::vector<std::uint8_t> encode_message(const CpMessage &m) { return dpp::encode_packet(to_packet(m)); }

    std::optional<CpMessage> from_packet(const dpp::DppPacket &p)
    {
        if (p.header.msg_type != dpp::MsgType::Ctrl || p.payload.size() != kPayloadSize)
        {
            return std::nullopt;
        }
        const std::uint8_t sub = p.payload[0];
        if (sub < 0x01 || sub > 0x03)
        {
            return std::nullopt;
        }
        if (p.header.gen_timestamp_us > static_cast<std::uint64_t>(INT64_MAX))
        {
            return std::nullopt;
        }
        CpMessage m;
        m.subtype = static_cast<Subtype>(sub);
        m.dropped_frame_id = get_u32(p.payload.data() + 1);
        m.last_received_frame_id = get_u32(p.payload.data() + 5);
        m.send_time = SimTime(static_cast<std::int64_t>(p.header.gen_timestamp_us));
        return m;
    }

    CpMessage make_hello(const HelloParams &p, SimTime now)
    {
        CpMessage m;
        m.subtype = Subtype::Hello;
        m.dropped_frame_id = p.bitrate_kbps;
        m.last_received_frame_id = (std::uint32_t{p.fps} << 16) | p.gop_size;
        m.send_time = now;
        return m;
    }

    HelloParams read_hello(const CpMessage &m)
    {
        if (m.subtype != Subtype::Hello)
        {
            throw std::invalid_argument("not a HELLO message");
        }
        return HelloParams{m.dropped_frame_id, static_cast<std::uint16_t>(m.last_received_frame_id >> 16),
                           static_cast<std::uint16_t>(m.last_received_frame_id & 0xFFFF)};
    }

    std::vector<CpMessage> mud_on_frame_event(MudFeedbackState &state, const dpp::FrameOutcome &ev, SimTime now)
    {
        std::vector<CpMessage> out;
        auto request = [&] {
            out.push_back(CpMessage{Subtype::IFrameRequest, state.dropped_frame_id, state.last_received_frame_id, now});
            ++state.requests_sent;
        };

        std::visit(
            [&](const auto &e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, dpp::FrameDropped>)
                {
                    state.mode = MudMode::Recovery;
                    state.dropped_frame_id = e.frame_id;
                    request();
                }
                else
                {
                    state.last_received_frame_id = e.frame_id;
                    if (e.iframe)
                    {
                        state.mode = MudMode::Normal;
                    }
                    else if (state.mode == MudMode::Recovery)
                    {
                        request();
                    }
                }
            },
            ev);
        return out;
    }

    HostDecision host_on_request(HostFeedbackState &state, const CpMessage &msg, SimTime now)
    {
        if (msg.subtype != Subtype::IFrameRequest)
        {
            throw std::invalid_argument("host_on_request expects an IFRAME_REQUEST");
        }
        ++state.requests;
        if (now >= state.suppression_until)
        {
            state.pending_force = true;
            return HostDecision::ForceNextIFrame;
        }
        ++state.suppressed;
        return HostDecision::Suppressed;
    }

    void host_on_iframe_emitted(HostFeedbackState &state, SimTime now, std::int64_t window_us)
    {
        state.pending_force = false;
        state.suppression_until = now + window_us;
        ++state.windows_started;
    }

    void host_on_frame_encoded(HostFeedbackState &state, bool iframe, SimTime now, std::int64_t window_us)
    {
        if (iframe && state.pending_force)
        {
            host_on_iframe_emitted(state, now, window_us);
        }
    }
} // namespace uvr::cp
