#include "uvr/cp/control.hpp"
#include "uvr/dpp/packet.hpp"
#include "uvr/runner/runner.hpp"

#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <future>
#include <optional>
#include <thread>

using namespace uvr;
using namespace uvr::runner;

namespace
{
    // Ports are spread by pid so parallel test processes do not collide.
    std::uint16_t port_base()
    {
        return static_cast<std::uint16_t>(32'000 + (::getpid() % 1'000) * 16);
    }

    RunnerConfig host_cfg(std::uint16_t port, double seconds)
    {
        RunnerConfig c;
        c.role = Role::Host;
        c.bind_port = port;
        c.duration_s = seconds;
        c.codec.gop_size = 480;
        return c;
    }

    RunnerConfig mud_cfg(std::uint16_t port, std::uint16_t host_port)
    {
        RunnerConfig c;
        c.role = Role::Mud;
        c.bind_port = port;
        c.peer_port = host_port;
        c.codec.gop_size = 480;
        c.idle_timeout_ms = 500;
        return c;
    }

    bool has_event(const RunnerStats &s, std::string_view needle)
    {
        return std::any_of(s.events.begin(), s.events.end(),
                           [&](const std::string &e) { return e.find(needle) != std::string::npos; });
    }

    // Minimal UDP endpoint standing in for the other role.
    class Peer
    {
    public:
        explicit Peer(std::uint16_t port)
        {
            fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
            sockaddr_in a{};
            a.sin_family = AF_INET;
            a.sin_port = htons(port);
            a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            if (::bind(fd_, reinterpret_cast<sockaddr *>(&a), sizeof a) != 0)
            {
                throw std::runtime_error("bind failed");
            }
            // An I-frame burst overflows the default receive buffer.
            const int buf = 4 << 20;
            ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
            timeval tv{0, 200'000};
            ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        }
        ~Peer() { ::close(fd_); }

        std::optional<std::vector<std::uint8_t>> recv()
        {
            std::vector<std::uint8_t> buf(65'536);
            socklen_t len = sizeof from_;
            const auto n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr *>(&from_), &len);
            if (n < 0)
            {
                return std::nullopt;
            }
            buf.resize(static_cast<std::size_t>(n));
            return buf;
        }

        void send_to(std::uint16_t port, const std::vector<std::uint8_t> &bytes)
        {
            sockaddr_in a{};
            a.sin_family = AF_INET;
            a.sin_port = htons(port);
            a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<sockaddr *>(&a), sizeof a);
        }

        void reply(const std::vector<std::uint8_t> &bytes)
        {
            ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<sockaddr *>(&from_), sizeof from_);
        }

    private:
        int fd_ = -1;
        sockaddr_in from_{};
    };

    cp::HelloParams default_hello()
    {
        return {20'000, 60, 480};
    }
} // namespace

TEST(Pattern, GeneratorMatchesStatedFormula)
{
    const auto p = payload_pattern(3, 600);
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        ASSERT_EQ(p[i], static_cast<std::uint8_t>((3 * 131 + i) % 256));
    }
    EXPECT_TRUE(matches_pattern(3, p));
    auto q = p;
    q[17] ^= 1;
    EXPECT_FALSE(matches_pattern(3, q));
}

TEST(Config, Validation)
{
    RunnerConfig c;
    c.induced_loss = 1.5;
    c.duration_s = 0;
    EXPECT_GE(c.validate().size(), 2u);
}

TEST(Loopback, TenSecondsLossFree)
{
    const auto base = port_base();
    auto host = std::async(std::launch::async, [&] { return host_run(host_cfg(base, 10.0)); });
    const auto mud = mud_run(mud_cfg(base + 1, base));
    const auto h = host.get();

    EXPECT_NEAR(static_cast<double>(h.frames_sent), 600.0, 1.0);
    EXPECT_NEAR(static_cast<double>(mud.frames_completed), 600.0, 1.0);
    EXPECT_EQ(mud.frames_dropped, 0u);
    EXPECT_EQ(mud.pattern_mismatches, 0u);
    EXPECT_EQ(mud.datagrams_rejected, 0u);
    EXPECT_LE(mud.frames_completed + mud.frames_dropped, h.frames_sent);
    EXPECT_EQ(mud.datagrams_received, h.datagrams_sent);
    // Reported, not asserted: loopback one-way latency.
    std::cout << "loopback one-way latency p50 " << mud.latency_p50_ms << " ms, p99 " << mud.latency_p99_ms
              << " ms\n";
}

TEST(Loopback, InducedLossTriggersRequestsAndForcedIFrames)
{
    const auto base = static_cast<std::uint16_t>(port_base() + 2);
    auto hc = host_cfg(base, 5.0);
    auto mc = mud_cfg(base + 1, base);
    mc.induced_loss = 0.01;
    auto host = std::async(std::launch::async, [&] { return host_run(hc); });
    const auto mud = mud_run(mc);
    const auto h = host.get();

    EXPECT_GT(mud.datagrams_shim_dropped, 0u);
    EXPECT_GT(mud.frames_dropped, 0u);
    EXPECT_GE(mud.requests_sent, mud.frames_dropped);
    EXPECT_GT(h.requests_received, 0u);
    EXPECT_GT(h.forced_iframes, 0u);
    EXPECT_TRUE(has_event(mud, "IFRAME_REQUEST sent"));
    EXPECT_TRUE(has_event(h, "forced I-frame"));
    EXPECT_EQ(mud.pattern_mismatches, 0u);
}

TEST(Handshake, HostTimesOutWithoutMud)
{
    auto c = host_cfg(static_cast<std::uint16_t>(port_base() + 4), 1.0);
    c.handshake_timeout_ms = 300;
    EXPECT_THROW(host_run(c), HandshakeTimeout);
}

TEST(Handshake, MudTimesOutWithoutHost)
{
    auto c = mud_cfg(static_cast<std::uint16_t>(port_base() + 5), static_cast<std::uint16_t>(port_base() + 6));
    c.handshake_timeout_ms = 300;
    EXPECT_THROW(mud_run(c), HandshakeTimeout);
}

TEST(Handshake, MismatchedCodecIsRejected)
{
    const auto base = static_cast<std::uint16_t>(port_base() + 7);
    auto hc = host_cfg(base, 1.0);
    hc.handshake_timeout_ms = 1'000;
    auto mc = mud_cfg(base + 1, base);
    mc.codec.gop_size = 20;
    mc.handshake_timeout_ms = 1'000;
    auto host = std::async(std::launch::async, [&] { return host_run(hc); });
    EXPECT_THROW(mud_run(mc), RunnerError);
    EXPECT_THROW(host.get(), ConfigMismatch);
}

TEST(Wire, HostDatagramsEqualEncoderOutput)
{
    const auto base = static_cast<std::uint16_t>(port_base() + 9);
    Peer fake_mud(base + 1);
    auto host = std::async(std::launch::async, [&] { return host_run(host_cfg(base, 0.5)); });
    const auto hello_bytes = cp::encode_message(cp::make_hello(default_hello(), SimTime(0)));

    std::size_t data = 0;
    bool hello = false;
    for (int attempt = 0; attempt < 15 && !hello; ++attempt)
    {
        // The host may not be bound yet; resend like the real MUD does.
        fake_mud.send_to(base, hello_bytes);
        if (auto d = fake_mud.recv())
        {
            hello = dpp::decode_packet(*d).packet().header.msg_type == dpp::MsgType::Ctrl;
        }
    }
    ASSERT_TRUE(hello);
    while (auto d = fake_mud.recv())
    {
        const auto r = dpp::decode_packet(*d);
        ASSERT_TRUE(r.ok());
        const auto &h = r.packet().header;
        if (h.msg_type == dpp::MsgType::Ctrl)
        {
            continue;
        }
        // Rebuild the datagram from its header and the documented payload generator.
        const std::size_t offset = static_cast<std::size_t>(h.frag_index) * dpp::kMaxPayload;
        const auto full = payload_pattern(h.frame_id, offset + h.payload_len);
        const auto expect = dpp::encode_packet(
            dpp::DppPacket::make(h, std::vector<std::uint8_t>(full.begin() + static_cast<long>(offset), full.end())));
        ASSERT_EQ(*d, expect) << "frame " << h.frame_id << " frag " << h.frag_index;
        ASSERT_EQ(h.is_iframe(), h.frame_id == 1);
        ++data;
    }
    const auto stats = host.get();
    EXPECT_GT(data, 0u);
    EXPECT_EQ(data, stats.datagrams_sent);
}

TEST(Wire, MudParsesTheGoldenVector)
{
    const auto base = static_cast<std::uint16_t>(port_base() + 11);
    Peer fake_host(base);
    auto mc = mud_cfg(base + 1, base);
    mc.idle_timeout_ms = 300;
    auto mud = std::async(std::launch::async, [&] { return mud_run(mc); });

    ASSERT_TRUE(fake_host.recv());
    fake_host.reply(cp::encode_message(cp::make_hello(default_hello(), SimTime(0))));
    const std::vector<std::uint8_t> golden = {0x55, 0x56, 0x01, 0x01, 0x01, 0x00, 0x00, 0x00, 0x01,
                                              0x00, 0x00, 0x00, 0x01, 0x00, 0x02, 0x00, 0x00, 0x00,
                                              0x00, 0x00, 0x00, 0x00, 0x2A, 0x41, 0x42};
    fake_host.reply(golden);
    fake_host.reply({0x00, 0x01, 0x02});
    const auto s = mud.get();
    EXPECT_EQ(s.frames_completed, 1u);
    // "AB" is not frame 1's generated pattern.
    EXPECT_EQ(s.pattern_mismatches, 1u);
    EXPECT_EQ(s.datagrams_rejected, 1u);
}
