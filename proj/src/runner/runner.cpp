#include "uvr/runner/runner.hpp"

#include "uvr/core/rng.hpp"
#include "uvr/cp/control.hpp"
#include "uvr/dpp/fragment.hpp"
#include "uvr/dpp/packet.hpp"
#include "uvr/dpp/reassembly.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <optional>
#include <thread>

namespace uvr::runner
{
    namespace
    {
        using Clock = std::chrono::steady_clock;

        struct Datagram
        {
            std::vector<std::uint8_t> bytes;
            sockaddr_in from{};
            std::uint64_t received_us = 0;
        };

        class UdpSocket
        {
        public:
            UdpSocket(const std::string &address, std::uint16_t port)
            {
                fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
                if (fd_ < 0)
                {
                    throw SocketError(std::string("socket: ") + std::strerror(errno));
                }
                int buf = 8 << 20;
                ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
                ::setsockopt(fd_, SOL_SOCKET, SO_SNDBUF, &buf, sizeof buf);
                int yes = 1;
                ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
                sockaddr_in addr = make_addr(address, port);
                if (::bind(fd_, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0)
                {
                    const std::string err = std::strerror(errno);
                    ::close(fd_);
                    throw SocketError("bind " + address + ":" + std::to_string(port) + ": " + err);
                }
            }
            ~UdpSocket() { ::close(fd_); }
            UdpSocket(const UdpSocket &) = delete;
            UdpSocket &operator=(const UdpSocket &) = delete;

            static sockaddr_in make_addr(const std::string &address, std::uint16_t port)
            {
                sockaddr_in addr{};
                addr.sin_family = AF_INET;
                addr.sin_port = htons(port);
                if (::inet_pton(AF_INET, address.c_str(), &addr.sin_addr) != 1)
                {
                    throw SocketError("invalid IPv4 address '" + address + "'");
                }
                return addr;
            }

            void send_to(std::span<const std::uint8_t> bytes, const sockaddr_in &to)
            {
                const auto n = ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr *>(&to),
                                        sizeof to);
                if (n < 0 && errno != ECONNREFUSED)
                {
                    throw SocketError(std::string("sendto: ") + std::strerror(errno));
                }
            }

            /// Waits up to `timeout_ms` for one datagram.
            std::optional<Datagram> receive(int timeout_ms)
            {
                pollfd p{fd_, POLLIN, 0};
                if (::poll(&p, 1, timeout_ms) <= 0)
                {
                    return std::nullopt;
                }
                Datagram d;
                d.bytes.resize(65536);
                socklen_t len = sizeof d.from;
                const auto n = ::recvfrom(fd_, d.bytes.data(), d.bytes.size(), 0, reinterpret_cast<sockaddr *>(&d.from),
                                          &len);
                if (n < 0)
                {
                    return std::nullopt;
                }
                d.bytes.resize(static_cast<std::size_t>(n));
                d.received_us = monotonic_us();
                return d;
            }

        private:
            int fd_ = -1;
        };

        template <typename T>
        class MessageQueue
        {
        public:
            void push(T v)
            {
                {
                    std::lock_guard lock(mu_);
                    items_.push_back(std::move(v));
                }
                cv_.notify_one();
            }
            std::optional<T> pop_for(std::chrono::microseconds timeout)
            {
                std::unique_lock lock(mu_);
                if (!cv_.wait_for(lock, timeout, [&] { return !items_.empty(); }))
                {
                    return std::nullopt;
                }
                T v = std::move(items_.front());
                items_.pop_front();
                return v;
            }

        private:
            std::mutex mu_;
            std::condition_variable cv_;
            std::deque<T> items_;
        };

        /// Receive context: moves datagrams from the socket into a queue until stopped.
        class Receiver
        {
        public:
            Receiver(UdpSocket &sock, MessageQueue<Datagram> &queue)
                : thread_([&sock, &queue, this](std::stop_token st) {
                      while (!st.stop_requested())
                      {
                          if (auto d = sock.receive(20))
                          {
                              queue.push(std::move(*d));
                          }
                      }
                  })
            {
            }

        private:
            std::jthread thread_;
        };

        cp::HelloParams hello_of(const codec::CodecConfig &c)
        {
            return {static_cast<std::uint32_t>(c.bitrate_bps / 1000), static_cast<std::uint16_t>(c.fps),
                    static_cast<std::uint16_t>(c.gop_size)};
        }

        std::string describe(const cp::HelloParams &p)
        {
            return std::to_string(p.bitrate_kbps) + " kbps, " + std::to_string(p.fps) + " fps, GOP " +
                   std::to_string(p.gop_size);
        }

        std::optional<cp::CpMessage> as_control(const Datagram &d)
        {
            auto r = dpp::decode_packet(d.bytes);
            if (!r || r.packet().header.msg_type != dpp::MsgType::Ctrl)
            {
                return std::nullopt;
            }
            return cp::from_packet(r.packet());
        }

        bool stopped(const std::atomic<bool> *stop) { return stop != nullptr && stop->load(); }

        void latency_summary(std::vector<std::int64_t> us, RunnerStats &s)
        {
            if (us.empty())
            {
                return;
            }
            std::sort(us.begin(), us.end());
            double sum = 0.0;
            for (auto v : us)
            {
                sum += static_cast<double>(v);
            }
            auto rank = [&](double q) {
                auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(us.size())));
                return static_cast<double>(us[std::clamp<std::size_t>(k, 1, us.size()) - 1]) / 1000.0;
            };
            s.latency_mean_ms = sum / static_cast<double>(us.size()) / 1000.0;
            s.latency_p50_ms = rank(0.50);
            s.latency_p99_ms = rank(0.99);
        }

        void ensure_valid(const RunnerConfig &cfg)
        {
            const auto errors = cfg.validate();
            if (!errors.empty())
            {
                std::string msg;
                for (const auto &e : errors)
                {
                    msg += (msg.empty() ? "" : "; ") + e;
                }
                throw codec::ConfigError(msg);
            }
        }
    } // namespace

    const char *to_string(Role r) noexcept { return r == Role::Host ? "host" : "mud"; }

    std::vector<std::string> RunnerConfig::validate() const
    {
        std::vector<std::string> errors;
        for (const auto &e : codec.validate())
        {
            errors.push_back("codec." + e);
        }
        if (!(duration_s > 0.0))
            errors.push_back("duration_s: must be > 0");
        if (handshake_timeout_ms <= 0)
            errors.push_back("handshake_timeout_ms: must be > 0");
        if (idle_timeout_ms <= 0)
            errors.push_back("idle_timeout_ms: must be > 0");
        if (!(induced_loss >= 0.0 && induced_loss <= 1.0))
            errors.push_back("induced_loss: must be in [0, 1]");
        if (drop_deadline_us < 0)
            errors.push_back("drop_deadline_us: must be >= 0");
        if (suppression_window_us < 0)
            errors.push_back("suppression_window_us: must be >= 0");
        if (!(complexity_sigma >= 0.0))
            errors.push_back("complexity_sigma: must be >= 0");
        return errors;
    }

    std::vector<std::uint8_t> payload_pattern(std::uint32_t frame_id, std::size_t size)
    {
        std::vector<std::uint8_t> out(size);
        const std::uint64_t base = static_cast<std::uint64_t>(frame_id) * 131U;
        for (std::size_t i = 0; i < size; ++i)
        {
            out[i] = static_cast<std::uint8_t>((base + i) & 0xFF);
        }
        return out;
    }

    bool matches_pattern(std::uint32_t frame_id, std::span<const std::uint8_t> bytes)
    {
        const std::uint64_t base = static_cast<std::uint64_t>(frame_id) * 131U;
        for (std::size_t i = 0; i < bytes.size(); ++i)
        {
            if (bytes[i] != static_cast<std::uint8_t>((base + i) & 0xFF))
            {
                return false;
            }
        }
        return true;
    }

    std::uint64_t monotonic_us()
    {
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(Clock::now().time_since_epoch()).count());
    }

    RunnerStats host_run(const RunnerConfig &cfg, const std::atomic<bool> *stop, EventSink sink)
    {
        ensure_valid(cfg);
        RunnerStats stats;
        stats.role = Role::Host;
        auto log = [&](std::string line) {
            if (sink)
            {
                sink(line);
            }
            stats.events.push_back(std::move(line));
        };
        const auto wall_start = Clock::now();

        UdpSocket sock(cfg.bind_address, cfg.bind_port);
        MessageQueue<Datagram> inbox;
        Receiver receiver(sock, inbox);

        const cp::HelloParams mine = hello_of(cfg.codec);
        std::optional<sockaddr_in> peer;
        const auto handshake_deadline = Clock::now() + std::chrono::milliseconds(cfg.handshake_timeout_ms);
        while (!peer)
        {
            if (Clock::now() >= handshake_deadline || stopped(stop))
            {
                throw HandshakeTimeout("no HELLO from the MUD within " + std::to_string(cfg.handshake_timeout_ms) +
                                       " ms");
            }
            auto d = inbox.pop_for(std::chrono::milliseconds(20));
            if (!d)
            {
                continue;
            }
            auto m = as_control(*d);
            if (!m || m->subtype != cp::Subtype::Hello)
            {
                continue;
            }
            sock.send_to(cp::encode_message(cp::make_hello(mine, SimTime(monotonic_us()))), d->from);
            const cp::HelloParams theirs = cp::read_hello(*m);
            if (!(theirs == mine))
            {
                throw ConfigMismatch("MUD expects " + describe(theirs) + ", host is configured for " + describe(mine));
            }
            peer = d->from;
            log("handshake ok: " + describe(mine));
        }

        Rng rng(cfg.seed);
        codec::GopState gop;
        cp::HostFeedbackState fb;
        const auto t0 = Clock::now();
        const auto duration_us = static_cast<std::int64_t>(std::llround(cfg.duration_s * 1e6));

        auto serve_requests = [&] {
            while (auto d = inbox.pop_for(std::chrono::microseconds(0)))
            {
                auto m = as_control(*d);
                if (!m)
                {
                    continue;
                }
                if (m->subtype == cp::Subtype::Hello)
                {
                    // Our reply was lost; answer the retransmission.
                    sock.send_to(cp::encode_message(cp::make_hello(mine, SimTime(monotonic_us()))), d->from);
                    continue;
                }
                if (m->subtype != cp::Subtype::IFrameRequest)
                {
                    continue;
                }
                ++stats.requests_received;
                if (!cfg.feedback_control)
                {
                    continue;
                }
                const auto decision = cp::host_on_request(fb, *m, SimTime(d->received_us));
                if (decision == cp::HostDecision::ForceNextIFrame)
                {
                    ++stats.requests_accepted;
                    log("IFRAME_REQUEST accepted (dropped " + std::to_string(m->dropped_frame_id) + ")");
                }
            }
        };

        for (std::int64_t i = 0;; ++i)
        {
            const std::int64_t tick = cadence_tick_us(i, cfg.codec.fps);
            if (tick >= duration_us || stopped(stop))
            {
                break;
            }
            const auto due = t0 + std::chrono::microseconds(tick);
            while (Clock::now() < due)
            {
                serve_requests();
                std::this_thread::sleep_until(std::min(due, Clock::now() + std::chrono::milliseconds(1)));
            }
            serve_requests();

            const bool force = cfg.feedback_control && fb.pending_force;
            const codec::FramePlan plan = codec::plan_frame(gop, force, cfg.codec.gop_size);
            const bool iframe = plan.type == codec::FrameType::I;
            const SimTime now(monotonic_us());
            if (cfg.feedback_control)
            {
                cp::host_on_frame_encoded(fb, iframe, now, cfg.suppression_window_us);
            }

            codec::EncodedFrame f;
            f.frame_id = static_cast<std::uint32_t>(i + 1);
            f.source_frame_id = f.frame_id;
            f.type = plan.type;
            f.size_bytes = codec::encoded_size(plan.type, cfg.codec, rng.lognormal(0.0, cfg.complexity_sigma));
            f.gop_index = plan.gop_index;
            f.gen_time = now;
            f.encode_done_time = now;
            f.forced = plan.forced;

            const auto bytes = payload_pattern(f.frame_id, static_cast<std::size_t>(f.size_bytes));
            for (const auto &p : dpp::fragment(f, bytes))
            {
                sock.send_to(dpp::encode_packet(p), *peer);
                ++stats.datagrams_sent;
            }
            ++stats.frames_sent;
            if (iframe)
            {
                ++stats.iframes_sent;
            }
            if (plan.forced)
            {
                ++stats.forced_iframes;
                log("forced I-frame " + std::to_string(f.frame_id));
            }
        }

        // Late requests still count toward the report.
        const auto grace = Clock::now() + std::chrono::milliseconds(100);
        while (Clock::now() < grace)
        {
            serve_requests();
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        stats.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();
        return stats;
    }

    RunnerStats mud_run(const RunnerConfig &cfg, const std::atomic<bool> *stop, EventSink sink)
    {
        ensure_valid(cfg);
        RunnerStats stats;
        stats.role = Role::Mud;
        auto log = [&](std::string line) {
            if (sink)
            {
                sink(line);
            }
            stats.events.push_back(std::move(line));
        };
        const auto wall_start = Clock::now();

        UdpSocket sock(cfg.bind_address, cfg.bind_port);
        MessageQueue<Datagram> inbox;
        Receiver receiver(sock, inbox);
        const sockaddr_in host = UdpSocket::make_addr(cfg.peer_address, cfg.peer_port);

        const cp::HelloParams mine = hello_of(cfg.codec);
        const auto handshake_deadline = Clock::now() + std::chrono::milliseconds(cfg.handshake_timeout_ms);
        auto next_hello = Clock::now();
        bool connected = false;
        std::deque<Datagram> early; // data that raced ahead of the HELLO reply
        while (!connected)
        {
            if (Clock::now() >= handshake_deadline || stopped(stop))
            {
                throw HandshakeTimeout("no HELLO reply from the host within " +
                                       std::to_string(cfg.handshake_timeout_ms) + " ms");
            }
            if (Clock::now() >= next_hello)
            {
                sock.send_to(cp::encode_message(cp::make_hello(mine, SimTime(monotonic_us()))), host);
                next_hello = Clock::now() + std::chrono::milliseconds(100);
            }
            auto d = inbox.pop_for(std::chrono::milliseconds(10));
            if (!d)
            {
                continue;
            }
            auto m = as_control(*d);
            if (!m)
            {
                early.push_back(std::move(*d));
                continue;
            }
            if (m->subtype != cp::Subtype::Hello)
            {
                continue;
            }
            const cp::HelloParams theirs = cp::read_hello(*m);
            if (!(theirs == mine))
            {
                throw ConfigMismatch("host sends " + describe(theirs) + ", MUD is configured for " + describe(mine));
            }
            connected = true;
            log("handshake ok: " + describe(mine));
        }

        const std::int64_t deadline =
            cfg.drop_deadline_us > 0 ? cfg.drop_deadline_us : dpp::default_drop_deadline_us(cfg.codec.fps);
        dpp::Reassembler reasm(dpp::ReassemblyConfig{deadline, true, 4096});
        cp::MudFeedbackState fb;
        Rng shim(Rng(cfg.seed).fork(0x5348494d));
        std::vector<std::int64_t> latencies;

        auto handle = [&](const std::vector<dpp::FrameOutcome> &outcomes, SimTime now) {
            for (const auto &o : outcomes)
            {
                if (const auto *c = std::get_if<dpp::FrameComplete>(&o))
                {
                    ++stats.frames_completed;
                    if (!matches_pattern(c->frame_id, c->payload))
                    {
                        ++stats.pattern_mismatches;
                        log("pattern mismatch in frame " + std::to_string(c->frame_id));
                    }
                    latencies.push_back(now.us() - static_cast<std::int64_t>(c->gen_timestamp_us));
                }
                else
                {
                    const auto &d = std::get<dpp::FrameDropped>(o);
                    ++stats.frames_dropped;
                    log("frame " + std::to_string(d.frame_id) + " dropped (" + std::to_string(d.fragments_received) +
                        " fragments)");
                }
                if (!cfg.feedback_control)
                {
                    continue;
                }
                for (const auto &m : cp::mud_on_frame_event(fb, o, now))
                {
                    sock.send_to(cp::encode_message(m), host);
                    ++stats.requests_sent;
                    log("IFRAME_REQUEST sent (dropped " + std::to_string(m.dropped_frame_id) + ", last " +
                        std::to_string(m.last_received_frame_id) + ")");
                }
            }
        };

        auto last_activity = Clock::now();
        const auto hard_stop = Clock::now() + std::chrono::microseconds(static_cast<std::int64_t>(cfg.duration_s * 1e6)) +
                               std::chrono::milliseconds(cfg.handshake_timeout_ms + cfg.idle_timeout_ms);
        while (!stopped(stop) && Clock::now() < hard_stop)
        {
            std::optional<Datagram> d;
            if (!early.empty())
            {
                d = std::move(early.front());
                early.pop_front();
            }
            else
            {
                d = inbox.pop_for(std::chrono::milliseconds(5));
            }
            const SimTime now(monotonic_us());
            if (!d)
            {
                handle(reasm.poll(now), now);
                if (Clock::now() - last_activity > std::chrono::milliseconds(cfg.idle_timeout_ms))
                {
                    break;
                }
                continue;
            }
            last_activity = Clock::now();
            ++stats.datagrams_received;
            auto r = dpp::decode_packet(d->bytes);
            if (!r)
            {
                ++stats.datagrams_rejected;
                continue;
            }
            if (r.packet().header.msg_type != dpp::MsgType::Data)
            {
                continue;
            }
            if (cfg.induced_loss > 0.0 && shim.bernoulli(cfg.induced_loss))
            {
                ++stats.datagrams_shim_dropped;
                continue;
            }
            handle(reasm.on_packet(r.packet(), now), now);
        }
        // Whatever is still incomplete will never finish.
        const SimTime end(monotonic_us() + static_cast<std::uint64_t>(deadline) + 1);
        handle(reasm.poll(end), end);

        latency_summary(std::move(latencies), stats);
        stats.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();
        return stats;
    }
} // namespace uvr::runner
