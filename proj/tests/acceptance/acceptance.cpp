// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "uvr/cli/report.hpp"
#include "uvr/codec/codec_model.hpp"
#include "uvr/core/rng.hpp"
#include "uvr/cp/control.hpp"
#include "uvr/dpp/copy_ledger.hpp"
#include "uvr/dpp/fragment.hpp"
#include "uvr/dpp/packet.hpp"
#include "uvr/dpp/reassembly.hpp"
#include "uvr/pipeline/analysis.hpp"
#include "uvr/pipeline/simulator.hpp"
#include "uvr/runner/runner.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace uvr;
using namespace uvr::pipeline;

namespace
{
    struct Outcome
    {
        bool pass = true;
        std::ostringstream detail;

        void check(bool ok, const std::string &what)
        {
            if (!ok)
            {
                pass = false;
                detail << " [violated: " << what << "]";
            }
        }
    };

    bool near(double v, double target, double tol)
    {
        return std::abs(v - target) <= tol;
    }

    std::string ms(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return buf;
    }

    ScenarioConfig named(std::string_view name)
    {
        return *preset(name);
    }

    double stage_mean(const MetricsReport &r, std::string_view name)
    {
        const auto *s = r.stage(name);
        return s ? s->mean_ms : std::nan("");
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    // 1 ----------------------------------------------------------------------
    void baseline_breakdown(Outcome &o)
    {
        auto cfg = named("baseline");
        cfg.seed = 42;
        cfg.duration_s = 60;
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = run_scenario(cfg).report;
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double net = stage_mean(r, "host_netstack"), enc = stage_mean(r, "encode_path"),
                     link = stage_mean(r, "network"), mud = stage_mean(r, "mud");
        o.detail << "host-netstack " << ms(net) << ", encode-path " << ms(enc) << ", net " << ms(link) << ", MUD "
                 << ms(mud) << ", total " << ms(r.end_to_end.mean_ms) << " ms; runtime " << ms(wall) << " s";
        o.check(near(net, 17.63, 0.05), "host-netstack 17.63 +/- 0.05");
        o.check(near(enc, 13.94, 0.05), "encode-path 13.94 +/- 0.05");
        o.check(near(link, 3.2, 0.05), "net-fixed 3.2 +/- 0.05");
        o.check(near(mud, 3.64, 0.05), "MUD 3.64 +/- 0.05");
        o.check(near(r.end_to_end.mean_ms, 38.41, 0.05), "total 38.41 +/- 0.05");
        o.check(wall < 10.0, "runtime < 10 s");
    }

    // 2 ----------------------------------------------------------------------
    void optimized_total(Outcome &o)
    {
        auto cfg = named("openuvr");
        cfg.duration_s = 60;
        const auto r = run_scenario(cfg).report;
        o.detail << "mean " << ms(r.end_to_end.mean_ms) << " ms, visual latency " << ms(r.visual_latency_frames)
                 << " frames";
        o.check(near(r.end_to_end.mean_ms, 14.32, 0.05), "mean 14.32 +/- 0.05");
        o.check(r.visual_latency_frames < 1.0, "visual latency < 1 frame");
    }

    // 3 ----------------------------------------------------------------------
    void toggle_deltas(Outcome &o)
    {
        const auto base = named("baseline");
        const auto tr = ab_compare(base, "transcode_avoidance");
        const auto sh = ab_compare(base, "shared_gpu_buffer");
        const auto di = ab_compare(base, "direct_net_io");
        const auto p2p_yuv = ab_compare(base, "p2p_topology");
        const auto p2p_rgb = ab_compare(named("openuvr"), "p2p_topology");
        const auto fb = ab_compare(base, "feedback_control");
        const auto ir = interaction_residual(base);

        double host = 0, mud = 0;
        for (const auto &s : di.stages)
        {
            host += s.stage == "host_netstack" ? s.saved_ms : 0.0;
            mud += s.stage == "mud" ? s.saved_ms : 0.0;
        }
        const double rgb = p2p_rgb.rgb_reference_ms.value_or(std::nan(""));
        o.detail << "transcode " << ms(tr.attributed_ms) << ", shared " << ms(sh.attributed_ms) << ", direct "
                 << ms(host) << "+" << ms(mud) << ", p2p YUV " << ms(p2p_yuv.attributed_ms) << " / RGB " << ms(rgb)
                 << ", feedback " << ms(fb.attributed_ms) << ", residual " << ms(ir.residual_ms) << " ms";
        o.check(near(tr.attributed_ms, 5.51, 0.1), "transcode 5.51");
        o.check(near(sh.attributed_ms, 4.71, 0.1), "shared 4.71");
        o.check(near(host, 13.67, 0.1) && near(mud, 0.7, 0.1), "direct 13.67 + 0.7");
        o.check(near(p2p_yuv.attributed_ms, 1.6, 0.1), "p2p YUV 1.6");
        o.check(near(rgb, 0.8, 0.1), "p2p RGB 0.8");
        o.check(near(fb.attributed_ms, 0.1, 0.1), "feedback 0.1");
        o.check(near(ir.residual_ms, 1.4, 0.1), "residual 1.4");
    }

    // 4 ----------------------------------------------------------------------
    void sync_budget(Outcome &o)
    {
        auto cfg = named("openuvr");
        cfg.duration_s = 60;
        cfg.render_work_us = 11'100;
        cfg.encode_mode = EncodeMode::Sync;
        const auto r = run_scenario(cfg).report;
        o.detail << "tick task " << ms(r.tick_task_mean_ms) << " ms (max " << ms(r.tick_task_max_ms) << "), overruns "
                 << r.tick_overruns << " over " << r.frames_rendered << " ticks";
        o.check(near(r.tick_task_mean_ms, 3.72, 0.05), "tick task 3.72 +/- 0.05");
        o.check(r.tick_overruns == 0, "no overruns");
    }

    // 5 ----------------------------------------------------------------------
    void recovery(Outcome &o)
    {
        const int runs = 1'000;
        std::vector<double> with, without;
        int within5 = 0;
        for (int i = 0; i < runs; ++i)
        {
            Rng pick(static_cast<std::uint64_t>(i) + 1);
            const auto drop = static_cast<std::uint32_t>(2 + pick.uniform_below(960));

            auto on = named("openuvr");
            on.seed = static_cast<std::uint64_t>(i) + 1;
            on.inject_drop_frame = drop;
            on.duration_s = (drop + 60) / 60.0;
            const auto a = run_scenario(on).report;
            const double iv = a.corrupted_intervals.empty() ? 1e9 : a.corrupted_intervals.front();
            with.push_back(iv);
            within5 += iv <= 5 ? 1 : 0;

            auto off = on;
            off.toggles.feedback_control = false;
            off.gop_size = 480;
            off.duration_s = (drop + 540) / 60.0;
            const auto b = run_scenario(off).report;
            without.push_back(b.corrupted_intervals.empty() ? 1e9 : b.corrupted_intervals.front());
        }
        const double share = static_cast<double>(within5) / runs;
        o.detail << runs << " drops at G=480: <=5 frames in " << ms(100.0 * share) << "%, median " << median(with)
                 << "; feedback off median " << median(without) << " frames";
        o.check(share >= 0.99, ">= 99% within 5 frames");
        o.check(median(with) <= 3, "median <= 3");
        o.check(median(without) >= 0.4 * 480 && median(without) <= 0.6 * 480, "feedback-off median in [192, 288]");
    }

    // 6 ----------------------------------------------------------------------
    void iframe_cadence(Outcome &o)
    {
        for (std::int32_t gop : {480, 20})
        {
            auto cfg = named("openuvr");
            cfg.duration_s = 60;
            cfg.gop_size = gop;
            const auto res = run_scenario(cfg);
            std::int64_t max_p = 0;
            for (const auto &t : res.trace)
            {
                if (t.type == codec::FrameType::P)
                {
                    max_p = std::max(max_p, t.e2e_us());
                }
            }
            // A spike is any frame slower than every P-frame.
            std::vector<std::uint32_t> spikes;
            bool spikes_are_i = true;
            for (const auto &t : res.trace)
            {
                if (t.e2e_us() > max_p)
                {
                    spikes.push_back(t.frame_id);
                    spikes_are_i = spikes_are_i && t.type == codec::FrameType::I;
                }
            }
            bool exact = spikes.size() >= 2;
            for (std::size_t k = 1; k < spikes.size(); ++k)
            {
                exact = exact && spikes[k] - spikes[k - 1] == static_cast<std::uint32_t>(gop);
            }
            const double per_s = static_cast<double>(spikes.size()) / cfg.duration_s;
            o.detail << "G=" << gop << ": " << spikes.size() << " spikes, spacing "
                     << (spikes.size() >= 2 ? spikes[1] - spikes[0] : 0) << " frames (" << ms(per_s) << "/s); ";
            o.check(exact && spikes_are_i, "spikes exactly every " + std::to_string(gop) + " frames");
        }
    }

    // 7 ----------------------------------------------------------------------
    std::vector<std::uint8_t> golden()
    {
        return {0x55, 0x56, 0x01, 0x01, 0x01, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01,
                0x00, 0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x2A, 0x41, 0x42};
    }

    class Udp
    {
    public:
        explicit Udp(std::uint16_t port)
        {
            fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
            const sockaddr_in a = addr(port);
            if (::bind(fd_, reinterpret_cast<const sockaddr *>(&a), sizeof a) != 0)
            {
                throw std::runtime_error("bind failed on port " + std::to_string(port));
            }
            const int buf = 4 << 20;
            ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
            timeval tv{0, 200'000};
            ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        }
        ~Udp() { ::close(fd_); }

        static sockaddr_in addr(std::uint16_t port)
        {
            sockaddr_in a{};
            a.sin_family = AF_INET;
            a.sin_port = htons(port);
            a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            return a;
        }

        std::optional<std::vector<std::uint8_t>> recv()
        {
            std::vector<std::uint8_t> b(65'536);
            socklen_t len = sizeof from_;
            const auto n = ::recvfrom(fd_, b.data(), b.size(), 0, reinterpret_cast<sockaddr *>(&from_), &len);
            if (n < 0)
            {
                return std::nullopt;
            }
            b.resize(static_cast<std::size_t>(n));
            return b;
        }

        void send(std::uint16_t port, const std::vector<std::uint8_t> &b)
        {
            const sockaddr_in a = addr(port);
            ::sendto(fd_, b.data(), b.size(), 0, reinterpret_cast<const sockaddr *>(&a), sizeof a);
        }

        void reply(const std::vector<std::uint8_t> &b)
        {
            ::sendto(fd_, b.data(), b.size(), 0, reinterpret_cast<const sockaddr *>(&from_), sizeof from_);
        }

    private:
        int fd_ = -1;
        sockaddr_in from_{};
    };

    std::uint16_t port_base()
    {
        return static_cast<std::uint16_t>(45'000 + (::getpid() % 500) * 16);
    }

    runner::RunnerConfig runner_cfg(runner::Role role, std::uint16_t bind, std::uint16_t peer, double seconds)
    {
        runner::RunnerConfig c;
        c.role = role;
        c.bind_port = bind;
        c.peer_port = peer;
        c.duration_s = seconds;
        c.codec.gop_size = 480;
        c.idle_timeout_ms = 500;
        return c;
    }

    // Runs a real host against a scripted MUD; returns (datagrams checked, mismatches).
    std::pair<std::size_t, std::size_t> runner_wire_check(std::uint16_t base)
    {
        Udp mud(base + 1);
        auto host = std::async(std::launch::async,
                               [&] { return runner::host_run(runner_cfg(runner::Role::Host, base, 0, 0.5)); });
        const auto hello = cp::encode_message(cp::make_hello({20'000, 60, 480}, SimTime(0)));
        bool connected = false;
        for (int i = 0; i < 15 && !connected; ++i)
        {
            mud.send(base, hello);
            if (auto d = mud.recv())
            {
                connected = dpp::decode_packet(*d).ok();
            }
        }
        std::size_t checked = 0, bad = 0;
        while (auto d = mud.recv())
        {
            const auto p = dpp::decode_packet(*d);
            if (!p.ok())
            {
                ++bad;
                continue;
            }
            const auto &h = p.packet().header;
            if (h.msg_type != dpp::MsgType::Data)
            {
                continue;
            }
            const std::size_t off = static_cast<std::size_t>(h.frag_index) * dpp::kMaxPayload;
            const auto full = runner::payload_pattern(h.frame_id, off + h.payload_len);
            const auto expect = dpp::encode_packet(
                dpp::DppPacket::make(h, std::vector<std::uint8_t>(full.begin() + static_cast<long>(off), full.end())));
            bad += *d == expect ? 0 : 1;
            ++checked;
        }
        host.get();
        return {checked, bad};
    }

    // Feeds the golden vector to a real MUD; true when it completes one frame and rejects nothing.
    bool runner_parses_golden(std::uint16_t base)
    {
        Udp host(base);
        auto c = runner_cfg(runner::Role::Mud, base + 1, base, 1.0);
        c.idle_timeout_ms = 300;
        auto mud = std::async(std::launch::async, [&] { return runner::mud_run(c); });
        if (!host.recv())
        {
            mud.wait();
            return false;
        }
        host.reply(cp::encode_message(cp::make_hello({20'000, 60, 480}, SimTime(0))));
        host.reply(golden());
        const auto s = mud.get();
        return s.frames_completed == 1 && s.datagrams_rejected == 0;
    }

    void protocol_properties(Outcome &o)
    {
        Rng rng(7);
        const int n = 10'000;
        int wire_ok = 0;
        for (int i = 0; i < n; ++i)
        {
            dpp::DppHeader h;
            h.msg_type = rng.uniform_below(2) ? dpp::MsgType::Data : dpp::MsgType::Ctrl;
            h.flags = static_cast<std::uint8_t>(rng.uniform_below(4));
            h.frame_id = static_cast<std::uint32_t>(rng.next_u64());
            h.frag_count = static_cast<std::uint16_t>(1 + rng.uniform_below(65'535));
            h.frag_index = static_cast<std::uint16_t>(rng.uniform_below(h.frag_count));
            h.gen_timestamp_us = rng.next_u64();
            std::vector<std::uint8_t> payload(rng.uniform_below(dpp::kMaxPayload + 1));
            for (auto &b : payload)
            {
                b = static_cast<std::uint8_t>(rng.next_u64());
            }
            const auto p = dpp::DppPacket::make(h, std::move(payload));
            const auto bytes = dpp::encode_packet(p);
            const auto back = dpp::decode_packet(bytes);
            wire_ok += back.ok() && back.packet() == p && dpp::encode_packet(back.packet()) == bytes ? 1 : 0;
        }

        int frag_ok = 0;
        for (int i = 0; i < n; ++i)
        {
            const auto size = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::exp(rng.uniform() * std::log(i < 20 ? 1e7 : 2e5))));
            codec::EncodedFrame f;
            f.frame_id = static_cast<std::uint32_t>(i + 1);
            f.size_bytes = size;
            std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
            for (auto &b : bytes)
            {
                b = static_cast<std::uint8_t>(rng.next_u64());
            }
            auto pkts = dpp::fragment(f, bytes);
            for (std::size_t k = pkts.size(); k > 1; --k)
            {
                std::swap(pkts[k - 1], pkts[rng.uniform_below(k)]);
            }
            dpp::Reassembler r({33'334, true, 4096});
            std::vector<dpp::FrameOutcome> out;
            for (const auto &p : pkts)
            {
                auto v = r.on_packet(p, SimTime(0));
                out.insert(out.end(), v.begin(), v.end());
            }
            frag_ok += out.size() == 1 && std::get<dpp::FrameComplete>(out[0]).payload == bytes ? 1 : 0;
        }

        // Exactly-once under shuffled, duplicated and lossy delivery.
        dpp::Reassembler r;
        std::map<std::uint32_t, int> resolved;
        auto note = [&](const std::vector<dpp::FrameOutcome> &v)
        {
            for (const auto &e : v)
            {
                ++resolved[std::visit([](const auto &x) { return x.frame_id; }, e)];
            }
        };
        const std::uint32_t frames = 3'000;
        for (std::uint32_t id = 1; id <= frames; ++id)
        {
            codec::EncodedFrame f;
            f.frame_id = id;
            f.size_bytes = 1 + static_cast<std::int64_t>(rng.uniform_below(80'000));
            auto hs = dpp::fragment_headers(f);
            const std::size_t m = hs.size();
            for (std::size_t k = 0; k < m / 3; ++k)
            {
                hs.push_back(hs[rng.uniform_below(m)]);
            }
            for (std::size_t k = hs.size(); k > 1; --k)
            {
                std::swap(hs[k - 1], hs[rng.uniform_below(k)]);
            }
            const std::int64_t t0 = cadence_tick_us(id, 60);
            for (std::size_t k = 0; k < hs.size(); ++k)
            {
                if (rng.uniform() >= 0.02)
                {
                    note(r.on_fragment(hs[k], {}, SimTime(t0 + static_cast<std::int64_t>(k) * 40)));
                }
            }
        }
        note(r.poll(SimTime(cadence_tick_us(frames + 10, 60))));
        bool once = resolved.size() == frames;
        for (const auto &[id, count] : resolved)
        {
            once = once && count == 1;
        }

        const bool sim_golden = [] {
            dpp::DppHeader h;
            h.flags = dpp::flags::kIFrame;
            h.frame_id = 1;
            h.payload_len = 2;
            h.gen_timestamp_us = 42;
            return dpp::encode_packet(dpp::DppPacket::make(h, {0x41, 0x42})) == golden();
        }();
        const auto base = port_base();
        const auto [checked, bad] = runner_wire_check(base);
        const bool mud_golden = runner_parses_golden(base + 4);

        o.detail << "wire round-trips " << wire_ok << "/" << n << ", fragment round-trips " << frag_ok << "/" << n
                 << ", exactly-once " << (once ? "yes" : "no") << " (" << r.counters().dropped << " drops, "
                 << r.counters().duplicates << " dups), golden sim " << (sim_golden ? "ok" : "BAD") << ", runner "
                 << checked << " datagrams " << bad << " mismatched, MUD golden " << (mud_golden ? "ok" : "BAD");
        o.check(wire_ok == n, "packet round-trip");
        o.check(frag_ok == n, "fragment/reassemble identity");
        o.check(once, "exactly-once resolution");
        o.check(sim_golden, "simulator golden vector");
        o.check(checked > 0 && bad == 0 && mud_golden, "runner golden vector / wire bytes");
    }

    // 8 ----------------------------------------------------------------------
    void copy_ledger(Outcome &o)
    {
        auto b = named("baseline");
        auto a = named("openuvr");
        b.duration_s = a.duration_s = 60;
        const auto base = run_scenario(b);
        const auto opt = run_scenario(a);
        bool per_frame = base.trace.size() == opt.trace.size();
        std::size_t opt_one = 0, base_three = 0;
        for (std::size_t i = 0; per_frame && i < base.trace.size(); ++i)
        {
            opt_one += opt.trace[i].encoded_copies == 1 ? 1 : 0;
            base_three += base.trace[i].encoded_copies == 3 ? 1 : 0;
            per_frame = opt.trace[i].copied_bytes < base.trace[i].copied_bytes;
        }
        o.detail << "optimized frames with 1 encoded copy " << opt_one << "/" << opt.trace.size()
                 << ", baseline frames with 3 " << base_three << "/" << base.trace.size()
                 << ", copied bytes optimized " << opt.report.copied_bytes << " vs baseline "
                 << base.report.copied_bytes;
        o.check(opt_one == opt.trace.size() && base_three == base.trace.size(), "1 vs 3 encoded copies");
        o.check(per_frame, "optimized bytes < baseline bytes for every frame");
    }

    // 9 ----------------------------------------------------------------------
    void bitrate_conservation(Outcome &o)
    {
        // YUV frames: the encoder is held to the configured bitrate.
        for (auto name : {"baseline", "openuvr"})
        {
            auto cfg = named(name);
            cfg.duration_s = 60;
            cfg.workload.complexity_sigma = 0.0;
            cfg.toggles.transcode_avoidance = false;
            const auto r = run_scenario(cfg).report;
            o.detail << name << " (YUV, G=" << cfg.resolved_gop_size() << ") " << ms(r.encoded_throughput_bps / 1e6)
                     << " Mbps, dropped " << r.frames_dropped << "; ";
            o.check(near(r.encoded_throughput_bps, 20e6, 20e6 * 0.001) && r.frames_dropped == 0,
                    std::string(name) + " 20 Mbps +/- 0.1%");
        }
    }

    // 10 ---------------------------------------------------------------------
    void decode_cap(Outcome &o)
    {
        const codec::DecoderConfig cfg{3'640, 60, 2};
        codec::DecoderState fast(cfg);
        std::vector<std::int64_t> per_second(10, 0);
        std::int64_t prev = -1;
        bool increasing = true;
        for (std::int64_t i = 0; i < 900; ++i)
        {
            const SimTime t(cadence_tick_us(i, 90));
            const auto d = fast.offer(t);
            if (i >= 3)
            {
                increasing = increasing && d.queue_delay_us > prev;
            }
            prev = d.queue_delay_us;
            per_second[static_cast<std::size_t>(t.us() / 1'000'000)] = d.queue_delay_us;
        }
        bool seconds_increasing = true;
        for (std::size_t s = 1; s < per_second.size(); ++s)
        {
            seconds_increasing = seconds_increasing && per_second[s] > per_second[s - 1];
        }

        codec::DecoderState steady(cfg);
        std::vector<std::int64_t> waits;
        for (std::int64_t i = 0; i < 600; ++i)
        {
            waits.push_back(steady.offer(SimTime(cadence_tick_us(i, 60))).queue_delay_us);
        }
        std::sort(waits.begin(), waits.end());
        const auto p99 = waits[static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(waits.size()))) - 1];
        o.detail << "90 FPS queueing delay after 1 s " << ms(per_second[0] / 1000.0) << " ms, after 10 s "
                 << ms(per_second[9] / 1000.0) << " ms; 60 FPS p99 " << ms(p99 / 1000.0) << " ms vs service "
                 << ms(cfg.service_interval_us() / 1000.0) << " ms";
        o.check(increasing && seconds_increasing, "monotonically increasing at 90 FPS");
        o.check(p99 < cfg.service_interval_us(), "60 FPS p99 < one service time");
    }

    // 11 ---------------------------------------------------------------------
    void runner_loopback(Outcome &o)
    {
        const auto base = static_cast<std::uint16_t>(port_base() + 8);
        auto host = std::async(std::launch::async, [&] {
            return runner::host_run(runner_cfg(runner::Role::Host, base, 0, 10.0));
        });
        const auto mud = runner::mud_run(runner_cfg(runner::Role::Mud, base + 1, base, 10.0));
        const auto h = host.get();

        auto lossy = runner_cfg(runner::Role::Mud, base + 3, base + 2, 5.0);
        lossy.induced_loss = 0.01;
        auto host2 = std::async(std::launch::async, [&] {
            return runner::host_run(runner_cfg(runner::Role::Host, base + 2, 0, 5.0));
        });
        const auto mud2 = runner::mud_run(lossy);
        const auto h2 = host2.get();
        std::size_t logged = 0;
        for (const auto &e : mud2.events)
        {
            logged += e.find("IFRAME_REQUEST") != std::string::npos ? 1 : 0;
        }
        const auto [checked, bad] = runner_wire_check(static_cast<std::uint16_t>(base + 4));

        o.detail << "loss-free: sent " << h.frames_sent << ", completed " << mud.frames_completed << ", dropped "
                 << mud.frames_dropped << ", mismatches " << mud.pattern_mismatches << ", p50 "
                 << ms(mud.latency_p50_ms) << " ms; 1% loss: " << mud2.frames_dropped << " drops, "
                 << mud2.requests_sent << " requests (" << logged << " logged), host forced " << h2.forced_iframes
                 << " I-frames; wire " << checked << " datagrams " << bad << " mismatched";
        o.check(mud.frames_dropped == 0 && mud.pattern_mismatches == 0, "0 dropped, 0 mismatches");
        o.check(std::abs(static_cast<double>(mud.frames_completed) - 600.0) <= 1.0, "600 +/- 1 frames");
        o.check(mud2.frames_dropped > 0 && mud2.requests_sent > 0 && logged > 0 && h2.forced_iframes > 0,
                "requests and forced I-frames under loss");
        o.check(checked > 0 && bad == 0, "wire bytes equal encoder output");
    }

    // 12 ---------------------------------------------------------------------
    void determinism(Outcome &o)
    {
        std::size_t same = 0, total = 0;
        for (auto name : preset_names())
        {
            auto cfg = named(name);
            cfg.duration_s = 20;
            cfg.channel.jitter_sigma_us = 80;
            cfg.channel.loss.kind = netsim::LossKind::Bernoulli;
            cfg.channel.loss.p = 0.005;
            const auto a = cli::run_report(run_scenario(cfg).report, 1.0);
            const auto b = cli::run_report(run_scenario(cfg).report, 2.0);
            same += cli::deterministic_part(a).dump() == cli::deterministic_part(b).dump() ? 1 : 0;
            ++total;
        }
        o.detail << same << "/" << total << " presets byte-identical across reruns (lossy, jittered)";
        o.check(same == total, "byte-identical reports");
    }
} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Outcome &)>>> criteria = {
        {"baseline breakdown", baseline_breakdown},
        {"optimized total", optimized_total},
        {"per-toggle deltas", toggle_deltas},
        {"sync-mode budget", sync_budget},
        {"recovery", recovery},
        {"I-frame cadence", iframe_cadence},
        {"protocol properties", protocol_properties},
        {"copy ledger", copy_ledger},
        {"bitrate conservation", bitrate_conservation},
        {"decode cap", decode_cap},
        {"runner", runner_loopback},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o;
        try
        {
            criteria[i].second(o);
        }
        catch (const std::exception &e)
        {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
