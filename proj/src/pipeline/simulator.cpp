#include "uvr/pipeline/simulator.hpp"

#include "uvr/core/event_queue.hpp"
#include "uvr/cp/control.hpp"
#include "uvr/dpp/copy_ledger.hpp"
#include "uvr/dpp/fragment.hpp"
#include "uvr/dpp/reassembly.hpp"
#include "uvr/netsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <variant>

namespace uvr::pipeline
{
    namespace
    {
        struct RenderTick
        {
            std::int64_t index;
        };
        struct SampleTick
        {
            std::int64_t index;
        };
        struct FrameSend
        {
            std::uint32_t frame_id;
        };
        struct FragmentArrive
        {
            dpp::DppHeader header;
        };
        struct DeadlinePoll
        {
        };
        struct ControlArrive
        {
            cp::CpMessage msg;
        };

        using Event = std::variant<RenderTick, SampleTick, FrameSend, FragmentArrive, DeadlinePoll, ControlArrive>;

        double percentile_ms(const std::vector<std::int64_t> &sorted, double q)
        {
            if (sorted.empty())
            {
                return 0.0;
            }
            // Nearest rank.
            const auto n = sorted.size();
            auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
            rank = std::clamp<std::size_t>(rank, 1, n);
            return static_cast<double>(sorted[rank - 1]) / 1000.0;
        }

        std::string fnv1a_hex(const std::string &s)
        {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (unsigned char c : s)
            {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
            return buf;
        }

        class Simulation
        {
        public:
            explicit Simulation(const ScenarioConfig &cfg)
                : cfg_(cfg), codec_(cfg.codec_config()), channel_(cfg.channel_model()),
                  graph_(build_datapath(cfg.toggles, cfg.stages)), decoder_(cfg.decoder_config()),
                  workload_(cfg.workload, Rng(cfg.seed).fork(1)), net_rng_(Rng(cfg.seed).fork(2)),
                  ctrl_rng_(Rng(cfg.seed).fork(3)),
                  reassembler_(dpp::ReassemblyConfig{cfg.resolved_drop_deadline_us(), false, 4096}),
                  duration_us_(static_cast<std::int64_t>(std::llround(cfg.duration_s * 1e6))),
                  gop_size_(cfg.resolved_gop_size())
            {
                encode_us_ = graph_.phase_cost_us(Phase::EncodePath);
                send_us_ = graph_.phase_cost_us(Phase::HostSend);
                presentation_us_ = graph_.phase_cost_us(Phase::Presentation);
            }

            SimulationResult run()
            {
                queue_.schedule(SimTime(0), RenderTick{0});
                if (cfg_.encode_mode == EncodeMode::Async)
                {
                    queue_.schedule(SimTime(0), SampleTick{0});
                }
                while (auto e = queue_.pop())
                {
                    std::visit([&](const auto &ev) { handle(ev, e->time); }, e->payload);
                }
                return finish();
            }

        private:
            void handle(const RenderTick &ev, SimTime now)
            {
                RawFrame frame = workload_.next_frame(now);
                ++rendered_;
                if (cfg_.encode_mode == EncodeMode::Sync)
                {
                    // Encode on the render tick, at most codec_fps times per second.
                    const std::int64_t fps = cfg_.workload.render_fps;
                    const std::int64_t slot = ev.index * cfg_.encode_fps() / fps;
                    const bool encode = ev.index == 0 || slot != (ev.index - 1) * cfg_.encode_fps() / fps;
                    if (encode)
                    {
                        encode_frame(frame, now);
                        const std::int64_t task = encode_us_;
                        tick_tasks_.push_back(task);
                        if (cfg_.render_work_us + task > cadence_period_us(ev.index, fps))
                        {
                            ++tick_overruns_;
                        }
                    }
                }
                else
                {
                    latest_ = frame;
                }
                next_render_us_ = schedule_next(ev.index + 1, cfg_.workload.render_fps,
                                                [](std::int64_t i) { return RenderTick{i}; });
            }

            void handle(const SampleTick &ev, SimTime now)
            {
                // A render finishing at this instant is visible to the sampler.
                if (next_render_us_ == now.us())
                {
                    queue_.schedule(now, ev);
                    return;
                }
                if (latest_ && latest_->frame_id != last_sampled_)
                {
                    last_sampled_ = latest_->frame_id;
                    encode_frame(*latest_, now);
                }
                schedule_next(ev.index + 1, cfg_.codec_fps, [](std::int64_t i) { return SampleTick{i}; });
            }

            template <typename Make>
            std::int64_t schedule_next(std::int64_t index, std::int64_t fps, Make make)
            {
                const std::int64_t t = cadence_tick_us(index, fps);
                if (t >= duration_us_)
                {
                    return kUnset;
                }
                queue_.schedule(SimTime(t), make(index));
                return t;
            }

            void encode_frame(const RawFrame &raw, SimTime now)
            {
                const bool force = cfg_.toggles.feedback_control && host_fb_.pending_force;
                const codec::FramePlan plan = codec::plan_frame(gop_, force, gop_size_);
                const bool iframe = plan.type == codec::FrameType::I;
                if (cfg_.toggles.feedback_control)
                {
                    cp::host_on_frame_encoded(host_fb_, iframe, now, cfg_.suppression_window_us);
                }

                codec::EncodedFrame f;
                f.frame_id = static_cast<std::uint32_t>(frames_.size() + 1);
                f.source_frame_id = raw.frame_id;
                f.type = plan.type;
                f.size_bytes = codec::encoded_size(plan.type, codec_, raw.complexity);
                f.gop_index = plan.gop_index;
                f.gen_time = raw.gen_time;
                f.encode_done_time = now + encode_us_;
                f.forced = plan.forced;

                FrameTrace t;
                t.frame_id = f.frame_id;
                t.source_frame_id = f.source_frame_id;
                t.type = f.type;
                t.forced = f.forced;
                t.size_bytes = f.size_bytes;
                t.fragments = dpp::fragment_count(f.size_bytes);
                t.gen_us = raw.gen_time.us();
                t.encode_start_us = now.us();
                t.encoded_us = f.encode_done_time.us();
                const std::int64_t send = send_us_ + (iframe ? cfg_.stages.iframe_send_extra_us : 0);
                t.send_done_us = t.encoded_us + send;

                dpp::CopyLedger ledger;
                graph_.apply_copies({raw_frame_bytes(raw.width, raw.height, ColorSpace::Rgb),
                                     raw_frame_bytes(raw.width, raw.height, ColorSpace::Yuv420), f.size_bytes},
                                    ledger);
                t.copied_bytes = ledger.total_bytes();
                copy_entries_ += ledger.entries().size();
                dpp::CopyLedger send_ledger;
                graph_.apply_send_copies(f.size_bytes, send_ledger);
                t.encoded_copies = static_cast<std::uint32_t>(send_ledger.count_of(dpp::Content::Encoded));

                frames_.push_back(f);
                trace_.push_back(t);
                queue_.schedule(SimTime(t.send_done_us) + channel_.hops() * cfg_.stages.net_frame_overhead_us,
                                FrameSend{f.frame_id});
            }

            void handle(const FrameSend &ev, SimTime now)
            {
                const codec::EncodedFrame &f = frames_[ev.frame_id - 1];
                FrameTrace &t = trace_[ev.frame_id - 1];
                t.sent_first_us = now.us();
                for (const auto &h : dpp::fragment_headers(f))
                {
                    const auto tx = netsim::transmit(channel_, link_, dpp::kHeaderSize + h.payload_len, now, net_rng_);
                    const bool injected = cfg_.inject_drop_frame == f.frame_id && h.frag_index == 0;
                    if (tx.delivered && !injected)
                    {
                        queue_.schedule(tx.arrival, FragmentArrive{h});
                    }
                }
                t.sent_last_us = link_.busy_until.us();
            }

            void handle(const FragmentArrive &ev, SimTime now)
            {
                FrameTrace &t = trace_[ev.header.frame_id - 1];
                if (t.arrived_first_us == kUnset)
                {
                    t.arrived_first_us = now.us();
                }
                resolve(reassembler_.on_fragment(ev.header, {}, now), now);
                arm_poll();
            }

            void handle(const DeadlinePoll &, SimTime now)
            {
                if (poll_at_ != now)
                {
                    return;
                }
                poll_at_.reset();
                resolve(reassembler_.poll(now), now);
                arm_poll();
            }

            void arm_poll()
            {
                const auto next = reassembler_.next_deadline();
                if (next && (!poll_at_ || *next < *poll_at_))
                {
                    poll_at_ = *next;
                    queue_.schedule(*next, DeadlinePoll{});
                }
            }

            void resolve(const std::vector<dpp::FrameOutcome> &outcomes, SimTime now)
            {
                for (const auto &o : outcomes)
                {
                    if (const auto *done = std::get_if<dpp::FrameComplete>(&o))
                    {
                        on_complete(*done, now);
                    }
                    else
                    {
                        const auto &drop = std::get<dpp::FrameDropped>(o);
                        FrameTrace &t = trace_[drop.frame_id - 1];
                        t.dropped = true;
                        clean_.resize(std::max<std::size_t>(clean_.size(), drop.frame_id + 1), false);
                    }
                    if (cfg_.toggles.feedback_control)
                    {
                        for (const auto &m : cp::mud_on_frame_event(mud_fb_, o, now))
                        {
                            send_control(m, now);
                        }
                    }
                }
            }

            void on_complete(const dpp::FrameComplete &done, SimTime now)
            {
                FrameTrace &t = trace_[done.frame_id - 1];
                t.arrived_last_us = now.us();
                const codec::DecodeResult d = decoder_.offer(now);
                t.decode_start_us = d.start.us();
                t.decoded_us = d.present.us();
                t.presented_us = t.decoded_us + presentation_us_;
                queue_delays_.push_back(d.queue_delay_us);

                // A P-frame decodes cleanly only on top of a clean predecessor.
                const std::uint32_t id = done.frame_id;
                clean_.resize(std::max<std::size_t>(clean_.size(), id + 1), false);
                const bool clean = done.iframe || (id > 1 && clean_[id - 1]);
                clean_[id] = clean;
                t.corrupted = !clean;
            }

            void send_control(const cp::CpMessage &m, SimTime now)
            {
                ++requests_sent_;
                const auto tx = netsim::transmit(channel_, reverse_link_,
                                                 static_cast<std::int64_t>(cp::encode_message(m).size()), now, ctrl_rng_);
                if (tx.delivered)
                {
                    queue_.schedule(tx.arrival, ControlArrive{m});
                }
            }

            void handle(const ControlArrive &ev, SimTime now)
            {
                if (cp::host_on_request(host_fb_, ev.msg, now) == cp::HostDecision::ForceNextIFrame)
                {
                    ++requests_accepted_;
                }
                else
                {
                    ++requests_suppressed_;
                }
            }

            SimulationResult finish();

            ScenarioConfig cfg_;
            codec::CodecConfig codec_;
            netsim::ChannelModel channel_;
            DatapathGraph graph_;
            codec::DecoderState decoder_;
            Workload workload_;
            Rng net_rng_;
            Rng ctrl_rng_;
            dpp::Reassembler reassembler_;
            std::int64_t duration_us_;
            std::int32_t gop_size_;

            std::int64_t encode_us_ = 0;
            std::int64_t send_us_ = 0;
            std::int64_t presentation_us_ = 0;

            EventQueue<Event> queue_;
            codec::GopState gop_;
            cp::HostFeedbackState host_fb_;
            cp::MudFeedbackState mud_fb_;
            netsim::LinkState link_;
            netsim::LinkState reverse_link_;
            std::optional<SimTime> poll_at_;

            std::optional<RawFrame> latest_;
            std::uint64_t last_sampled_ = 0;
            std::uint64_t rendered_ = 0;
            std::int64_t next_render_us_ = 0;

            std::vector<codec::EncodedFrame> frames_;
            std::vector<FrameTrace> trace_;
            std::vector<bool> clean_;
            std::vector<std::int64_t> tick_tasks_;
            std::uint64_t tick_overruns_ = 0;
            std::vector<std::int64_t> queue_delays_;
            std::uint64_t copy_entries_ = 0;
            std::uint64_t requests_sent_ = 0;
            std::uint64_t requests_accepted_ = 0;
            std::uint64_t requests_suppressed_ = 0;
        };

        SimulationResult Simulation::finish()
        {
            MetricsReport r;
            r.seed = cfg_.seed;
            r.config = cfg_;

            const bool async = cfg_.encode_mode == EncodeMode::Async;
            const bool presentation = graph_.has("presentation");
            std::vector<std::int64_t> wait, enc, send, net, mud, pres, e2e;
            std::ostringstream lines;
            for (const auto &t : trace_)
            {
                write_trace_line(lines, t);
                r.encoded_bytes += t.size_bytes;
                r.copied_bytes += t.copied_bytes;
                r.encoded_copies_per_frame += t.encoded_copies;
                if (t.type == codec::FrameType::I)
                {
                    ++r.iframes;
                }
                if (t.forced)
                {
                    ++r.forced_iframes;
                }
                if (t.dropped)
                {
                    ++r.frames_dropped;
                }
                if (!t.presented())
                {
                    continue;
                }
                ++r.frames_presented;
                if (t.corrupted)
                {
                    ++r.frames_corrupted;
                }
                wait.push_back(t.encode_start_us - t.gen_us);
                enc.push_back(t.encoded_us - t.encode_start_us);
                send.push_back(t.send_done_us - t.encoded_us);
                net.push_back(t.arrived_last_us - t.send_done_us);
                mud.push_back(t.decoded_us - t.arrived_last_us);
                pres.push_back(t.presented_us - t.decoded_us);
                e2e.push_back(t.e2e_us());
            }

            if (async)
            {
                r.stages.push_back(summarize("sample_wait", std::move(wait)));
            }
            r.stages.push_back(summarize("encode_path", std::move(enc)));
            r.stages.push_back(summarize("host_netstack", std::move(send)));
            r.stages.push_back(summarize("network", std::move(net)));
            r.stages.push_back(summarize("mud", std::move(mud)));
            if (presentation)
            {
                r.stages.push_back(summarize("presentation", std::move(pres)));
            }
            r.end_to_end = summarize("end_to_end", std::move(e2e));
            r.visual_latency_frames = r.end_to_end.mean_ms / kFramePeriodMs60;
            r.visual_latency_p99_frames = r.end_to_end.p99_ms / kFramePeriodMs60;

            r.frames_rendered = rendered_;
            r.frames_encoded = trace_.size();
            r.frames_skipped = rendered_ - trace_.size();
            if (r.frames_encoded > 0)
            {
                const auto n = static_cast<double>(r.frames_encoded);
                r.dropped_rate = static_cast<double>(r.frames_dropped) / n;
                r.corrupted_rate = static_cast<double>(r.frames_corrupted) / n;
                r.encoded_copies_per_frame /= n;
            }
            r.requests_sent = requests_sent_;
            r.requests_accepted = requests_accepted_;
            r.requests_suppressed = requests_suppressed_;

            r.encoded_throughput_bps = static_cast<double>(r.encoded_bytes) * 8.0 / cfg_.duration_s;
            r.copy_entries = copy_entries_;
            r.link_utilization = netsim::link_occupancy(link_, duration_us_);
            r.packets_sent = link_.counters.sent;
            r.packets_lost = link_.counters.dropped;

            if (!tick_tasks_.empty())
            {
                const auto sum = std::accumulate(tick_tasks_.begin(), tick_tasks_.end(), std::int64_t{0});
                r.tick_task_mean_ms = static_cast<double>(sum) / static_cast<double>(tick_tasks_.size()) / 1000.0;
                r.tick_task_max_ms = static_cast<double>(*std::max_element(tick_tasks_.begin(), tick_tasks_.end())) / 1000.0;
            }
            r.tick_overruns = tick_overruns_;

            r.decoder_max_queue = decoder_.max_queue_length();
            const StageStats qd = summarize("decoder_queue", queue_delays_);
            r.decoder_queue_delay_mean_ms = qd.mean_ms;
            r.decoder_queue_delay_p99_ms = qd.p99_ms;

            // Each run of unclean frames that starts with a drop is one interval.
            clean_.resize(trace_.size() + 1, false);
            for (std::size_t i = 0; i < trace_.size(); ++i)
            {
                // trace_[i] is frame id i + 1.
                if (!trace_[i].dropped || (i > 0 && !clean_[i]))
                {
                    continue;
                }
                std::size_t k = i + 1;
                while (k < trace_.size() && !clean_[k + 1])
                {
                    ++k;
                }
                r.corrupted_intervals.push_back(static_cast<std::uint32_t>(k - i));
                i = k - 1;
            }

            r.transcript_digest = fnv1a_hex(lines.str());
            return {std::move(r), std::move(trace_)};
        }
    } // namespace

    void write_trace_line(std::ostream &os, const FrameTrace &t)
    {
        os << t.frame_id << ',' << codec::to_string(t.type) << ',' << (t.forced ? 1 : 0) << ',' << t.gen_us << ','
           << t.encoded_us << ',' << t.sent_first_us << ',' << t.arrived_last_us << ',' << t.presented_us << ','
           << (t.dropped ? 1 : 0) << ',' << (t.corrupted ? 1 : 0) << '\n';
    }

    void write_trace(std::ostream &os, const std::vector<FrameTrace> &trace)
    {
        os << kTraceHeader << '\n';
        for (const auto &t : trace)
        {
            write_trace_line(os, t);
        }
    }

    StageStats summarize(std::string name, std::vector<std::int64_t> samples_us)
    {
        StageStats s;
        s.name = std::move(name);
        s.samples = samples_us.size();
        if (samples_us.empty())
        {
            return s;
        }
        std::sort(samples_us.begin(), samples_us.end());
        const auto sum = std::accumulate(samples_us.begin(), samples_us.end(), std::int64_t{0});
        s.mean_ms = static_cast<double>(sum) / static_cast<double>(samples_us.size()) / 1000.0;
        s.p50_ms = percentile_ms(samples_us, 0.50);
        s.p99_ms = percentile_ms(samples_us, 0.99);
        return s;
    }

    const StageStats *MetricsReport::stage(std::string_view name) const
    {
        for (const auto &s : stages)
        {
            if (s.name == name)
            {
                return &s;
            }
        }
        return nullptr;
    }

    SimulationResult run_scenario(const ScenarioConfig &cfg)
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
        return Simulation(cfg).run();
    }
} // namespace uvr::pipeline
