#include "uvr/cli/report.hpp"

#include "uvr/cli/scenario_file.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <stdexcept>

namespace uvr::cli
{
    using pipeline::MetricsReport;

    namespace
    {
        Json stage_json(const pipeline::StageStats &s)
        {
            return {{"name", s.name}, {"mean_ms", s.mean_ms}, {"p50_ms", s.p50_ms}, {"p99_ms", s.p99_ms},
                    {"samples", s.samples}};
        }

        std::string fixed(double v, int prec = 3)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", prec, v);
            return buf;
        }

        /// Left-aligned first column, right-aligned numeric columns.
        void table(std::ostream &os, const std::vector<std::string> &header,
                   const std::vector<std::vector<std::string>> &rows)
        {
            std::vector<std::size_t> w(header.size());
            for (std::size_t c = 0; c < header.size(); ++c)
            {
                w[c] = header[c].size();
                for (const auto &r : rows)
                {
                    w[c] = std::max(w[c], r[c].size());
                }
            }
            auto line = [&](const std::vector<std::string> &cells) {
                for (std::size_t c = 0; c < cells.size(); ++c)
                {
                    if (c == 0)
                        os << std::left << std::setw(static_cast<int>(w[c])) << cells[c];
                    else
                        os << "  " << std::right << std::setw(static_cast<int>(w[c])) << cells[c];
                }
                os << '\n';
            };
            line(header);
            std::size_t total = 0;
            for (auto x : w)
            {
                total += x + 2;
            }
            os << std::string(total - 2, '-') << '\n';
            for (const auto &r : rows)
            {
                line(r);
            }
        }

        void print_metrics_json(std::ostream &os, const Json &m)
        {
            std::vector<std::vector<std::string>> rows;
            for (const auto &s : m["stages"])
            {
                rows.push_back({s["name"].get<std::string>(), fixed(s["mean_ms"].get<double>()),
                                fixed(s["p50_ms"].get<double>()), fixed(s["p99_ms"].get<double>())});
            }
            const auto &e = m["end_to_end"];
            rows.push_back({"end_to_end", fixed(e["mean_ms"].get<double>()), fixed(e["p50_ms"].get<double>()),
                            fixed(e["p99_ms"].get<double>())});
            table(os, {"stage", "mean ms", "p50 ms", "p99 ms"}, rows);
            os << "visual latency: " << fixed(m["visual_latency_frames"].get<double>()) << " frames @60 FPS\n";
            const auto &f = m["frames"];
            os << "frames: encoded " << f["encoded"] << ", presented " << f["presented"] << ", dropped "
               << f["dropped"] << ", corrupted " << f["corrupted"] << ", skipped " << f["skipped"] << '\n';
            const auto &fb = m["feedback"];
            os << "I-frames: " << fb["iframes"] << " (" << fb["forced_iframes"] << " forced), requests sent "
               << fb["requests_sent"] << ", accepted " << fb["requests_accepted"] << ", suppressed "
               << fb["requests_suppressed"] << '\n';
            const auto &io = m["io"];
            os << "throughput: " << fixed(io["encoded_throughput_bps"].get<double>() / 1e6) << " Mbps, link utilization "
               << fixed(100.0 * io["link_utilization"].get<double>(), 2) << " %, copies/frame (encoded, send path) "
               << fixed(io["encoded_copies_per_frame"].get<double>(), 2) << '\n';
            const auto &t = m["sync"];
            os << "tick task: mean " << fixed(t["tick_task_mean_ms"].get<double>()) << " ms, max "
               << fixed(t["tick_task_max_ms"].get<double>()) << " ms, overruns " << t["tick_overruns"] << '\n';
            os << "digest: " << m["transcript_digest"].get<std::string>() << '\n';
        }

        void print_breakdown_json(std::ostream &os, const Json &rows)
        {
            std::vector<std::vector<std::string>> out;
            double share = 0.0;
            double ms = 0.0;
            for (const auto &r : rows)
            {
                out.push_back({r["stage"].get<std::string>(), fixed(r["ms"].get<double>()),
                               fixed(r["share_pct"].get<double>(), 1)});
                share += r["share_pct"].get<double>();
                ms += r["ms"].get<double>();
            }
            out.push_back({"total", fixed(ms), fixed(share, 1)});
            table(os, {"stage", "ms", "share %"}, out);
        }

        void print_ab_json(std::ostream &os, const Json &ab)
        {
            os << "toggle " << ab["toggle"].get<std::string>() << ": " << fixed(ab["off_total_ms"].get<double>())
               << " ms -> " << fixed(ab["on_total_ms"].get<double>()) << " ms\n";
            std::vector<std::vector<std::string>> rows;
            for (const auto &s : ab["stages"])
            {
                rows.push_back({s["stage"].get<std::string>(), fixed(s["off_ms"].get<double>()),
                                fixed(s["on_ms"].get<double>()), fixed(s["saved_ms"].get<double>())});
            }
            rows.push_back({"end_to_end", fixed(ab["off_total_ms"].get<double>()), fixed(ab["on_total_ms"].get<double>()),
                            fixed(ab["e2e_saved_ms"].get<double>())});
            table(os, {"stage", "off ms", "on ms", "saved ms"}, rows);
            os << "attributed saving: " << fixed(ab["attributed_ms"].get<double>()) << " ms\n";
            if (ab.contains("rgb_reference_ms"))
            {
                os << "network saving vs YUV two-hop reference: " << fixed(ab["rgb_reference_ms"].get<double>())
                   << " ms\n";
            }
        }

        void print_interaction_json(std::ostream &os, const Json &ir)
        {
            std::vector<std::vector<std::string>> rows;
            for (const auto &d : ir["deltas"])
            {
                rows.push_back({d["toggle"].get<std::string>(), fixed(d["saved_ms"].get<double>())});
            }
            table(os, {"toggle", "saved ms"}, rows);
            os << "baseline " << fixed(ir["baseline_ms"].get<double>()) << " ms - savings = "
               << fixed(ir["predicted_ms"].get<double>()) << " ms; all-on " << fixed(ir["all_on_ms"].get<double>())
               << " ms; interaction residual " << fixed(ir["residual_ms"].get<double>()) << " ms\n";
        }

        void print_sweep_json(std::ostream &os, const Json &sw)
        {
            std::vector<std::vector<std::string>> rows;
            for (const auto &p : sw["points"])
            {
                const auto &m = p["metrics"];
                rows.push_back({p["value"].get<std::string>(), fixed(m["end_to_end"]["mean_ms"].get<double>()),
                                fixed(m["end_to_end"]["p99_ms"].get<double>()),
                                fixed(m["frames"]["dropped_rate"].get<double>() * 100.0, 2),
                                fixed(m["frames"]["corrupted_rate"].get<double>() * 100.0, 2)});
            }
            table(os, {sw["key"].get<std::string>(), "e2e mean ms", "e2e p99 ms", "dropped %", "corrupted %"}, rows);
        }

        void print_runner_json(std::ostream &os, const Json &s)
        {
            os << "role " << s["role"].get<std::string>() << ": sent " << s["frames_sent"] << ", completed "
               << s["frames_completed"] << ", dropped " << s["frames_dropped"] << ", pattern mismatches "
               << s["pattern_mismatches"] << '\n';
            os << "I-frames sent " << s["iframes_sent"] << " (" << s["forced_iframes"] << " forced), requests sent "
               << s["requests_sent"] << ", received " << s["requests_received"] << ", accepted "
               << s["requests_accepted"] << '\n';
            os << "one-way latency (same-host clock): mean " << fixed(s["latency_mean_ms"].get<double>()) << " ms, p50 "
               << fixed(s["latency_p50_ms"].get<double>()) << " ms, p99 " << fixed(s["latency_p99_ms"].get<double>())
               << " ms\n";
        }
    } // namespace

    Json config_json(const pipeline::ScenarioConfig &cfg)
    {
        Json j = Json::object();
        for (const auto &[k, v] : emit_scenario(cfg))
        {
            j[k] = v;
        }
        return j;
    }

    Json metrics_json(const MetricsReport &r)
    {
        Json j;
        j["seed"] = r.seed;
        Json stages = Json::array();
        for (const auto &s : r.stages)
        {
            stages.push_back(stage_json(s));
        }
        j["stages"] = stages;
        j["end_to_end"] = stage_json(r.end_to_end);
        j["visual_latency_frames"] = r.visual_latency_frames;
        j["visual_latency_p99_frames"] = r.visual_latency_p99_frames;
        j["frames"] = {{"rendered", r.frames_rendered},   {"skipped", r.frames_skipped},
                       {"encoded", r.frames_encoded},     {"presented", r.frames_presented},
                       {"dropped", r.frames_dropped},     {"corrupted", r.frames_corrupted},
                       {"dropped_rate", r.dropped_rate},  {"corrupted_rate", r.corrupted_rate}};
        j["feedback"] = {{"iframes", r.iframes},
                         {"forced_iframes", r.forced_iframes},
                         {"requests_sent", r.requests_sent},
                         {"requests_accepted", r.requests_accepted},
                         {"requests_suppressed", r.requests_suppressed},
                         {"corrupted_intervals", r.corrupted_intervals}};
        j["io"] = {{"encoded_bytes", r.encoded_bytes},
                   {"encoded_throughput_bps", r.encoded_throughput_bps},
                   {"copied_bytes", r.copied_bytes},
                   {"copy_entries", r.copy_entries},
                   {"encoded_copies_per_frame", r.encoded_copies_per_frame},
                   {"link_utilization", r.link_utilization},
                   {"packets_sent", r.packets_sent},
                   {"packets_lost", r.packets_lost}};
        j["sync"] = {{"tick_task_mean_ms", r.tick_task_mean_ms},
                     {"tick_task_max_ms", r.tick_task_max_ms},
                     {"tick_overruns", r.tick_overruns}};
        j["decoder"] = {{"max_queue", r.decoder_max_queue},
                        {"queue_delay_mean_ms", r.decoder_queue_delay_mean_ms},
                        {"queue_delay_p99_ms", r.decoder_queue_delay_p99_ms}};
        j["transcript_digest"] = r.transcript_digest;
        return j;
    }

    Json breakdown_json(const std::vector<pipeline::BreakdownRow> &rows)
    {
        Json j = Json::array();
        for (const auto &r : rows)
        {
            j.push_back({{"stage", r.stage}, {"ms", r.ms}, {"share_pct", r.share_pct}});
        }
        return j;
    }

    Json ab_json(const pipeline::AbReport &ab)
    {
        Json j;
        j["toggle"] = ab.toggle;
        j["off_total_ms"] = ab.off_total_ms;
        j["on_total_ms"] = ab.on_total_ms;
        j["e2e_saved_ms"] = ab.e2e_saved_ms;
        j["attributed_ms"] = ab.attributed_ms;
        if (ab.rgb_reference_ms)
        {
            j["rgb_reference_ms"] = *ab.rgb_reference_ms;
        }
        Json stages = Json::array();
        for (const auto &s : ab.stages)
        {
            stages.push_back({{"stage", s.stage}, {"off_ms", s.off_ms}, {"on_ms", s.on_ms}, {"saved_ms", s.saved_ms}});
        }
        j["stages"] = stages;
        return j;
    }

    Json interaction_json(const pipeline::InteractionReport &ir)
    {
        Json deltas = Json::array();
        for (const auto &[name, d] : ir.deltas)
        {
            deltas.push_back({{"toggle", name}, {"saved_ms", d}});
        }
        return {{"baseline_ms", ir.baseline_ms}, {"all_on_ms", ir.all_on_ms},   {"deltas", deltas},
                {"predicted_ms", ir.predicted_ms}, {"residual_ms", ir.residual_ms}};
    }

    Json runner_json(const runner::RunnerStats &s)
    {
        return {{"role", runner::to_string(s.role)},
                {"frames_sent", s.frames_sent},
                {"frames_completed", s.frames_completed},
                {"frames_dropped", s.frames_dropped},
                {"pattern_mismatches", s.pattern_mismatches},
                {"iframes_sent", s.iframes_sent},
                {"forced_iframes", s.forced_iframes},
                {"requests_sent", s.requests_sent},
                {"requests_received", s.requests_received},
                {"requests_accepted", s.requests_accepted},
                {"datagrams_sent", s.datagrams_sent},
                {"datagrams_received", s.datagrams_received},
                {"datagrams_rejected", s.datagrams_rejected},
                {"datagrams_shim_dropped", s.datagrams_shim_dropped},
                {"latency_mean_ms", s.latency_mean_ms},
                {"latency_p50_ms", s.latency_p50_ms},
                {"latency_p99_ms", s.latency_p99_ms}};
    }

    namespace
    {
        Json resolved_json(const pipeline::ScenarioConfig &cfg)
        {
            return {{"gop_size", cfg.resolved_gop_size()},
                    {"drop_deadline_us", cfg.resolved_drop_deadline_us()},
                    {"topology", netsim::to_string(cfg.channel_model().topology)},
                    {"color_space", std::string(to_string(cfg.codec_config().color_space))},
                    {"encode_fps", cfg.encode_fps()}};
        }

        Json header(const char *kind)
        {
            Json j;
            j["schema_version"] = kSchemaVersion;
            j["kind"] = kind;
            return j;
        }

        Json metadata(double wall_seconds) { return {{"wall_clock_seconds", wall_seconds}}; }
    } // namespace

    Json run_report(const MetricsReport &r, double wall_seconds)
    {
        Json j = header("sim-run");
        j["config"] = config_json(r.config);
        j["resolved"] = resolved_json(r.config);
        j["metrics"] = metrics_json(r);
        j["stage_breakdown"] = breakdown_json(pipeline::stage_breakdown(r));
        j["metadata"] = metadata(wall_seconds);
        return j;
    }

    Json ab_report(const pipeline::AbReport &ab, const std::optional<pipeline::InteractionReport> &ir,
                   double wall_seconds)
    {
        Json j = header("sim-ab");
        j["config"] = config_json(ab.off.config);
        j["resolved"] = resolved_json(ab.off.config);
        j["ab"] = ab_json(ab);
        if (ir)
        {
            j["interaction"] = interaction_json(*ir);
        }
        j["off"] = {{"metrics", metrics_json(ab.off)}, {"stage_breakdown", breakdown_json(pipeline::stage_breakdown(ab.off))}};
        j["on"] = {{"metrics", metrics_json(ab.on)}, {"stage_breakdown", breakdown_json(pipeline::stage_breakdown(ab.on))}};
        j["metadata"] = metadata(wall_seconds);
        return j;
    }

    Json sweep_report(const pipeline::ScenarioConfig &base, std::string_view key,
                      const std::vector<pipeline::SweepPoint> &points, double wall_seconds)
    {
        Json j = header("sim-sweep");
        j["config"] = config_json(base);
        j["key"] = std::string(key);
        Json pts = Json::array();
        for (const auto &p : points)
        {
            pts.push_back({{"value", p.value},
                           {"metrics", metrics_json(p.report)},
                           {"stage_breakdown", breakdown_json(pipeline::stage_breakdown(p.report))}});
        }
        j["points"] = pts;
        j["metadata"] = metadata(wall_seconds);
        return j;
    }

    Json runner_report(const runner::RunnerConfig &cfg, const runner::RunnerStats &s)
    {
        Json j = header(s.role == runner::Role::Host ? "net-host" : "net-mud");
        j["config"] = {{"bind", cfg.bind_address + ":" + std::to_string(cfg.bind_port)},
                       {"peer", cfg.peer_address + ":" + std::to_string(cfg.peer_port)},
                       {"codec.bitrate_bps", cfg.codec.bitrate_bps},
                       {"codec.fps", cfg.codec.fps},
                       {"codec.gop_size", cfg.codec.gop_size},
                       {"toggles.feedback_control", cfg.feedback_control},
                       {"duration_s", cfg.duration_s},
                       {"seed", cfg.seed},
                       {"induced_loss", cfg.induced_loss}};
        j["runner"] = runner_json(s);
        j["events"] = s.events;
        j["metadata"] = metadata(s.wall_seconds);
        return j;
    }

    Json deterministic_part(Json report)
    {
        report.erase("metadata");
        return report;
    }

    void print_metrics(std::ostream &os, const MetricsReport &r) { print_metrics_json(os, metrics_json(r)); }

    void print_breakdown(std::ostream &os, const std::vector<pipeline::BreakdownRow> &rows)
    {
        print_breakdown_json(os, breakdown_json(rows));
    }

    void print_ab(std::ostream &os, const pipeline::AbReport &ab) { print_ab_json(os, ab_json(ab)); }

    void print_interaction(std::ostream &os, const pipeline::InteractionReport &ir)
    {
        print_interaction_json(os, interaction_json(ir));
    }

    void print_sweep(std::ostream &os, std::string_view key, const std::vector<pipeline::SweepPoint> &points)
    {
        print_sweep_json(os, sweep_report({}, key, points, 0.0));
    }

    void print_runner(std::ostream &os, const runner::RunnerStats &s) { print_runner_json(os, runner_json(s)); }

    void print_report(std::ostream &os, const Json &report)
    {
        if (!report.contains("schema_version") || report["schema_version"] != kSchemaVersion)
        {
            throw std::runtime_error("unsupported report schema version");
        }
        const auto kind = report.value("kind", std::string{});
        if (kind == "sim-run")
        {
            print_metrics_json(os, report["metrics"]);
            os << '\n';
            print_breakdown_json(os, report["stage_breakdown"]);
        }
        else if (kind == "sim-ab")
        {
            print_ab_json(os, report["ab"]);
            if (report.contains("interaction"))
            {
                os << '\n';
                print_interaction_json(os, report["interaction"]);
            }
        }
        else if (kind == "sim-sweep")
        {
            print_sweep_json(os, report);
        }
        else if (kind == "net-host" || kind == "net-mud")
        {
            print_runner_json(os, report["runner"]);
        }
        else
        {
            throw std::runtime_error("unknown report kind '" + kind + "'");
        }
    }
} // namespace uvr::cli
