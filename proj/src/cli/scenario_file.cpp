#include "uvr/cli/scenario_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace uvr::cli
{
    using pipeline::ScenarioConfig;

    namespace
    {
        [[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view expected)
        {
            throw codec::ConfigError(std::string(key) + ": expected " + std::string(expected) + ", got '" +
                                     std::string(value) + "'");
        }

        template <typename Int>
        Int parse_int(std::string_view key, std::string_view v)
        {
            Int out{};
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (ec != std::errc{} || p != v.data() + v.size())
            {
                bad(key, v, "an integer");
            }
            return out;
        }

        double parse_double(std::string_view key, std::string_view v)
        {
            double out = 0.0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (ec != std::errc{} || p != v.data() + v.size())
            {
                bad(key, v, "a number");
            }
            return out;
        }

        bool parse_bool(std::string_view key, std::string_view v)
        {
            if (v == "true" || v == "1" || v == "on" || v == "yes")
                return true;
            if (v == "false" || v == "0" || v == "off" || v == "no")
                return false;
            bad(key, v, "a boolean");
        }

        std::string fmt(double d)
        {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
            return std::string(buf, p);
        }
        std::string fmt(bool b) { return b ? "true" : "false"; }

        struct KeySpec
        {
            std::string_view name;
            std::function<void(ScenarioConfig &, std::string_view, std::string_view)> set;
            std::function<std::string(const ScenarioConfig &)> get;
        };

        template <typename T, typename F>
        KeySpec int_key(std::string_view name, F field)
        {
            return {name,
                    [field](ScenarioConfig &c, std::string_view k, std::string_view v) {
                        field(c) = parse_int<T>(k, v);
                    },
                    [field](const ScenarioConfig &c) {
                        return std::to_string(field(const_cast<ScenarioConfig &>(c)));
                    }};
        }

        template <typename F>
        KeySpec double_key(std::string_view name, F field)
        {
            return {name,
                    [field](ScenarioConfig &c, std::string_view k, std::string_view v) { field(c) = parse_double(k, v); },
                    [field](const ScenarioConfig &c) { return fmt(field(const_cast<ScenarioConfig &>(c))); }};
        }

        template <typename F>
        KeySpec bool_key(std::string_view name, F field)
        {
            return {name,
                    [field](ScenarioConfig &c, std::string_view k, std::string_view v) { field(c) = parse_bool(k, v); },
                    [field](const ScenarioConfig &c) { return fmt(field(const_cast<ScenarioConfig &>(c))); }};
        }

        const char *loss_name(netsim::LossKind k)
        {
            switch (k)
            {
            case netsim::LossKind::None:
                return "none";
            case netsim::LossKind::Bernoulli:
                return "bernoulli";
            case netsim::LossKind::GilbertElliott:
                return "gilbert_elliott";
            }
            return "none";
        }

        std::vector<KeySpec> build_specs()
        {
            std::vector<KeySpec> s;
            s.push_back(int_key<std::uint64_t>("seed", [](ScenarioConfig &c) -> auto & { return c.seed; }));
            s.push_back(double_key("duration_s", [](ScenarioConfig &c) -> auto & { return c.duration_s; }));
            s.push_back(int_key<std::int32_t>("render_fps", [](ScenarioConfig &c) -> auto & { return c.workload.render_fps; }));
            s.push_back({"encode_mode",
                         [](ScenarioConfig &c, std::string_view k, std::string_view v) {
                             if (v == "sync")
                                 c.encode_mode = pipeline::EncodeMode::Sync;
                             else if (v == "async")
                                 c.encode_mode = pipeline::EncodeMode::Async;
                             else
                                 bad(k, v, "sync or async");
                         },
                         [](const ScenarioConfig &c) { return std::string(pipeline::to_string(c.encode_mode)); }});
            s.push_back(int_key<std::int64_t>("render_work_us", [](ScenarioConfig &c) -> auto & { return c.render_work_us; }));

            s.push_back(int_key<std::int64_t>("codec.bitrate_bps", [](ScenarioConfig &c) -> auto & { return c.bitrate_bps; }));
            s.push_back(int_key<std::int32_t>("codec.fps", [](ScenarioConfig &c) -> auto & { return c.codec_fps; }));
            s.push_back({"codec.gop_size",
                         [](ScenarioConfig &c, std::string_view k, std::string_view v) {
                             if (v == "auto")
                             {
                                 c.gop_size = 0;
                                 return;
                             }
                             const auto g = parse_int<std::int32_t>(k, v);
                             if (g < 1)
                             {
                                 throw codec::ConfigError(std::string(k) + ": must be >= 1 (or 'auto'), got " +
                                                          std::string(v));
                             }
                             c.gop_size = g;
                         },
                         [](const ScenarioConfig &c) {
                             return c.gop_size == 0 ? std::string("auto") : std::to_string(c.gop_size);
                         }});
            s.push_back({"codec.p_to_i_ratio",
                         [](ScenarioConfig &c, std::string_view k, std::string_view v) {
                             const auto slash = v.find('/');
                             if (slash == std::string_view::npos)
                             {
                                 bad(k, v, "a fraction like 1/4");
                             }
                             c.p_to_i_ratio = {parse_int<std::int64_t>(k, v.substr(0, slash)),
                                               parse_int<std::int64_t>(k, v.substr(slash + 1))};
                         },
                         [](const ScenarioConfig &c) {
                             return std::to_string(c.p_to_i_ratio.num) + "/" + std::to_string(c.p_to_i_ratio.den);
                         }});
            s.push_back(double_key("codec.rgb_inflation", [](ScenarioConfig &c) -> auto & { return c.rgb_inflation; }));

            s.push_back(int_key<std::int32_t>("workload.width", [](ScenarioConfig &c) -> auto & { return c.workload.width; }));
            s.push_back(int_key<std::int32_t>("workload.height", [](ScenarioConfig &c) -> auto & { return c.workload.height; }));
            s.push_back(double_key("workload.complexity_sigma",
                                   [](ScenarioConfig &c) -> auto & { return c.workload.complexity_sigma; }));

            s.push_back(int_key<std::int32_t>("decoder.fps_cap", [](ScenarioConfig &c) -> auto & { return c.decode_fps_cap; }));
            s.push_back(int_key<std::int32_t>("decoder.burst_frames",
                                              [](ScenarioConfig &c) -> auto & { return c.decode_burst_frames; }));

            s.push_back(bool_key("toggles.transcode_avoidance",
                                 [](ScenarioConfig &c) -> auto & { return c.toggles.transcode_avoidance; }));
            s.push_back(bool_key("toggles.shared_gpu_buffer",
                                 [](ScenarioConfig &c) -> auto & { return c.toggles.shared_gpu_buffer; }));
            s.push_back(bool_key("toggles.direct_net_io", [](ScenarioConfig &c) -> auto & { return c.toggles.direct_net_io; }));
            s.push_back(bool_key("toggles.p2p_topology", [](ScenarioConfig &c) -> auto & { return c.toggles.p2p_topology; }));
            s.push_back(bool_key("toggles.feedback_control",
                                 [](ScenarioConfig &c) -> auto & { return c.toggles.feedback_control; }));

            s.push_back(int_key<std::int64_t>("channel.bandwidth_bps",
                                              [](ScenarioConfig &c) -> auto & { return c.channel.bandwidth_bps; }));
            s.push_back(int_key<std::int64_t>("channel.prop_delay_us",
                                              [](ScenarioConfig &c) -> auto & { return c.channel.prop_delay_us; }));
            s.push_back(double_key("channel.jitter_sigma_us", [](ScenarioConfig &c) -> auto & { return c.channel.jitter_sigma_us; }));
            s.push_back({"channel.loss",
                         [](ScenarioConfig &c, std::string_view k, std::string_view v) {
                             if (v == "none")
                                 c.channel.loss.kind = netsim::LossKind::None;
                             else if (v == "bernoulli")
                                 c.channel.loss.kind = netsim::LossKind::Bernoulli;
                             else if (v == "gilbert_elliott")
                                 c.channel.loss.kind = netsim::LossKind::GilbertElliott;
                             else
                                 bad(k, v, "none, bernoulli or gilbert_elliott");
                         },
                         [](const ScenarioConfig &c) { return std::string(loss_name(c.channel.loss.kind)); }});
            s.push_back(double_key("channel.loss_p", [](ScenarioConfig &c) -> auto & { return c.channel.loss.p; }));
            s.push_back(double_key("channel.ge_p_good_to_bad",
                                   [](ScenarioConfig &c) -> auto & { return c.channel.loss.p_good_to_bad; }));
            s.push_back(double_key("channel.ge_p_bad_to_good",
                                   [](ScenarioConfig &c) -> auto & { return c.channel.loss.p_bad_to_good; }));
            s.push_back(double_key("channel.ge_loss_good", [](ScenarioConfig &c) -> auto & { return c.channel.loss.loss_good; }));
            s.push_back(double_key("channel.ge_loss_bad", [](ScenarioConfig &c) -> auto & { return c.channel.loss.loss_bad; }));

#define UVR_STAGE_KEY(field) \
    s.push_back(int_key<std::int64_t>("stages." #field, [](ScenarioConfig &c) -> auto & { return c.stages.field; }))
            UVR_STAGE_KEY(host_capture_us);
            UVR_STAGE_KEY(host_transcode_us);
            UVR_STAGE_KEY(host_upload_us);
            UVR_STAGE_KEY(host_encode_us);
            UVR_STAGE_KEY(host_download_us);
            UVR_STAGE_KEY(host_netstack_us);
            UVR_STAGE_KEY(host_dpp_send_us);
            UVR_STAGE_KEY(iframe_send_extra_us);
            UVR_STAGE_KEY(net_frame_overhead_us);
            UVR_STAGE_KEY(mud_netstack_us);
            UVR_STAGE_KEY(mud_decode_us);
            UVR_STAGE_KEY(residual_presentation_us);
#undef UVR_STAGE_KEY

            s.push_back({"protocol.drop_deadline_us",
                         [](ScenarioConfig &c, std::string_view k, std::string_view v) {
                             c.drop_deadline_us = v == "auto" ? 0 : parse_int<std::int64_t>(k, v);
                         },
                         [](const ScenarioConfig &c) {
                             return c.drop_deadline_us == 0 ? std::string("auto") : std::to_string(c.drop_deadline_us);
                         }});
            s.push_back(int_key<std::int64_t>("protocol.suppression_window_us",
                                              [](ScenarioConfig &c) -> auto & { return c.suppression_window_us; }));
            s.push_back(int_key<std::uint32_t>("fault.inject_drop_frame",
                                               [](ScenarioConfig &c) -> auto & { return c.inject_drop_frame; }));
            s.push_back(bool_key("trace", [](ScenarioConfig &c) -> auto & { return c.trace; }));
            return s;
        }

        const std::vector<KeySpec> &specs()
        {
            static const std::vector<KeySpec> s = build_specs();
            return s;
        }

        std::string_view trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
            {
                return {};
            }
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }
    } // namespace

    void apply_key(ScenarioConfig &cfg, std::string_view key, std::string_view value)
    {
        for (const auto &s : specs())
        {
            if (s.name == key)
            {
                s.set(cfg, key, value);
                return;
            }
        }
        throw codec::ConfigError("unknown key '" + std::string(key) + "'");
    }

    const std::vector<std::string_view> &scenario_keys()
    {
        static const std::vector<std::string_view> keys = [] {
            std::vector<std::string_view> k;
            for (const auto &s : specs())
            {
                k.push_back(s.name);
            }
            return k;
        }();
        return keys;
    }

    std::vector<std::pair<std::string, std::string>> emit_scenario(const ScenarioConfig &cfg)
    {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto &s : specs())
        {
            out.emplace_back(std::string(s.name), s.get(cfg));
        }
        return out;
    }

    std::string emit_scenario_text(const ScenarioConfig &cfg)
    {
        std::string text;
        for (const auto &[k, v] : emit_scenario(cfg))
        {
            text += k + " = " + v + "\n";
        }
        return text;
    }

    std::string to_string(const ParseError &e)
    {
        return e.line > 0 ? "line " + std::to_string(e.line) + ": " + e.message : e.message;
    }

    ParseResult parse_scenario_text(std::string_view text)
    {
        struct Line
        {
            int number;
            std::string_view key;
            std::string_view value;
        };
        std::vector<Line> lines;
        std::vector<ParseError> errors;

        int number = 0;
        while (!text.empty())
        {
            ++number;
            const auto nl = text.find('\n');
            std::string_view raw = text.substr(0, nl);
            text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
            if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            {
                raw = raw.substr(0, hash);
            }
            raw = trim(raw);
            if (raw.empty())
            {
                continue;
            }
            const auto eq = raw.find('=');
            if (eq == std::string_view::npos)
            {
                errors.push_back({number, "expected 'key = value'"});
                continue;
            }
            const auto key = trim(raw.substr(0, eq));
            const auto value = trim(raw.substr(eq + 1));
            if (key.empty() || value.empty())
            {
                errors.push_back({number, "expected 'key = value'"});
                continue;
            }
            lines.push_back({number, key, value});
        }

        ScenarioConfig cfg;
        for (const auto &l : lines)
        {
            if (l.key != "preset")
            {
                continue;
            }
            if (auto p = pipeline::preset(l.value))
            {
                cfg = *p;
            }
            else
            {
                errors.push_back({l.number, "preset: unknown preset '" + std::string(l.value) + "'"});
            }
        }

        std::map<std::string, int, std::less<>> key_line;
        for (const auto &l : lines)
        {
            if (l.key == "preset")
            {
                continue;
            }
            if (auto [it, fresh] = key_line.emplace(std::string(l.key), l.number); !fresh)
            {
                errors.push_back({l.number, std::string(l.key) + ": duplicate key (first set on line " +
                                                std::to_string(it->second) + ")"});
                continue;
            }
            try
            {
                apply_key(cfg, l.key, l.value);
            }
            catch (const codec::ConfigError &e)
            {
                errors.push_back({l.number, e.what()});
            }
        }

        // Keys that failed to parse keep their previous value, so this only adds
        // violations of values that were accepted.
        for (const auto &msg : cfg.validate())
        {
            const auto key = msg.substr(0, msg.find(':'));
            const auto it = key_line.find(key);
            errors.push_back({it == key_line.end() ? 0 : it->second, msg});
        }
        if (!errors.empty())
        {
            std::stable_sort(errors.begin(), errors.end(),
                             [](const ParseError &a, const ParseError &b) { return a.line < b.line; });
            return errors;
        }
        return cfg;
    }

    ParseResult parse_scenario_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            return std::vector<ParseError>{{0, "cannot read scenario file '" + path + "'"}};
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_scenario_text(ss.str());
    }
} // namespace uvr::cli
