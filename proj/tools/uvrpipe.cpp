// uvrpipe: wireless VR streaming pipeline simulator and loopback runner.
//
//   uvrpipe sim run    [--preset NAME | --scenario FILE] [--seed N] [--out r.json] [--trace t.csv]
//   uvrpipe sim ab     --toggle NAME [--interaction] ...
//   uvrpipe sim sweep  --key KEY --values a,b,c [--jobs N] ...
//   uvrpipe net host   [--bind ADDR:PORT] [--duration S] ...
//   uvrpipe net mud    [--peer ADDR:PORT] [--induced-loss P] ...
//   uvrpipe report show FILE
//
// Exit status: 0 success, 1 invalid configuration, 2 runtime failure.

#include "uvr/cli/report.hpp"
#include "uvr/cli/scenario_file.hpp"
#include "uvr/pipeline/analysis.hpp"
#include "uvr/runner/runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace uvr;

    constexpr int kExitOk = 0;
    constexpr int kExitInvalid = 1;
    constexpr int kExitRuntime = 2;

    struct InvalidConfig
    {
        std::vector<std::string> messages;
    };

    struct ScenarioOptions
    {
        std::string preset;
        std::string scenario;
        std::vector<std::string> sets;
        std::optional<std::uint64_t> seed;
        std::string out;
        bool quiet = false;
    };

    void add_scenario_options(CLI::App *cmd, ScenarioOptions &o)
    {
        cmd->add_option("--preset", o.preset, "Start from a named preset (baseline, openuvr, openuvr-async, gtx1060)");
        cmd->add_option("--scenario", o.scenario, "Scenario file (flat key = value lines)");
        cmd->add_option("--set", o.sets, "Override one key, e.g. --set codec.gop_size=480");
        cmd->add_option("--seed", o.seed, "Seed; overrides UVRPIPE_SEED and the scenario file");
        cmd->add_option("--out", o.out, "Write the JSON report here");
        cmd->add_flag("--quiet", o.quiet, "Suppress the table output");
    }

    /// Precedence: --seed, then UVRPIPE_SEED, then the file (or preset default).
    pipeline::ScenarioConfig load_scenario(const ScenarioOptions &o)
    {
        pipeline::ScenarioConfig cfg;
        if (!o.scenario.empty())
        {
            auto parsed = cli::parse_scenario_file(o.scenario);
            if (auto *errs = std::get_if<std::vector<cli::ParseError>>(&parsed))
            {
                InvalidConfig bad;
                for (const auto &e : *errs)
                {
                    bad.messages.push_back(o.scenario + ": " + cli::to_string(e));
                }
                throw bad;
            }
            cfg = std::get<pipeline::ScenarioConfig>(parsed);
            if (!o.preset.empty())
            {
                throw InvalidConfig{{"--preset and --scenario are exclusive (use 'preset = NAME' in the file)"}};
            }
        }
        else if (!o.preset.empty())
        {
            auto p = pipeline::preset(o.preset);
            if (!p)
            {
                throw InvalidConfig{{"unknown preset '" + o.preset + "'"}};
            }
            cfg = *p;
        }

        InvalidConfig bad;
        for (const auto &s : o.sets)
        {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
            {
                bad.messages.push_back("--set " + s + ": expected key=value");
                continue;
            }
            try
            {
                cli::apply_key(cfg, s.substr(0, eq), s.substr(eq + 1));
            }
            catch (const codec::ConfigError &e)
            {
                bad.messages.push_back(std::string("--set: ") + e.what());
            }
        }
        if (const char *env = std::getenv("UVRPIPE_SEED"))
        {
            try
            {
                cli::apply_key(cfg, "seed", env);
            }
            catch (const codec::ConfigError &e)
            {
                bad.messages.push_back(std::string("UVRPIPE_SEED: ") + e.what());
            }
        }
        if (o.seed)
        {
            cfg.seed = *o.seed;
        }
        for (const auto &m : cfg.validate())
        {
            bad.messages.push_back(m);
        }
        if (!bad.messages.empty())
        {
            throw bad;
        }
        return cfg;
    }

    void write_json(const std::string &path, const cli::Json &j)
    {
        if (path.empty())
        {
            return;
        }
        std::ofstream out(path);
        if (!out)
        {
            throw std::runtime_error("cannot write '" + path + "'");
        }
        out << j.dump(2) << '\n';
    }

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::pair<std::string, std::uint16_t> split_endpoint(const std::string &s, std::uint16_t default_port)
    {
        const auto colon = s.rfind(':');
        if (colon == std::string::npos)
        {
            return {s, default_port};
        }
        return {s.substr(0, colon), static_cast<std::uint16_t>(std::stoul(s.substr(colon + 1)))};
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Wireless VR streaming pipeline simulator"};
    app.require_subcommand(1);

    auto *sim = app.add_subcommand("sim", "Discrete-event simulation")->require_subcommand(1);

    ScenarioOptions run_opts;
    std::string trace_path;
    auto *run = sim->add_subcommand("run", "Simulate one scenario");
    add_scenario_options(run, run_opts);
    run->add_option("--trace", trace_path, "Write the per-frame trace (CSV lines)");

    ScenarioOptions ab_opts;
    std::string toggle;
    bool with_interaction = false;
    auto *ab = sim->add_subcommand("ab", "Compare a scenario with one optimization off and on");
    add_scenario_options(ab, ab_opts);
    ab->add_option("--toggle", toggle, "Optimization to flip")->required();
    ab->add_flag("--interaction", with_interaction, "Also report the interaction residual of all optimizations");

    ScenarioOptions sweep_opts;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    unsigned jobs = 0;
    auto *sweep = sim->add_subcommand("sweep", "Run one scenario per value of a key");
    add_scenario_options(sweep, sweep_opts);
    sweep->add_option("--key", sweep_key, "Dotted scenario key")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--jobs", jobs, "Parallel scenarios (0 = all cores)");

    auto *net = app.add_subcommand("net", "Real UDP transport between two processes")->require_subcommand(1);
    runner::RunnerConfig net_cfg;
    // Host listens on the default port; the MUD binds the next one so both fit on one machine.
    std::string bind;
    std::string peer = "127.0.0.1:" + std::to_string(runner::kDefaultPort);
    std::string net_out;
    bool no_feedback = false;
    auto add_net_options = [&](CLI::App *cmd) {
        cmd->add_option("--bind", bind, "Local ADDR:PORT");
        cmd->add_option("--duration", net_cfg.duration_s, "Seconds of streaming");
        cmd->add_option("--bitrate", net_cfg.codec.bitrate_bps, "Encoder bitrate (bps)");
        cmd->add_option("--fps", net_cfg.codec.fps, "Frame rate");
        cmd->add_option("--gop", net_cfg.codec.gop_size, "GOP size");
        cmd->add_option("--seed", net_cfg.seed, "Seed");
        cmd->add_flag("--no-feedback", no_feedback, "Disable I-frame requests");
        cmd->add_option("--out", net_out, "Write the JSON stats report here");
    };
    auto *host = net->add_subcommand("host", "Send frames to a MUD");
    add_net_options(host);
    auto *mud = net->add_subcommand("mud", "Receive frames from a host");
    add_net_options(mud);
    mud->add_option("--peer", peer, "Host ADDR:PORT");
    mud->add_option("--induced-loss", net_cfg.induced_loss, "Fraction of DATA datagrams discarded on receipt");

    auto *report = app.add_subcommand("report", "Inspect reports")->require_subcommand(1);
    std::string report_file;
    auto *show = report->add_subcommand("show", "Print a saved report as tables");
    show->add_option("file", report_file, "Report JSON")->required();

    net_cfg.codec.gop_size = pipeline::kGopWithFeedback;

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try
    {
        const auto t0 = std::chrono::steady_clock::now();
        if (run->parsed())
        {
            auto cfg = load_scenario(run_opts);
            if (!trace_path.empty())
            {
                cfg.trace = true;
            }
            const auto result = pipeline::run_scenario(cfg);
            if (!run_opts.quiet)
            {
                cli::print_metrics(std::cout, result.report);
                std::cout << '\n';
                cli::print_breakdown(std::cout, pipeline::stage_breakdown(result.report));
            }
            write_json(run_opts.out, cli::run_report(result.report, seconds_since(t0)));
            if (!trace_path.empty())
            {
                std::ofstream tr(trace_path);
                if (!tr)
                {
                    throw std::runtime_error("cannot write '" + trace_path + "'");
                }
                pipeline::write_trace(tr, result.trace);
            }
        }
        else if (ab->parsed())
        {
            const auto cfg = load_scenario(ab_opts);
            const auto cmp = pipeline::ab_compare(cfg, toggle);
            std::optional<pipeline::InteractionReport> ir;
            if (with_interaction)
            {
                ir = pipeline::interaction_residual(cfg);
            }
            if (!ab_opts.quiet)
            {
                cli::print_ab(std::cout, cmp);
                if (ir)
                {
                    std::cout << '\n';
                    cli::print_interaction(std::cout, *ir);
                }
            }
            write_json(ab_opts.out, cli::ab_report(cmp, ir, seconds_since(t0)));
        }
        else if (sweep->parsed())
        {
            const auto cfg = load_scenario(sweep_opts);
            const auto points = pipeline::sweep(cfg, sweep_key, sweep_values, &cli::apply_key, jobs);
            if (!sweep_opts.quiet)
            {
                cli::print_sweep(std::cout, sweep_key, points);
            }
            write_json(sweep_opts.out, cli::sweep_report(cfg, sweep_key, points, seconds_since(t0)));
        }
        else if (host->parsed() || mud->parsed())
        {
            net_cfg.role = host->parsed() ? runner::Role::Host : runner::Role::Mud;
            net_cfg.feedback_control = !no_feedback;
            if (bind.empty())
            {
                const int port = runner::kDefaultPort + (net_cfg.role == runner::Role::Host ? 0 : 1);
                bind = "0.0.0.0:" + std::to_string(port);
            }
            std::tie(net_cfg.bind_address, net_cfg.bind_port) = split_endpoint(bind, runner::kDefaultPort);
            std::tie(net_cfg.peer_address, net_cfg.peer_port) = split_endpoint(peer, runner::kDefaultPort);
            if (const auto errs = net_cfg.validate(); !errs.empty())
            {
                throw InvalidConfig{errs};
            }
            auto sink = [](const std::string &line) { std::cerr << line << '\n'; };
            const auto stats = net_cfg.role == runner::Role::Host ? runner::host_run(net_cfg, nullptr, sink)
                                                                  : runner::mud_run(net_cfg, nullptr, sink);
            cli::print_runner(std::cout, stats);
            write_json(net_out, cli::runner_report(net_cfg, stats));
        }
        else if (show->parsed())
        {
            std::ifstream in(report_file);
            if (!in)
            {
                throw std::runtime_error("cannot read '" + report_file + "'");
            }
            cli::print_report(std::cout, cli::Json::parse(in));
        }
    }
    catch (const InvalidConfig &e)
    {
        for (const auto &m : e.messages)
        {
            std::cerr << "error: " << m << '\n';
        }
        return kExitInvalid;
    }
    catch (const codec::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    catch (const pipeline::UnknownToggle &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
