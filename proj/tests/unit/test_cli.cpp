#include "uvr/cli/report.hpp"
#include "uvr/cli/scenario_file.hpp"
#include "uvr/pipeline/analysis.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace uvr;
using namespace uvr::cli;
namespace fs = std::filesystem;

namespace
{
    std::vector<ParseError> errors_of(std::string_view text)
    {
        auto r = parse_scenario_text(text);
        if (auto *e = std::get_if<std::vector<ParseError>>(&r))
        {
            return *e;
        }
        return {};
    }

    pipeline::ScenarioConfig config_of(std::string_view text)
    {
        auto r = parse_scenario_text(text);
        if (auto *e = std::get_if<std::vector<ParseError>>(&r))
        {
            ADD_FAILURE() << to_string(e->front());
            return {};
        }
        return std::get<pipeline::ScenarioConfig>(r);
    }

    fs::path scratch(const std::string &name)
    {
        const auto dir = fs::temp_directory_path() / ("uvrpipe-test-" + std::to_string(::getpid()));
        fs::create_directories(dir);
        return dir / name;
    }

    int run_cli(const std::string &args, std::string *out = nullptr)
    {
        const auto log = scratch("stdout.txt");
        const std::string cmd = std::string(UVRPIPE_BIN) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        if (out)
        {
            std::ifstream in(log);
            std::stringstream ss;
            ss << in.rdbuf();
            *out = ss.str();
        }
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    Json read_json(const fs::path &p)
    {
        std::ifstream in(p);
        return Json::parse(in);
    }
} // namespace

TEST(ScenarioFile, EveryPresetRoundTrips)
{
    for (auto name : pipeline::preset_names())
    {
        auto cfg = *pipeline::preset(name);
        const auto text = emit_scenario_text(cfg);
        EXPECT_EQ(config_of(text), cfg) << name;
        EXPECT_EQ(emit_scenario_text(config_of(text)), text) << name;
    }
}

TEST(ScenarioFile, RoundTripsEditedValues)
{
    auto cfg = *pipeline::preset("openuvr");
    cfg.seed = 18'446'744'073'709'551'615ULL;
    cfg.rgb_inflation = 0.1 + 0.2;
    cfg.channel.loss.kind = netsim::LossKind::GilbertElliott;
    cfg.channel.loss.p_good_to_bad = 1.0 / 3.0;
    cfg.p_to_i_ratio = {2, 7};
    cfg.gop_size = 37;
    cfg.drop_deadline_us = 12'345;
    cfg.inject_drop_frame = 99;
    EXPECT_EQ(config_of(emit_scenario_text(cfg)), cfg);
}

TEST(ScenarioFile, PresetAppliesFirstWhereverItAppears)
{
    const auto cfg = config_of("codec.gop_size = 60\n# comment\n\npreset = openuvr\n");
    EXPECT_EQ(cfg.gop_size, 60);
    EXPECT_TRUE(cfg.toggles.direct_net_io);
}

TEST(ScenarioFile, GopZeroNamesTheKey)
{
    const auto errs = errors_of("codec.gop_size = 0\n");
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].line, 1);
    EXPECT_NE(errs[0].message.find("codec.gop_size"), std::string::npos);
    EXPECT_EQ(config_of("codec.gop_size = auto\n").gop_size, 0);
}

TEST(ScenarioFile, CollectsAllErrorsWithLineNumbers)
{
    const auto errs = errors_of("seed = 1\n"
                                "bogus = 1\n"
                                "codec.fps = sixty\n"
                                "channel.loss_p = 2\n"
                                "seed = 2\n"
                                "no equals sign\n"
                                "preset = unknown\n");
    ASSERT_EQ(errs.size(), 6u);
    std::vector<int> lines;
    for (const auto &e : errs)
    {
        lines.push_back(e.line);
    }
    EXPECT_EQ(lines, (std::vector<int>{2, 3, 4, 5, 6, 7}));
    EXPECT_NE(errs[0].message.find("bogus"), std::string::npos);
    EXPECT_NE(errs[2].message.find("channel.loss_p"), std::string::npos);
    EXPECT_EQ(to_string(errs[0]).rfind("line 2", 0), 0u) << to_string(errs[0]);
}

TEST(ScenarioFile, ErrorsAreDeterministic)
{
    const std::string text = "codec.fps = 0\ntoggles.p2p_topology = maybe\n";
    const auto a = errors_of(text);
    const auto b = errors_of(text);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(to_string(a[i]), to_string(b[i]));
    }
}

TEST(ScenarioFile, EveryKeyIsEmitted)
{
    const auto lines = emit_scenario(pipeline::ScenarioConfig{});
    std::vector<std::string_view> keys;
    for (const auto &[k, v] : lines)
    {
        keys.push_back(k);
    }
    EXPECT_EQ(keys, scenario_keys());
}

TEST(ScenarioFile, ReadsFromDisk)
{
    const auto p = scratch("s.scenario");
    std::ofstream(p) << "preset = baseline\nduration_s = 2\n";
    const auto r = parse_scenario_file(p.string());
    ASSERT_TRUE(std::holds_alternative<pipeline::ScenarioConfig>(r));
    EXPECT_EQ(std::get<pipeline::ScenarioConfig>(r).duration_s, 2.0);
    EXPECT_TRUE(std::holds_alternative<std::vector<ParseError>>(parse_scenario_file("/nonexistent/x")));
}

TEST(Report, SameSeedGivesIdenticalDeterministicPart)
{
    auto cfg = *pipeline::preset("openuvr");
    cfg.duration_s = 3;
    cfg.channel.jitter_sigma_us = 50;
    const auto a = run_report(pipeline::run_scenario(cfg).report, 0.5);
    const auto b = run_report(pipeline::run_scenario(cfg).report, 1.5);
    EXPECT_NE(a.dump(), b.dump());
    EXPECT_EQ(deterministic_part(a).dump(2), deterministic_part(b).dump(2));
    EXPECT_EQ(a["schema_version"], kSchemaVersion);
    EXPECT_EQ(a["kind"], "sim-run");
}

TEST(Report, PrintedBreakdownSumsToHundred)
{
    auto cfg = *pipeline::preset("baseline");
    cfg.duration_s = 2;
    const auto j = run_report(pipeline::run_scenario(cfg).report, 0.0);
    double share = 0.0;
    for (const auto &row : j["stage_breakdown"])
    {
        share += row["share_pct"].get<double>();
    }
    EXPECT_NEAR(share, 100.0, 0.1);
    std::ostringstream os;
    print_report(os, j);
    EXPECT_NE(os.str().find("host_netstack"), std::string::npos);
    EXPECT_NE(os.str().find("100.0"), std::string::npos);
}

TEST(Report, UnknownSchemaIsRejected)
{
    Json j = {{"schema_version", 99}, {"kind", "run"}};
    std::ostringstream os;
    EXPECT_THROW(print_report(os, j), std::runtime_error);
}

TEST(Cli, RunWritesReportAndShowReadsIt)
{
    const auto out = scratch("r.json");
    std::string text;
    ASSERT_EQ(run_cli("sim run --preset openuvr --seed 42 --set duration_s=5 --quiet --out " + out.string()), 0);
    const auto j = read_json(out);
    EXPECT_NEAR(j["metrics"]["end_to_end"]["mean_ms"].get<double>(), 14.32, 0.05);
    ASSERT_EQ(run_cli("report show " + out.string(), &text), 0);
    EXPECT_NE(text.find("end_to_end"), std::string::npos) << text;
}

TEST(Cli, SameSeedReportsAreByteIdenticalOutsideMetadata)
{
    const auto a = scratch("a.json");
    const auto b = scratch("b.json");
    ASSERT_EQ(run_cli("sim run --preset baseline --set duration_s=3 --quiet --out " + a.string()), 0);
    ASSERT_EQ(run_cli("sim run --preset baseline --set duration_s=3 --quiet --out " + b.string()), 0);
    EXPECT_EQ(deterministic_part(read_json(a)).dump(), deterministic_part(read_json(b)).dump());
}

TEST(Cli, SeedPrecedenceFlagOverEnvOverFile)
{
    const auto scen = scratch("seed.scenario");
    std::ofstream(scen) << "preset = openuvr\nduration_s = 1\nseed = 5\n";
    const auto out = scratch("seed.json");
    ASSERT_EQ(run_cli("sim run --quiet --scenario " + scen.string() + " --out " + out.string()), 0);
    EXPECT_EQ(read_json(out)["config"]["seed"], "5");
    const std::string env = "UVRPIPE_SEED=9 ";
    ASSERT_EQ(std::system((env + UVRPIPE_BIN + " sim run --quiet --scenario " + scen.string() + " --out " +
                           out.string() + " >/dev/null 2>&1")
                              .c_str()),
              0);
    EXPECT_EQ(read_json(out)["config"]["seed"], "9");
    ASSERT_EQ(std::system((env + UVRPIPE_BIN + " sim run --quiet --seed 11 --scenario " + scen.string() + " --out " +
                           out.string() + " >/dev/null 2>&1")
                              .c_str()),
              0);
    EXPECT_EQ(read_json(out)["config"]["seed"], "11");
}

TEST(Cli, ValidationErrorsExitOne)
{
    const auto scen = scratch("bad.scenario");
    std::ofstream(scen) << "codec.gop_size = 0\nbogus = 1\nchannel.loss_p = 2\n";
    std::string text;
    EXPECT_EQ(run_cli("sim run --scenario " + scen.string(), &text), 1);
    EXPECT_NE(text.find("line 1"), std::string::npos) << text;
    EXPECT_NE(text.find("line 2"), std::string::npos) << text;
    EXPECT_NE(text.find("line 3"), std::string::npos) << text;
    EXPECT_EQ(run_cli("sim ab --preset baseline --toggle warp_drive"), 1);
    EXPECT_EQ(run_cli("sim run --no-such-flag"), 1);
}

TEST(Cli, RuntimeErrorsExitTwo)
{
    EXPECT_EQ(run_cli("report show /nonexistent/report.json"), 2);
}

TEST(Cli, AbPrintsTheDelta)
{
    std::string text;
    ASSERT_EQ(run_cli("sim ab --preset baseline --set duration_s=5 --toggle transcode_avoidance", &text), 0);
    EXPECT_NE(text.find("5.51"), std::string::npos) << text;
}

TEST(Cli, SweepKeepsInputOrder)
{
    const auto out = scratch("sweep.json");
    ASSERT_EQ(run_cli("sim sweep --preset openuvr --set duration_s=2 --key codec.bitrate_bps "
                      "--values 30000000,10000000,20000000 --jobs 3 --quiet --out " +
                      out.string()),
              0);
    const auto j = read_json(out);
    ASSERT_EQ(j["points"].size(), 3u);
    EXPECT_EQ(j["points"][0]["value"], "30000000");
    EXPECT_EQ(j["points"][1]["value"], "10000000");
    EXPECT_EQ(j["points"][2]["value"], "20000000");
}
