#pragma once

#include "uvr/pipeline/analysis.hpp"
#include "uvr/runner/runner.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace uvr::cli
{
    using Json = nlohmann::ordered_json;

    inline constexpr int kSchemaVersion = 1;

    Json config_json(const pipeline::ScenarioConfig &cfg);
    Json metrics_json(const pipeline::MetricsReport &r);
    Json breakdown_json(const std::vector<pipeline::BreakdownRow> &rows);
    Json ab_json(const pipeline::AbReport &ab);
    Json interaction_json(const pipeline::InteractionReport &ir);
    Json runner_json(const runner::RunnerStats &s);

    /// Full report for one scenario run. Wall-clock data lives only under
    /// "metadata", so two runs of the same scenario differ nowhere else.
    Json run_report(const pipeline::MetricsReport &r, double wall_seconds);
    Json ab_report(const pipeline::AbReport &ab, const std::optional<pipeline::InteractionReport> &ir,
                   double wall_seconds);
    Json sweep_report(const pipeline::ScenarioConfig &base, std::string_view key,
                      const std::vector<pipeline::SweepPoint> &points, double wall_seconds);
    Json runner_report(const runner::RunnerConfig &cfg, const runner::RunnerStats &s);

    /// The report without its "metadata" member.
    Json deterministic_part(Json report);

    void print_metrics(std::ostream &os, const pipeline::MetricsReport &r);
    void print_breakdown(std::ostream &os, const std::vector<pipeline::BreakdownRow> &rows);
    void print_ab(std::ostream &os, const pipeline::AbReport &ab);
    void print_interaction(std::ostream &os, const pipeline::InteractionReport &ir);
    void print_sweep(std::ostream &os, std::string_view key, const std::vector<pipeline::SweepPoint> &points);
    void print_runner(std::ostream &os, const runner::RunnerStats &s);

    /// Renders any report produced above as tables. Throws std::runtime_error for
    /// an unknown schema version.
    void print_report(std::ostream &os, const Json &report);
} // namespace uvr::cli
