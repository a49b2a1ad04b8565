#pragma once

#include "uvr/pipeline/simulator.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uvr::pipeline
{
    struct BreakdownRow
    {
        std::string stage;
        double ms = 0.0;
        double share_pct = 0.0;
    };

    /// Mean time per stage and its share of the summed stages, in datapath order.
    std::vector<BreakdownRow> stage_breakdown(const MetricsReport &report);

    class UnknownToggle : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    struct StageDelta
    {
        std::string stage;
        double off_ms = 0.0;
        double on_ms = 0.0;
        double saved_ms = 0.0;
    };

    struct AbReport
    {
        std::string toggle;
        double off_total_ms = 0.0;
        double on_total_ms = 0.0;
        // Mean end-to-end difference (off - on).
        double e2e_saved_ms = 0.0;
        std::vector<StageDelta> stages;
        // Savings in the stages the optimization acts on.
        double attributed_ms = 0.0;
        // p2p only, when frames are RGB: network time against the YUV two-hop
        // configuration rather than the RGB two-hop one.
        std::optional<double> rgb_reference_ms;
        MetricsReport off;
        MetricsReport on;
    };

    /// Stages each optimization owns; feedback control owns none (its effect is
    /// spread over send and network time), so its attribution is the e2e delta.
    std::vector<std::string_view> owned_stages(std::string_view toggle);

    /// Runs `cfg` with the toggle forced off and forced on, same seed.
    AbReport ab_compare(const ScenarioConfig &cfg, std::string_view toggle);

    struct InteractionReport
    {
        double baseline_ms = 0.0;
        double all_on_ms = 0.0;
        // Attributed saving per toggle, kToggleNames order.
        std::vector<std::pair<std::string, double>> deltas;
        double predicted_ms = 0.0; // baseline - sum(deltas)
        double residual_ms = 0.0;  // all_on - predicted
    };

    /// Compares the all-on total with the baseline minus every individual saving.
    /// Each saving is measured from the baseline, except p2p which is measured for
    /// the RGB frames the optimized stack actually sends.
    InteractionReport interaction_residual(const ScenarioConfig &cfg);

    /// Applies `key = value` to a copy of `base`. Throws codec::ConfigError for an
    /// unknown key or unparsable value.
    using Setter = void (*)(ScenarioConfig &, std::string_view key, std::string_view value);

    struct SweepPoint
    {
        std::string value;
        MetricsReport report;
    };

    /// One scenario per value, run concurrently; results keep the input order.
    std::vector<SweepPoint> sweep(const ScenarioConfig &base, std::string_view key,
                                  const std::vector<std::string> &values, Setter apply, unsigned threads = 0);
} // namespace uvr::pipeline
