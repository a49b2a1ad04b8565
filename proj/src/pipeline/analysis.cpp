#include "uvr/pipeline/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace uvr::pipeline
{
    std::vector<BreakdownRow> stage_breakdown(const MetricsReport &report)
    {
        double total = 0.0;
        for (const auto &s : report.stages)
        {
            total += s.mean_ms;
        }
        std::vector<BreakdownRow> rows;
        for (const auto &s : report.stages)
        {
            rows.push_back({s.name, s.mean_ms, total > 0.0 ? 100.0 * s.mean_ms / total : 0.0});
        }
        return rows;
    }

    std::vector<std::string_view> owned_stages(std::string_view toggle)
    {
        if (toggle == "transcode_avoidance" || toggle == "shared_gpu_buffer")
        {
            return {"encode_path"};
        }
        if (toggle == "direct_net_io")
        {
            return {"host_netstack", "mud"};
        }
        if (toggle == "p2p_topology")
        {
            return {"network"};
        }
        return {};
    }

    namespace
    {
        double stage_mean(const MetricsReport &r, std::string_view name)
        {
            const StageStats *s = r.stage(name);
            return s ? s->mean_ms : 0.0;
        }

        std::string canonical_toggle(std::string_view name)
        {
            OptimizationToggles probe;
            bool *flag = toggle_by_name(probe, name);
            if (flag == nullptr)
            {
                throw UnknownToggle("unknown toggle '" + std::string(name) + "'");
            }
            *flag = true;
            for (auto n : kToggleNames)
            {
                if (toggle_value(probe, n).value_or(false))
                {
                    return std::string(n);
                }
            }
            return std::string(name);
        }
    } // namespace

    AbReport ab_compare(const ScenarioConfig &cfg, std::string_view toggle)
    {
        AbReport ab;
        ab.toggle = canonical_toggle(toggle);

        ScenarioConfig off = cfg;
        ScenarioConfig on = cfg;
        *toggle_by_name(off.toggles, ab.toggle) = false;
        *toggle_by_name(on.toggles, ab.toggle) = true;

        ab.off = run_scenario(off).report;
        ab.on = run_scenario(on).report;
        ab.off_total_ms = ab.off.end_to_end.mean_ms;
        ab.on_total_ms = ab.on.end_to_end.mean_ms;
        ab.e2e_saved_ms = ab.off_total_ms - ab.on_total_ms;

        std::vector<std::string> names;
        for (const auto *r : {&ab.off, &ab.on})
        {
            for (const auto &s : r->stages)
            {
                if (std::find(names.begin(), names.end(), s.name) == names.end())
                {
                    names.push_back(s.name);
                }
            }
        }
        for (const auto &n : names)
        {
            const double a = stage_mean(ab.off, n);
            const double b = stage_mean(ab.on, n);
            ab.stages.push_back({n, a, b, a - b});
        }

        const auto owned = owned_stages(ab.toggle);
        if (owned.empty())
        {
            ab.attributed_ms = ab.e2e_saved_ms;
        }
        for (auto n : owned)
        {
            ab.attributed_ms += stage_mean(ab.off, n) - stage_mean(ab.on, n);
        }

        if (ab.toggle == "p2p_topology" && on.toggles.transcode_avoidance)
        {
            ScenarioConfig yuv = off;
            yuv.toggles.transcode_avoidance = false;
            const MetricsReport ref = run_scenario(yuv).report;
            ab.rgb_reference_ms = stage_mean(ref, "network") - stage_mean(ab.on, "network");
            ab.attributed_ms = *ab.rgb_reference_ms;
        }
        return ab;
    }

    InteractionReport interaction_residual(const ScenarioConfig &cfg)
    {
        InteractionReport ir;
        ScenarioConfig base = cfg;
        base.toggles = OptimizationToggles::baseline();
        ScenarioConfig all = cfg;
        all.toggles = OptimizationToggles::all_on();

        ir.baseline_ms = run_scenario(base).report.end_to_end.mean_ms;
        ir.all_on_ms = run_scenario(all).report.end_to_end.mean_ms;

        double sum = 0.0;
        for (auto name : kToggleNames)
        {
            ScenarioConfig from = base;
            if (name == "p2p_topology")
            {
                from.toggles.transcode_avoidance = true;
            }
            const double d = ab_compare(from, name).attributed_ms;
            ir.deltas.emplace_back(std::string(name), d);
            sum += d;
        }
        ir.predicted_ms = ir.baseline_ms - sum;
        ir.residual_ms = ir.all_on_ms - ir.predicted_ms;
        return ir;
    }

    std::vector<SweepPoint> sweep(const ScenarioConfig &base, std::string_view key,
                                  const std::vector<std::string> &values, Setter apply, unsigned threads)
    {
        // Build every config up front so validation errors surface before any run.
        std::vector<ScenarioConfig> configs;
        for (const auto &v : values)
        {
            ScenarioConfig c = base;
            apply(c, key, v);
            configs.push_back(std::move(c));
        }

        std::vector<SweepPoint> out(values.size());
        if (threads == 0)
        {
            threads = std::max(1u, std::thread::hardware_concurrency());
        }
        threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, values.size())));

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto worker = [&] {
            for (std::size_t i = next++; i < configs.size(); i = next++)
            {
                try
                {
                    out[i] = {values[i], run_scenario(configs[i]).report};
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mu);
                    if (!failure)
                    {
                        failure = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
        {
            pool.emplace_back(worker);
        }
        pool.clear();
        if (failure)
        {
            std::rethrow_exception(failure);
        }
        return out;
    }
} // namespace uvr::pipeline
