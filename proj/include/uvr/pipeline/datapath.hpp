#pragma once

#include "uvr/codec/codec_model.hpp"
#include "uvr/dpp/copy_ledger.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uvr::pipeline
{
    struct OptimizationToggles
    {
        bool transcode_avoidance = false;
        bool shared_gpu_buffer = false;
        bool direct_net_io = false;
        bool p2p_topology = false;
        bool feedback_control = false;

        static OptimizationToggles baseline() { return {}; }
        static OptimizationToggles all_on() { return {true, true, true, true, true}; }

        friend bool operator==(const OptimizationToggles &, const OptimizationToggles &) = default;
    };

    inline constexpr std::array<std::string_view, 5> kToggleNames = {
        "transcode_avoidance", "shared_gpu_buffer", "direct_net_io", "p2p_topology", "feedback_control"};

    /// Pointer to the named flag, or nullopt for an unknown name.
    bool *toggle_by_name(OptimizationToggles &t, std::string_view name);
    std::optional<bool> toggle_value(const OptimizationToggles &t, std::string_view name);

    /// Fixed per-stage costs in microseconds. Per-byte network time is not here:
    /// the channel model derives it from actual encoded sizes.
    ///
    /// Baseline encode path: capture 1,570 + transcode 5,510 + upload 1,570 +
    /// encode 3,720 + download 1,570 = 13,940. The three memory copies (4,710) are
    /// what the shared GPU buffer removes. The host stack constants include the
    /// mean share of the extra I-frame send cost at the default GOP sizes.
    struct StageLatencyModel
    {
        std::int64_t host_capture_us = 1'570;
        std::int64_t host_transcode_us = 5'510;
        std::int64_t host_upload_us = 1'570;
        std::int64_t host_encode_us = 3'720;
        std::int64_t host_download_us = 1'570;
        // Layered transport/network/link stack, per frame.
        std::int64_t host_netstack_us = 17'526;
        // Direct link-layer send path, per frame.
        std::int64_t host_dpp_send_us = 3'856;
        // Extra host send time of an I-frame over a P-frame.
        std::int64_t iframe_send_extra_us = 2'087;
        // Channel access / PHY setup paid per frame on every hop.
        std::int64_t net_frame_overhead_us = 993;
        std::int64_t mud_netstack_us = 700;
        std::int64_t mud_decode_us = 2'940;
        // Scan-out cost of the fully zero-copy path (shared buffer + direct I/O).
        std::int64_t residual_presentation_us = 1'401;

        std::vector<std::string> validate() const;
        codec::EncodeLatencyModel encode_model() const;

        friend bool operator==(const StageLatencyModel &, const StageLatencyModel &) = default;
    };

    enum class Phase : std::uint8_t
    {
        EncodePath,
        HostSend,
        Network,
        Mud,
        Presentation,
    };

    const char *to_string(Phase p) noexcept;

    enum class Buffer : std::uint8_t
    {
        RawRgb,
        RawYuv,
        Encoded,
    };

    struct CopyAction
    {
        std::string label;
        Buffer buffer = Buffer::Encoded;
        dpp::MemoryDomain from = dpp::MemoryDomain::HostMain;
        dpp::MemoryDomain to = dpp::MemoryDomain::HostMain;
    };

    struct DatapathNode
    {
        std::string name;
        Phase phase = Phase::EncodePath;
        std::int64_t cost_us = 0;
        std::vector<CopyAction> copies;
    };

    struct FrameBytes
    {
        std::int64_t raw_rgb = 0;
        std::int64_t raw_yuv = 0;
        std::int64_t encoded = 0;
    };

    /// Ordered stages a frame traverses from the GPU framebuffer to the headset.
    class DatapathGraph
    {
    public:
        DatapathGraph(OptimizationToggles toggles, std::vector<DatapathNode> nodes)
            : toggles_(toggles), nodes_(std::move(nodes))
        {
        }

        const std::vector<DatapathNode> &nodes() const noexcept { return nodes_; }
        const OptimizationToggles &toggles() const noexcept { return toggles_; }

        const DatapathNode *find(std::string_view name) const;
        bool has(std::string_view name) const { return find(name) != nullptr; }

        std::int64_t phase_cost_us(Phase p) const;
        std::size_t copy_count(Phase p) const;

        /// Appends every copy of the graph to `ledger` with the frame's actual sizes.
        void apply_copies(const FrameBytes &bytes, dpp::CopyLedger &ledger) const;
        /// Appends only the host send-path copies.
        void apply_send_copies(std::int64_t encoded_bytes, dpp::CopyLedger &ledger) const;

    private:
        OptimizationToggles toggles_;
        std::vector<DatapathNode> nodes_;
    };

    DatapathGraph build_datapath(const OptimizationToggles &toggles, const StageLatencyModel &stages = {});
} // namespace uvr::pipeline
