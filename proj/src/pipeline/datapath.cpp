#include "uvr/pipeline/datapath.hpp"

namespace uvr::pipeline
{
    using dpp::MemoryDomain;

    bool *toggle_by_name(OptimizationToggles &t, std::string_view name)
    {
        if (name == "transcode_avoidance")
            return &t.transcode_avoidance;
        if (name == "shared_gpu_buffer")
            return &t.shared_gpu_buffer;
        if (name == "direct_net_io")
            return &t.direct_net_io;
        if (name == "p2p_topology" || name == "p2p")
            return &t.p2p_topology;
        if (name == "feedback_control" || name == "feedback")
            return &t.feedback_control;
        return nullptr;
    }

    std::optional<bool> toggle_value(const OptimizationToggles &t, std::string_view name)
    {
        OptimizationToggles copy = t;
        if (bool *flag = toggle_by_name(copy, name))
        {
            return *flag;
        }
        return std::nullopt;
    }

    std::vector<std::string> StageLatencyModel::validate() const
    {
        std::vector<std::string> errors;
        const std::pair<const char *, std::int64_t> fields[] = {
            {"host_capture_us", host_capture_us},
            {"host_transcode_us", host_transcode_us},
            {"host_upload_us", host_upload_us},
            {"host_encode_us", host_encode_us},
            {"host_download_us", host_download_us},
            {"host_netstack_us", host_netstack_us},
            {"host_dpp_send_us", host_dpp_send_us},
            {"iframe_send_extra_us", iframe_send_extra_us},
            {"net_frame_overhead_us", net_frame_overhead_us},
            {"mud_netstack_us", mud_netstack_us},
            {"mud_decode_us", mud_decode_us},
            {"residual_presentation_us", residual_presentation_us},
        };
        for (const auto &[name, value] : fields)
        {
            if (value < 0)
            {
                errors.push_back(std::string(name) + ": must be >= 0");
            }
        }
        return errors;
    }

    codec::EncodeLatencyModel StageLatencyModel::encode_model() const
    {
        codec::EncodeLatencyModel m;
        m.baseline_us = host_capture_us + host_transcode_us + host_upload_us + host_encode_us + host_download_us;
        m.transcode_saving_us = host_transcode_us;
        m.shared_buffer_saving_us = host_capture_us + host_upload_us + host_download_us;
        return m;
    }

    const char *to_string(Phase p) noexcept
    {
        switch (p)
        {
        case Phase::EncodePath:
            return "encode_path";
        case Phase::HostSend:
            return "host_netstack";
        case Phase::Network:
            return "network";
        case Phase::Mud:
            return "mud";
        case Phase::Presentation:
            return "presentation";
        }
        return "?";
    }

    const DatapathNode *DatapathGraph::find(std::string_view name) const
    {
        for (const auto &n : nodes_)
        {
            if (n.name == name)
            {
                return &n;
            }
        }
        return nullptr;
    }

    std::int64_t DatapathGraph::phase_cost_us(Phase p) const
    {
        std::int64_t sum = 0;
        for (const auto &n : nodes_)
        {
            if (n.phase == p)
            {
                sum += n.cost_us;
            }
        }
        return sum;
    }

    std::size_t DatapathGraph::copy_count(Phase p) const
    {
        std::size_t count = 0;
        for (const auto &n : nodes_)
        {
            if (n.phase == p)
            {
                count += n.copies.size();
            }
        }
        return count;
    }

    namespace
    {
        std::int64_t size_of(Buffer b, const FrameBytes &bytes)
        {
            switch (b)
            {
            case Buffer::RawRgb:
                return bytes.raw_rgb;
            case Buffer::RawYuv:
                return bytes.raw_yuv;
            case Buffer::Encoded:
                return bytes.encoded;
            }
            return 0;
        }
    } // namespace

    void DatapathGraph::apply_copies(const FrameBytes &bytes, dpp::CopyLedger &ledger) const
    {
        for (const auto &n : nodes_)
        {
            if (n.phase == Phase::HostSend)
            {
                apply_send_copies(bytes.encoded, ledger);
                continue;
            }
            for (const auto &c : n.copies)
            {
                ledger.record({c.label, size_of(c.buffer, bytes), c.from, c.to,
                               c.buffer == Buffer::Encoded ? dpp::Content::Encoded : dpp::Content::Raw});
            }
        }
    }

    void DatapathGraph::apply_send_copies(std::int64_t encoded_bytes, dpp::CopyLedger &ledger) const
    {
        dpp::host_send_path(encoded_bytes, toggles_.direct_net_io, toggles_.shared_gpu_buffer, ledger);
    }

    DatapathGraph build_datapath(const OptimizationToggles &t, const StageLatencyModel &s)
    {
        std::vector<DatapathNode> nodes;
        const Buffer raw_for_encoder = t.transcode_avoidance ? Buffer::RawRgb : Buffer::RawYuv;

        if (t.shared_gpu_buffer)
        {
            nodes.push_back({"capture-in-place", Phase::EncodePath, 0, {}});
        }
        else
        {
            nodes.push_back({"capture", Phase::EncodePath, s.host_capture_us,
                             {{"framebuffer-readback", Buffer::RawRgb, MemoryDomain::GpuDevice, MemoryDomain::HostMain}}});
        }
        if (!t.transcode_avoidance)
        {
            const MemoryDomain where = t.shared_gpu_buffer ? MemoryDomain::GpuDevice : MemoryDomain::HostMain;
            nodes.push_back(
                {"transcode", Phase::EncodePath, s.host_transcode_us, {{"rgb-to-yuv420", Buffer::RawYuv, where, where}}});
        }
        if (!t.shared_gpu_buffer)
        {
            nodes.push_back({"upload", Phase::EncodePath, s.host_upload_us,
                             {{"encoder-upload", raw_for_encoder, MemoryDomain::HostMain, MemoryDomain::GpuDevice}}});
        }
        nodes.push_back({"encode", Phase::EncodePath, s.host_encode_us, {}});
        if (!t.shared_gpu_buffer)
        {
            nodes.push_back({"download", Phase::EncodePath, s.host_download_us,
                             {{"bitstream-download", Buffer::Encoded, MemoryDomain::GpuDevice, MemoryDomain::HostMain}}});
        }

        if (t.direct_net_io)
        {
            nodes.push_back({"dpp-send", Phase::HostSend, s.host_dpp_send_us, {}});
        }
        else
        {
            nodes.push_back({"netstack", Phase::HostSend, s.host_netstack_us, {}});
        }
        // Send-path copies are materialized by dpp::host_send_path; mirror them here
        // so the graph can be inspected without a frame.
        {
            dpp::CopyLedger probe;
            dpp::host_send_path(1, t.direct_net_io, t.shared_gpu_buffer, probe);
            auto &send = nodes.back();
            for (const auto &e : probe.entries())
            {
                send.copies.push_back({e.stage, Buffer::Encoded, e.from, e.to});
            }
        }

        nodes.push_back({"link", Phase::Network, 0, {}});
        if (!t.direct_net_io)
        {
            nodes.push_back({"mud-netstack", Phase::Mud, s.mud_netstack_us, {}});
        }
        nodes.push_back({"decode", Phase::Mud, s.mud_decode_us, {}});
        if (t.shared_gpu_buffer && t.direct_net_io)
        {
            nodes.push_back({"presentation", Phase::Presentation, s.residual_presentation_us, {}});
        }
        return DatapathGraph(t, std::move(nodes));
    }
} // namespace uvr::pipeline
