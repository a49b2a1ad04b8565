#include "uvr/dpp/copy_ledger.hpp"

namespace uvr::dpp
{
    std::string_view to_string(MemoryDomain d) noexcept
    {
        switch (d)
        {
        case MemoryDomain::GpuDevice:
            return "gpu";
        case MemoryDomain::HostMain:
            return "main";
        case MemoryDomain::KernelTransport:
            return "transport";
        case MemoryDomain::KernelNetwork:
            return "network";
        case MemoryDomain::LinkBuffer:
            return "link";
        }
        return "?";
    }

    std::int64_t CopyLedger::total_bytes() const noexcept
    {
        std::int64_t sum = 0;
        for (const auto &e : entries_)
        {
            sum += e.bytes;
        }
        return sum;
    }

    std::int64_t CopyLedger::bytes_of(Content c) const noexcept
    {
        std::int64_t sum = 0;
        for (const auto &e : entries_)
        {
            if (e.content == c)
            {
                sum += e.bytes;
            }
        }
        return sum;
    }

    std::size_t CopyLedger::count_of(Content c) const noexcept
    {
        std::size_t n = 0;
        for (const auto &e : entries_)
        {
            n += e.content == c ? 1 : 0;
        }
        return n;
    }

    void host_send_path(std::int64_t encoded_bytes, bool direct_net_io, bool shared_gpu_buffer, CopyLedger &ledger)
    {
        const MemoryDomain source = shared_gpu_buffer ? MemoryDomain::GpuDevice : MemoryDomain::HostMain;
        if (direct_net_io)
        {
            ledger.record({"dpp-send", encoded_bytes, source, MemoryDomain::LinkBuffer, Content::Encoded});
            return;
        }
        ledger.record({"transport-buffer", encoded_bytes, source, MemoryDomain::KernelTransport, Content::Encoded});
        ledger.record({"network-reframe", encoded_bytes, MemoryDomain::KernelTransport, MemoryDomain::KernelNetwork,
                       Content::Encoded});
        ledger.record(
            {"link-reframe", encoded_bytes, MemoryDomain::KernelNetwork, MemoryDomain::LinkBuffer, Content::Encoded});
    }
} // namespace uvr::dpp
