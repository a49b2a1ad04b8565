#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace uvr::dpp
{
    enum class MemoryDomain : std::uint8_t
    {
        GpuDevice,
        HostMain,
        KernelTransport,
        KernelNetwork,
        LinkBuffer,
    };

    std::string_view to_string(MemoryDomain d) noexcept;

    enum class Content : std::uint8_t
    {
        Raw,
        Encoded,
    };

    struct CopyEntry
    {
        std::string stage;
        std::int64_t bytes = 0;
        MemoryDomain from = MemoryDomain::HostMain;
        MemoryDomain to = MemoryDomain::HostMain;
        Content content = Content::Encoded;
    };

    /// Append-only record of the copies one frame incurs along the datapath.
    class CopyLedger
    {
    public:
        void record(CopyEntry e) { entries_.push_back(std::move(e)); }

        const std::vector<CopyEntry> &entries() const noexcept { return entries_; }
        std::int64_t total_bytes() const noexcept;
        std::int64_t bytes_of(Content c) const noexcept;
        std::size_t count_of(Content c) const noexcept;

    private:
        std::vector<CopyEntry> entries_;
    };

    /// Records the host-side copies of an encoded frame on its way to the link
    /// buffer. The layered stack repartitions the bytes three times (transport,
    /// network, link); the direct path moves them once from where the encoder left
    /// them straight into the link-layer buffer.
    void host_send_path(std::int64_t encoded_bytes, bool direct_net_io, bool shared_gpu_buffer, CopyLedger &ledger);
} // namespace uvr::dpp
