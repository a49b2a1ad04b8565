#pragma once

#include "uvr/core/rng.hpp"
#include "uvr/core/sim_time.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvr::netsim
{
    enum class Topology : std::uint8_t
    {
        // Host and MUD talk directly: one hop.
        P2P,
        // Every datagram crosses the same wireless medium twice via an access point.
        Infra,
    };

    const char *to_string(Topology t) noexcept;

    enum class LossKind : std::uint8_t
    {
        None,
        Bernoulli,
        GilbertElliott,
    };

    const char *to_string(LossKind k) noexcept;

    struct LossModel
    {
        LossKind kind = LossKind::None;
        double p = 0.0; // Bernoulli loss probability
        // Gilbert-Elliott: transition probabilities per packet and per-state loss.
        double p_good_to_bad = 0.01;
        double p_bad_to_good = 0.3;
        double loss_good = 0.0;
        double loss_bad = 0.5;

        friend bool operator==(const LossModel &, const LossModel &) = default;
    };

    struct ChannelModel
    {
        std::int64_t bandwidth_bps = 867'000'000;
        std::int64_t prop_delay_us = 200;
        double jitter_sigma_us = 0.0;
        LossModel loss;
        Topology topology = Topology::Infra;

        int hops() const noexcept { return topology == Topology::Infra ? 2 : 1; }
        std::vector<std::string> validate() const;

        friend bool operator==(const ChannelModel &, const ChannelModel &) = default;
    };

    class OversizedPacket : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    inline constexpr std::int64_t kMaxLinkPacket = 2304;

    /// ceil(bytes * 8 * 1e6 / bandwidth) microseconds.
    std::int64_t serialization_us(std::int64_t bytes, std::int64_t bandwidth_bps) noexcept;

    struct LinkCounters
    {
        std::uint64_t sent = 0;
        std::uint64_t delivered = 0;
        std::uint64_t dropped = 0;
        std::uint64_t bytes = 0;
    };

    /// Mutable state of one wireless medium.
    struct LinkState
    {
        SimTime busy_until;
        SimTime last_arrival;
        std::int64_t airtime_us = 0;
        bool ge_bad = false;
        LinkCounters counters;
    };

    struct TxResult
    {
        bool delivered = false;
        SimTime arrival;
        std::int64_t airtime_us = 0;
    };

    /// Sends one packet of `size_bytes` at `now`. The medium serves packets FIFO:
    /// transmission starts at max(now, busy_until). Under INFRA the packet occupies
    /// the medium twice (station to AP, AP to station) and pays the propagation and
    /// jitter of both hops; loss is drawn per hop and a packet lost on the first hop
    /// never makes the second. Random draws happen only for non-zero jitter or loss,
    /// so loss-free, jitter-free runs are independent of the seed.
    TxResult transmit(const ChannelModel &ch, LinkState &link, std::int64_t size_bytes, SimTime now, Rng &rng);

    /// Fraction of `window_us` the medium spent transmitting.
    double link_occupancy(const LinkState &link, std::int64_t window_us);
} // namespace uvr::netsim
