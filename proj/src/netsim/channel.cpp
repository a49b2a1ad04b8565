#include "uvr/netsim/channel.hpp"

#include <algorithm>
#include <cmath>

namespace uvr::netsim
{
    const char *to_string(Topology t) noexcept { return t == Topology::P2P ? "p2p" : "infra"; }

    const char *to_string(LossKind k) noexcept
    {
        switch (k)
        {
        case LossKind::None:
            return "none";
        case LossKind::Bernoulli:
            return "bernoulli";
        case LossKind::GilbertElliott:
            return "gilbert_elliott";
        }
        return "?";
    }

    std::vector<std::string> ChannelModel::validate() const
    {
        std::vector<std::string> errors;
        auto prob = [&](double v, const char *name) {
            if (!(v >= 0.0 && v <= 1.0))
            {
                errors.push_back(std::string(name) + ": must be in [0, 1]");
            }
        };
        if (bandwidth_bps <= 0)
        {
            errors.emplace_back("bandwidth_bps: must be > 0");
        }
        if (prop_delay_us < 0)
        {
            errors.emplace_back("prop_delay_us: must be >= 0");
        }
        if (!(jitter_sigma_us >= 0.0))
        {
            errors.emplace_back("jitter_sigma_us: must be >= 0");
        }
        prob(loss.p, "loss_p");
        prob(loss.p_good_to_bad, "ge_p_good_to_bad");
        prob(loss.p_bad_to_good, "ge_p_bad_to_good");
        prob(loss.loss_good, "ge_loss_good");
        prob(loss.loss_bad, "ge_loss_bad");
        return errors;
    }

    std::int64_t serialization_us(std::int64_t bytes, std::int64_t bandwidth_bps) noexcept
    {
        const __int128 bits_us = static_cast<__int128>(bytes) * 8 * kUsPerSecond;
        return static_cast<std::int64_t>((bits_us + bandwidth_bps - 1) / bandwidth_bps);
    }

    namespace
    {
        bool draw_loss(const LossModel &m, LinkState &link, Rng &rng)
        {
            switch (m.kind)
            {
            case LossKind::None:
                return false;
            case LossKind::Bernoulli:
                return m.p > 0.0 && rng.bernoulli(m.p);
            case LossKind::GilbertElliott:
            {
                const double flip = link.ge_bad ? m.p_bad_to_good : m.p_good_to_bad;
                if (rng.bernoulli(flip))
                {
                    link.ge_bad = !link.ge_bad;
                }
                const double p = link.ge_bad ? m.loss_bad : m.loss_good;
                return p > 0.0 && rng.bernoulli(p);
            }
            }
            return false;
        }

        std::int64_t draw_jitter(const ChannelModel &ch, Rng &rng)
        {
            if (ch.jitter_sigma_us <= 0.0)
            {
                return 0;
            }
            const double j = std::min(std::fabs(rng.normal()) * ch.jitter_sigma_us, 3.0 * ch.jitter_sigma_us);
            return static_cast<std::int64_t>(std::llround(j));
        }
    } // namespace

    TxResult transmit(const ChannelModel &ch, LinkState &link, std::int64_t size_bytes, SimTime now, Rng &rng)
    {
        if (size_bytes > kMaxLinkPacket || size_bytes <= 0)
        {
            throw OversizedPacket("link packet of " + std::to_string(size_bytes) + " bytes (max 2304)");
        }
        const std::int64_t ser = serialization_us(size_bytes, ch.bandwidth_bps);
        ++link.counters.sent;
        link.counters.bytes += static_cast<std::uint64_t>(size_bytes);

        TxResult r;
        SimTime t = std::max(now, link.busy_until);
        std::int64_t delay = 0;
        bool delivered = true;
        for (int hop = 0; hop < ch.hops(); ++hop)
        {
            t += ser;
            r.airtime_us += ser;
            delay += ch.prop_delay_us + draw_jitter(ch, rng);
            if (draw_loss(ch.loss, link, rng))
            {
                delivered = false;
                break;
            }
        }
        link.busy_until = t;
        link.airtime_us += r.airtime_us;

        if (!delivered)
        {
            ++link.counters.dropped;
            return r;
        }
        r.delivered = true;
        r.arrival = std::max(t + delay, link.last_arrival);
        link.last_arrival = r.arrival;
        ++link.counters.delivered;
        return r;
    }

    double link_occupancy(const LinkState &link, std::int64_t window_us)
    {
        if (window_us <= 0)
        {
            throw std::invalid_argument("occupancy window must be > 0");
        }
        return std::clamp(static_cast<double>(link.airtime_us) / static_cast<double>(window_us), 0.0, 1.0);
    }
} // namespace uvr::netsim
