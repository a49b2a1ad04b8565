#include "uvr/dpp/reassembly.hpp"

#include <algorithm>

namespace uvr::dpp
{
    std::vector<FrameOutcome> Reassembler::poll(SimTime now)
    {
        std::vector<FrameOutcome> out;
        for (auto it = pending_.begin(); it != pending_.end();)
        {
            if (now - it->second.first_arrival > cfg_.drop_deadline_us)
            {
                out.emplace_back(FrameDropped{it->first, now, it->second.received});
                ++counters_.dropped;
                it = pending_.erase(it);
            }
            else
            {
                ++it;
            }
        }
        return out;
    }

    std::optional<SimTime> Reassembler::next_deadline() const
    {
        std::optional<SimTime> earliest;
        for (const auto &[id, partial] : pending_)
        {
            const SimTime t = partial.first_arrival + cfg_.drop_deadline_us + 1;
            if (!earliest || t < *earliest)
            {
                earliest = t;
            }
        }
        return earliest;
    }

    std::vector<FrameOutcome> Reassembler::on_fragment(const DppHeader &h, std::span<const std::uint8_t> payload,
                                                       SimTime now)
    {
        std::vector<FrameOutcome> out = poll(now);
        ++counters_.fragments;

        if (h.msg_type != MsgType::Data || h.frag_count == 0 || h.frag_index >= h.frag_count)
        {
            ++counters_.inconsistent;
            return out;
        }

        const std::uint32_t id = h.frame_id;
        if (!started_)
        {
            started_ = true;
            next_new_id_ = id;
        }

        if (!serial_less(id, next_new_id_))
        {
            const auto gap = static_cast<std::uint64_t>(serial_distance(next_new_id_, id));
            if (gap > cfg_.max_gap)
            {
                ++counters_.inconsistent;
                return out;
            }
            for (std::uint32_t missing = next_new_id_; missing != id; ++missing)
            {
                Partial unseen;
                unseen.first_arrival = now;
                pending_.emplace(missing, std::move(unseen));
            }
            Partial fresh;
            fresh.first_arrival = now;
            pending_.emplace(id, std::move(fresh));
            next_new_id_ = id + 1;
        }

        auto it = pending_.find(id);
        if (it == pending_.end())
        {
            // Already resolved (or older than the first frame we saw).
            ++counters_.stale;
            return out;
        }

        Partial &p = it->second;
        if (p.frag_count == 0)
        {
            p.frag_count = h.frag_count;
            p.flags = h.flags;
            p.gen_timestamp_us = h.gen_timestamp_us;
            p.have.assign(h.frag_count, false);
            if (cfg_.keep_payload)
            {
                p.chunks.resize(h.frag_count);
            }
        }
        else if (p.frag_count != h.frag_count)
        {
            ++counters_.inconsistent;
            return out;
        }

        if (p.have[h.frag_index])
        {
            ++counters_.duplicates;
            return out;
        }
        p.have[h.frag_index] = true;
        ++p.received;
        p.bytes += h.payload_len;
        if (cfg_.keep_payload)
        {
            p.chunks[h.frag_index].assign(payload.begin(), payload.end());
        }

        if (p.received == p.frag_count)
        {
            FrameComplete done;
            done.frame_id = id;
            done.iframe = (p.flags & flags::kIFrame) != 0;
            done.forced = (p.flags & flags::kForced) != 0;
            done.gen_timestamp_us = p.gen_timestamp_us;
            done.first_arrival = p.first_arrival;
            done.completed = now;
            done.size_bytes = p.bytes;
            if (cfg_.keep_payload)
            {
                done.payload.reserve(static_cast<std::size_t>(p.bytes));
                for (const auto &chunk : p.chunks)
                {
                    done.payload.insert(done.payload.end(), chunk.begin(), chunk.end());
                }
            }
            ++counters_.completed;
            pending_.erase(it);
            out.emplace_back(std::move(done));
        }
        return out;
    }
} // namespace uvr::dpp
