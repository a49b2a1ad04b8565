#pragma once

#include "uvr/core/sim_time.hpp"

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uvr
{
    class SchedulingError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    /// Deterministic discrete-event queue. Events are dispatched in (time, seq)
    /// order where seq is assigned at insertion, so equal-time events keep
    /// insertion order.
    template <typename Payload>
    class EventQueue
    {
    public:
        struct Entry
        {
            SimTime time;
            std::uint64_t seq = 0;
            Payload payload;
        };

        void schedule(SimTime t, Payload payload)
        {
            if (t < now_)
            {
                throw SchedulingError("event scheduled in the past: t=" + std::to_string(t.us()) +
                                      " now=" + std::to_string(now_.us()));
            }
            heap_.push(Entry{t, next_seq_++, std::move(payload)});
        }

        /// Removes and returns the next event, advancing the dispatch clock.
        std::optional<Entry> pop()
        {
            if (heap_.empty())
            {
                return std::nullopt;
            }
            Entry e = std::move(const_cast<Entry &>(heap_.top()));
            heap_.pop();
            now_ = e.time;
            return e;
        }

        std::optional<SimTime> peek_time() const
        {
            if (heap_.empty())
            {
                return std::nullopt;
            }
            return heap_.top().time;
        }

        SimTime now() const noexcept { return now_; }
        bool empty() const noexcept { return heap_.empty(); }
        std::size_t size() const noexcept { return heap_.size(); }

    private:
        struct Later
        {
            bool operator()(const Entry &a, const Entry &b) const noexcept
            {
                if (a.time != b.time)
                {
                    return a.time > b.time;
                }
                return a.seq > b.seq;
            }
        };

        std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
        std::uint64_t next_seq_ = 0;
        SimTime now_;
    };
} // namespace uvr
