#pragma once

#include "uvr/codec/codec_model.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvr::runner
{
    inline constexpr std::uint16_t kDefaultPort = 28864;

    enum class Role : std::uint8_t
    {
        Host,
        Mud,
    };

    const char *to_string(Role r) noexcept;

    struct RunnerConfig
    {
        Role role = Role::Host;
        std::string bind_address = "127.0.0.1";
        // 0 picks an ephemeral port.
        std::uint16_t bind_port = kDefaultPort;
        std::string peer_address = "127.0.0.1";
        std::uint16_t peer_port = kDefaultPort;

        codec::CodecConfig codec;
        bool feedback_control = true;
        double duration_s = 10.0;
        std::uint64_t seed = 42;
        double complexity_sigma = 0.0;

        std::int64_t handshake_timeout_ms = 3'000;
        // 0 selects two frame periods.
        std::int64_t drop_deadline_us = 0;
        std::int64_t suppression_window_us = 200'000;
        // MUD only: the receiver stops after this much silence once frames flowed.
        std::int64_t idle_timeout_ms = 1'000;

        // Test shim on the MUD: fraction of DATA datagrams discarded on receipt.
        double induced_loss = 0.0;

        std::vector<std::string> validate() const;
    };

    class RunnerError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
    class SocketError : public RunnerError
    {
    public:
        using RunnerError::RunnerError;
    };
    class HandshakeTimeout : public RunnerError
    {
    public:
        using RunnerError::RunnerError;
    };
    class ConfigMismatch : public RunnerError
    {
    public:
        using RunnerError::RunnerError;
    };

    struct RunnerStats
    {
        Role role = Role::Host;
        std::uint64_t frames_sent = 0;
        std::uint64_t frames_completed = 0;
        std::uint64_t frames_dropped = 0;
        std::uint64_t pattern_mismatches = 0;
        std::uint64_t iframes_sent = 0;
        std::uint64_t forced_iframes = 0;
        std::uint64_t requests_sent = 0;
        std::uint64_t requests_received = 0;
        std::uint64_t requests_accepted = 0;
        std::uint64_t datagrams_sent = 0;
        std::uint64_t datagrams_received = 0;
        std::uint64_t datagrams_rejected = 0;
        std::uint64_t datagrams_shim_dropped = 0;
        // One-way latency (receive complete - generation); meaningful only when
        // both roles run on the same machine and share its monotonic clock.
        double latency_mean_ms = 0.0;
        double latency_p50_ms = 0.0;
        double latency_p99_ms = 0.0;
        double wall_seconds = 0.0;
        std::vector<std::string> events;
    };

    /// Byte i of frame f is (f * 131 + i) mod 256.
    std::vector<std::uint8_t> payload_pattern(std::uint32_t frame_id, std::size_t size);
    bool matches_pattern(std::uint32_t frame_id, std::span<const std::uint8_t> bytes);

    /// Microseconds on the machine's monotonic clock.
    std::uint64_t monotonic_us();

    using EventSink = std::function<void(const std::string &)>;

    /// Waits for the MUD's HELLO, answers it, then paces frames at the codec rate
    /// for `duration_s` while serving I-frame requests. `stop` ends the run early.
    RunnerStats host_run(const RunnerConfig &cfg, const std::atomic<bool> *stop = nullptr, EventSink sink = {});

    /// Announces itself with HELLO, then reassembles and verifies frames until the
    /// host falls silent, sending I-frame requests on drops.
    RunnerStats mud_run(const RunnerConfig &cfg, const std::atomic<bool> *stop = nullptr, EventSink sink = {});
} // namespace uvr::runner
