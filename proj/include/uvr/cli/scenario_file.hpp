#pragma once

#include "uvr/pipeline/scenario.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace uvr::cli
{
    /// Sets one flat dotted key (e.g. `codec.gop_size`) from its text form.
    /// Throws codec::ConfigError for unknown keys and malformed values.
    void apply_key(pipeline::ScenarioConfig &cfg, std::string_view key, std::string_view value);

    /// Every settable key, in emission order.
    const std::vector<std::string_view> &scenario_keys();

    /// Canonical `key = value` lines that parse back to `cfg`.
    std::vector<std::pair<std::string, std::string>> emit_scenario(const pipeline::ScenarioConfig &cfg);
    std::string emit_scenario_text(const pipeline::ScenarioConfig &cfg);

    struct ParseError
    {
        int line = 0; // 0 when not tied to a line
        std::string message;
    };

    std::string to_string(const ParseError &e);

    using ParseResult = std::variant<pipeline::ScenarioConfig, std::vector<ParseError>>;

    /// Parses the key-value grammar: one `key = value` per line, `#` comments,
    /// blank lines ignored. `preset = <name>` selects the starting point wherever
    /// it appears; other keys override it. All errors are collected.
    ParseResult parse_scenario_text(std::string_view text);
    ParseResult parse_scenario_file(const std::string &path);
} // namespace uvr::cli
