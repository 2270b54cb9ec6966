#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "salnet/experiment.hpp"

namespace salnet {

struct ConfigError : std::runtime_error {
    std::size_t line;
    ConfigError(std::size_t line_number, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + message), line(line_number) {}
};

// Line-oriented `key = value` settings applied on top of `spec`. Blank lines
// and anything after '#' are ignored. Unknown keys, malformed values and
// out-of-range settings raise ConfigError with the line number.
void apply_config(ExperimentSpec& spec, std::string_view text);

// Reads the file at `path`; throws std::runtime_error when it cannot be read.
void load_config(ExperimentSpec& spec, const std::string& path);

}  // namespace salnet
