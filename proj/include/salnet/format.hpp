#pragma once

#include <string>
#include <string_view>

namespace salnet {

// Shortest representation that parses back to the same double.
std::string format_double(double value);
// Throws std::invalid_argument unless the whole text is a number.
double parse_double(std::string_view text);

}  // namespace salnet
