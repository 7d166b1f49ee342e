#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rexsim {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses the whole string as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

} // namespace rexsim
