#include "rexsim/numeric_format.hpp"

#include <charconv>
#include <system_error>

namespace rexsim {

std::string format_double(double value)
{
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text)
{
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    auto const* end = text.data() + text.size();
    auto const res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end || text.empty())
        return std::nullopt;
    return value;
}

} // namespace rexsim
