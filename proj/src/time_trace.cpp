#include "rexsim/time_trace.hpp"

#include <cmath>

#include "rexsim/errors.hpp"
#include "rexsim/numeric_format.hpp"

namespace rexsim {

void TimeTrace::validate() const
{
    auto const n = x.values.size();
    auto check_column = [n](Column const& col) {
        if (col.values.size() != n)
            throw ValidationError("trace column '" + col.name + "' has mismatched length");
        for (double v : col.values)
        {
            if (!std::isfinite(v))
                throw ValidationError("trace column '" + col.name + "' contains a non-finite value");
        }
    };
    check_column(x);
    check_column(y);
    for (auto const& col : extra)
        check_column(col);
    for (std::size_t i = 1; i < n; ++i)
    {
        if (!(x.values[i] > x.values[i - 1]))
            throw ValidationError("trace abscissa '" + x.name + "' is not strictly increasing");
    }
}

void TimeTrace::add_meta(std::string key, std::string value)
{
    metadata.emplace_back(std::move(key), std::move(value));
}

void TimeTrace::add_meta(std::string key, double value)
{
    metadata.emplace_back(std::move(key), format_double(value));
}

Column const* TimeTrace::find_extra(std::string const& name) const
{
    for (auto const& col : extra)
    {
        if (col.name == name)
            return &col;
    }
    return nullptr;
}

std::vector<double> linspace(double first, double last, std::size_t count)
{
    std::vector<double> out(count);
    if (count == 1)
    {
        out[0] = first;
        return out;
    }
    double const step = (last - first) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = first + step * static_cast<double>(i);
    if (count > 1)
        out.back() = last;
    return out;
}

} // namespace rexsim
