#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rexsim {

struct Column
{
    std::string name;
    std::string unit;
    std::vector<double> values;
};

/*!
 * Sampled observable: abscissa + ordinate, optional extra columns (error
 * bars, envelopes) and ordered key/value metadata.
 */
struct TimeTrace
{
    Column x;
    Column y;
    std::vector<Column> extra;
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t size() const { return x.values.size(); }

    /// Strictly increasing abscissa, finite values, equal column lengths.
    void validate() const;

    void add_meta(std::string key, std::string value);
    void add_meta(std::string key, double value);

    /// Looks up an extra column by name; nullptr when absent.
    Column const* find_extra(std::string const& name) const;
};

/// Uniform grid of `count` points from `first` to `last` inclusive.
std::vector<double> linspace(double first, double last, std::size_t count);

} // namespace rexsim
