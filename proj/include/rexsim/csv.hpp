#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rexsim/time_trace.hpp"

namespace rexsim {

inline constexpr char const* kToolVersion = "rexsim 1.0.0";

/*!
 * Leading `#` lines of every CSV file: tool version, subcommand, parameter
 * echo and seed. The timestamp line is the only one that changes between
 * identical runs; set `timestamp` to false to omit it.
 */
struct CsvHeader
{
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::optional<std::uint64_t> seed;
    bool timestamp = true;
};

/// Header row uses `name[unit]`; numbers use the shortest round-trip form.
void write_trace_csv(std::ostream& os, TimeTrace const& trace, CsvHeader const& header);

/// Generic table with string cells.
void write_table_csv(std::ostream& os, std::vector<std::string> const& columns,
                     std::vector<std::vector<std::string>> const& rows, CsvHeader const& header);

/*!
 * Reads a file produced by write_trace_csv (or any CSV with optional `#`
 * lines, one header row and numeric columns). The first two columns become
 * the abscissa and ordinate, further columns become extras, and `# key: value`
 * lines become metadata.
 */
TimeTrace read_trace_csv(std::istream& is);

/// Data rows only (everything after the `#` block), for payload comparisons.
std::string csv_payload(std::string const& csv_text);

} // namespace rexsim
